"""
Circuit model
- ParameterVector: ordered, finite angles aligned with a circuit's param_names
- Circuit: width + ordered GateOps + symbolic parameter names
- CircuitBuilder: fluent construction used by every circuit factory
"""

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import SIMULATOR_CONFIG
from errors import CapacityError, ParameterError, QubitIndexError, WidthMismatchError
from simulator import gates
from simulator.gates import Control, GateKind, GateOp


class ParameterVector(BaseModel):
    """Real rotation angles in radians"""
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_finite(self) -> "ParameterVector":
        if not all(math.isfinite(v) for v in self.values):
            raise ParameterError("parameter values must be finite")
        return self

    @classmethod
    def of(cls, values: Iterable[float]) -> "ParameterVector":
        return cls(values=tuple(float(v) for v in values))

    @classmethod
    def zeros(cls, count: int) -> "ParameterVector":
        return cls(values=(0.0,) * count)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


def check_width(width: int) -> int:
    max_qubits = SIMULATOR_CONFIG["max_qubits"]
    if not 1 <= width <= max_qubits:
        raise CapacityError(f"width {width} outside 1..{max_qubits}")
    return width


class Circuit(BaseModel):
    """
    Ordered gate list over a fixed-width register

    Circuits are immutable; relabel/compose/freeze return new circuits.
    """
    model_config = ConfigDict(frozen=True)

    width: int
    ops: Tuple[GateOp, ...] = ()
    param_names: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_wiring(self) -> "Circuit":
        check_width(self.width)
        if len(set(self.param_names)) != len(self.param_names):
            raise ParameterError("duplicate parameter names")
        for name in self.param_names:
            if not name or any(ch.isspace() for ch in name) or name.startswith("$"):
                raise ParameterError(f"invalid parameter name {name!r}")
        known = set(self.param_names)
        for position, op in enumerate(self.ops):
            for qubit in op.qubits:
                if qubit >= self.width:
                    raise QubitIndexError(f"op {position} ({op.label}) touches qubit {qubit} >= width {self.width}")
            if op.param_slot is not None and op.param_slot not in known:
                raise ParameterError(f"op {position} references undeclared parameter {op.param_slot!r}")
        return self

    @property
    def num_params(self) -> int:
        return len(self.param_names)

    @property
    def slot_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.param_names)}

    def bind(self, params: Optional[ParameterVector] = None) -> List[Optional[float]]:
        """
        Resolve every op's angle

        Returns:
            One entry per op: the bound angle for rotations, None otherwise
        """
        values = params.values if params is not None else ()
        if len(values) != self.num_params:
            raise ParameterError(f"circuit has {self.num_params} parameters, got {len(values)}")
        lookup = dict(zip(self.param_names, values))
        angles: List[Optional[float]] = []
        for op in self.ops:
            if op.param_slot is not None:
                angles.append(lookup[op.param_slot])
            else:
                angles.append(op.fixed_angle)
        return angles

    def freeze(self, params: ParameterVector) -> "Circuit":
        """Replace every parameter slot by its bound value"""
        angles = self.bind(params)
        ops = [
            op.model_copy(update={"param_slot": None, "fixed_angle": angle}) if op.param_slot is not None else op
            for op, angle in zip(self.ops, angles)
        ]
        return Circuit(width=self.width, ops=tuple(ops))

    def relabel(self, qubit_map: Sequence[int], width: int, prefix: str = "") -> "Circuit":
        """
        Embed this circuit into a larger register

        Args:
            qubit_map: qubit_map[i] is the new index of qubit i
            width: width of the enclosing register
            prefix: prepended to every parameter name
        """
        if len(qubit_map) != self.width:
            raise WidthMismatchError(f"qubit map has {len(qubit_map)} entries for width {self.width}")
        if len(set(qubit_map)) != len(qubit_map):
            raise QubitIndexError("qubit map is not injective")

        ops = []
        for op in self.ops:
            update = {
                "targets": tuple(qubit_map[t] for t in op.targets),
                "controls": tuple(Control(qubit=qubit_map[c.qubit], polarity=c.polarity) for c in op.controls),
            }
            if op.param_slot is not None:
                update["param_slot"] = prefix + op.param_slot
            ops.append(op.model_copy(update=update))
        return Circuit(width=width, ops=tuple(ops), param_names=tuple(prefix + n for n in self.param_names))

    def compose(self, other: "Circuit") -> "Circuit":
        """self followed by other; shared parameter names stay shared"""
        if other.width != self.width:
            raise WidthMismatchError(f"cannot compose width {self.width} with width {other.width}")
        names = list(self.param_names)
        seen = set(names)
        names.extend(n for n in other.param_names if n not in seen)
        return Circuit(width=self.width, ops=self.ops + other.ops, param_names=tuple(names))

    def count(self, kind: GateKind) -> int:
        return sum(1 for op in self.ops if op.kind == kind)


class CircuitBuilder:
    """Fluent circuit construction; string angles declare parameters on first use"""

    def __init__(self, width: int, prefix: str = ""):
        self.width = check_width(width)
        self.prefix = prefix
        self._ops: List[GateOp] = []
        self._params: List[str] = []
        self._seen = set()

    def param(self, name: str) -> str:
        full = self.prefix + name
        if full not in self._seen:
            self._seen.add(full)
            self._params.append(full)
        return full

    def _angle(self, angle: gates.Angle) -> gates.Angle:
        return self.param(angle) if isinstance(angle, str) else angle

    def add(self, op: GateOp) -> "CircuitBuilder":
        if op.param_slot is not None and op.param_slot not in self._seen:
            self._seen.add(op.param_slot)
            self._params.append(op.param_slot)
        self._ops.append(op)
        return self

    def extend(self, circuit: Circuit) -> "CircuitBuilder":
        if circuit.width != self.width:
            raise WidthMismatchError(f"cannot append width {circuit.width} to width {self.width}")
        for name in circuit.param_names:
            if name not in self._seen:
                self._seen.add(name)
                self._params.append(name)
        self._ops.extend(circuit.ops)
        return self

    def x(self, target: int) -> "CircuitBuilder":
        return self.add(gates.x(target))

    def h(self, target: int) -> "CircuitBuilder":
        return self.add(gates.h(target))

    def rx(self, target: int, angle: gates.Angle) -> "CircuitBuilder":
        return self.add(gates.rx(target, self._angle(angle)))

    def ry(self, target: int, angle: gates.Angle) -> "CircuitBuilder":
        return self.add(gates.ry(target, self._angle(angle)))

    def rz(self, target: int, angle: gates.Angle) -> "CircuitBuilder":
        return self.add(gates.rz(target, self._angle(angle)))

    def cnot(self, control: int, target: int) -> "CircuitBuilder":
        return self.add(gates.cnot(control, target))

    def swap(self, a: int, b: int, controls: Sequence = ()) -> "CircuitBuilder":
        return self.add(gates.swap(a, b, controls))

    def mcx(self, controls: Sequence, target: int) -> "CircuitBuilder":
        return self.add(gates.mcx(controls, target))

    def mcu(self, base: GateKind, controls: Sequence, target: int,
            angle: Optional[gates.Angle] = None) -> "CircuitBuilder":
        return self.add(gates.mcu(base, controls, target, self._angle(angle) if angle is not None else None))

    def reset(self, target: int) -> "CircuitBuilder":
        return self.add(gates.reset(target))

    def build(self) -> Circuit:
        return Circuit(width=self.width, ops=tuple(self._ops), param_names=tuple(self._params))
