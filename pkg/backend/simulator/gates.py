"""
Gate definitions for the statevector simulator
- GateKind / Polarity / Control / GateOp data models
- 2x2 matrices and rotation generators for the single-qubit gate set
- Small constructor helpers used by all circuit builders
"""

import math
from enum import Enum, IntEnum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import ParameterError, QubitIndexError


class GateKind(str, Enum):
    X = "X"
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    SWAP = "SWAP"
    MCX = "MCX"
    MCU = "MCU"
    RESET = "RESET"


class Polarity(IntEnum):
    """Control polarity: OPEN fires on |0>, CLOSED fires on |1>"""
    OPEN = 0
    CLOSED = 1


ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)
# Single-qubit unitaries an MCU may carry on its target
MCU_BASES = (GateKind.X, GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ)

_SQRT1_2 = 1.0 / math.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)

# R(theta) = exp(-i theta/2 G). RX follows the gate-table matrix
# [[c, i s], [i s, c]], whose generator is -X.
ROTATION_GENERATORS = {
    GateKind.RX: -PAULI_X,
    GateKind.RY: PAULI_Y,
    GateKind.RZ: PAULI_Z,
}


class Control(BaseModel):
    """A control qubit and the value it must hold for the gate to fire"""
    model_config = ConfigDict(frozen=True)

    qubit: int = Field(ge=0)
    polarity: Polarity = Polarity.CLOSED


class GateOp(BaseModel):
    """
    One gate application

    Rotation kinds (RX/RY/RZ, or MCU carrying a rotation) hold either a
    symbolic param_slot or a fixed_angle, never both.
    """
    model_config = ConfigDict(frozen=True)

    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[Control, ...] = ()
    base: Optional[GateKind] = None
    param_slot: Optional[str] = None
    fixed_angle: Optional[float] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "GateOp":
        kind = self.kind
        n_targets = 2 if kind == GateKind.SWAP else 1
        if len(self.targets) != n_targets:
            raise QubitIndexError(f"{kind.value} needs {n_targets} target(s), got {list(self.targets)}")
        if any(t < 0 for t in self.targets):
            raise QubitIndexError(f"negative target in {list(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise QubitIndexError(f"repeated target in {list(self.targets)}")

        control_qubits = [c.qubit for c in self.controls]
        if len(set(control_qubits)) != len(control_qubits):
            raise QubitIndexError(f"repeated control qubit in {control_qubits}")
        if set(control_qubits) & set(self.targets):
            raise QubitIndexError(f"controls {control_qubits} overlap targets {list(self.targets)}")

        if kind == GateKind.CNOT and len(self.controls) != 1:
            raise QubitIndexError("CNOT takes exactly one control")
        if kind in (GateKind.MCX, GateKind.MCU) and not self.controls:
            raise QubitIndexError(f"{kind.value} needs at least one control")
        if kind not in (GateKind.CNOT, GateKind.MCX, GateKind.MCU, GateKind.SWAP) and self.controls:
            raise QubitIndexError(f"{kind.value} takes no controls; use MCX/MCU")

        if kind == GateKind.MCU:
            if self.base not in MCU_BASES:
                raise ParameterError(f"MCU base must be one of {[b.value for b in MCU_BASES]}")
        elif self.base is not None:
            raise ParameterError(f"{kind.value} takes no base gate")

        if self.is_rotation:
            if (self.param_slot is None) == (self.fixed_angle is None):
                raise ParameterError(f"{self.label} needs exactly one of param_slot / fixed_angle")
            if self.fixed_angle is not None and not math.isfinite(self.fixed_angle):
                raise ParameterError(f"{self.label} angle must be finite")
        elif self.param_slot is not None or self.fixed_angle is not None:
            raise ParameterError(f"{self.label} is not a rotation and takes no angle")
        return self

    @property
    def rotation_kind(self) -> Optional[GateKind]:
        """RX/RY/RZ when the gate (or its MCU base) is a rotation"""
        if self.kind in ROTATION_KINDS:
            return self.kind
        if self.kind == GateKind.MCU and self.base in ROTATION_KINDS:
            return self.base
        return None

    @property
    def is_rotation(self) -> bool:
        return self.rotation_kind is not None

    @property
    def is_unitary(self) -> bool:
        return self.kind != GateKind.RESET

    @property
    def label(self) -> str:
        if self.kind == GateKind.MCU:
            return f"MCU:{self.base.value}"
        return self.kind.value

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + self.targets

    @property
    def control_key(self) -> Tuple[Tuple[int, int], ...]:
        """(qubit, polarity) pairs the kernels pin"""
        return tuple((c.qubit, int(c.polarity)) for c in self.controls)


def single_qubit_matrix(kind: GateKind, angle: Optional[float] = None) -> np.ndarray:
    """2x2 unitary for X, H or a rotation bound to `angle`"""
    if kind == GateKind.X:
        return PAULI_X
    if kind == GateKind.H:
        return HADAMARD
    if kind in ROTATION_KINDS:
        if angle is None:
            raise ParameterError(f"{kind.value} rotation has no bound angle")
        c = math.cos(angle / 2.0)
        s = math.sin(angle / 2.0)
        if kind == GateKind.RX:
            return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)
        if kind == GateKind.RY:
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise ParameterError(f"{kind.value} has no single-qubit matrix")


def rotation_derivative(kind: GateKind, angle: float) -> np.ndarray:
    """dR/dtheta = -i/2 G R(theta)"""
    return -0.5j * ROTATION_GENERATORS[kind] @ single_qubit_matrix(kind, angle)


# --- constructor helpers ---

Angle = Union[float, str]


def _angle_fields(angle: Angle) -> dict:
    if isinstance(angle, str):
        return {"param_slot": angle}
    return {"fixed_angle": float(angle)}


def _controls(spec: Sequence[Union[int, Tuple[int, int], Control]]) -> Tuple[Control, ...]:
    """Accept qubit ints (CLOSED), (qubit, polarity) pairs, or Control objects"""
    controls = []
    for item in spec:
        if isinstance(item, Control):
            controls.append(item)
        elif isinstance(item, tuple):
            controls.append(Control(qubit=item[0], polarity=Polarity(item[1])))
        else:
            controls.append(Control(qubit=int(item)))
    return tuple(controls)


def x(target: int) -> GateOp:
    return GateOp(kind=GateKind.X, targets=(target,))


def h(target: int) -> GateOp:
    return GateOp(kind=GateKind.H, targets=(target,))


def rx(target: int, angle: Angle) -> GateOp:
    return GateOp(kind=GateKind.RX, targets=(target,), **_angle_fields(angle))


def ry(target: int, angle: Angle) -> GateOp:
    return GateOp(kind=GateKind.RY, targets=(target,), **_angle_fields(angle))


def rz(target: int, angle: Angle) -> GateOp:
    return GateOp(kind=GateKind.RZ, targets=(target,), **_angle_fields(angle))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(kind=GateKind.CNOT, targets=(target,), controls=_controls([control]))


def swap(a: int, b: int, controls: Sequence = ()) -> GateOp:
    return GateOp(kind=GateKind.SWAP, targets=(a, b), controls=_controls(controls))


def mcx(controls: Sequence, target: int) -> GateOp:
    return GateOp(kind=GateKind.MCX, targets=(target,), controls=_controls(controls))


def mcu(base: GateKind, controls: Sequence, target: int, angle: Optional[Angle] = None) -> GateOp:
    fields = _angle_fields(angle) if angle is not None else {}
    return GateOp(kind=GateKind.MCU, base=base, targets=(target,), controls=_controls(controls), **fields)


def reset(target: int) -> GateOp:
    return GateOp(kind=GateKind.RESET, targets=(target,))
