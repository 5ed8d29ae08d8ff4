"""
Line-oriented circuit text format

    QCIRCUIT v1 width=4
    PARAMS theta phi
    GATE H targets=[0] controls=[] angle=-
    GATE MCU:RY targets=[2] controls=[(0,1),(1,0)] angle=$theta

Angles are written with repr() so floats round-trip bit-exactly.
"""

import re
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from errors import CircuitFormatError, QnlpError
from simulator.circuit import Circuit
from simulator.gates import Control, GateKind, GateOp, Polarity

FORMAT_VERSION = 1
HEADER_RE = re.compile(r"^QCIRCUIT v(\d+) width=(\d+)$")
GATE_RE = re.compile(r"^GATE (\S+) targets=\[([^\]]*)\] controls=\[([^\]]*)\] angle=(\S+)$")
CONTROL_RE = re.compile(r"\((\d+),([01])\)")


def _format_angle(op: GateOp) -> str:
    if op.param_slot is not None:
        return "$" + op.param_slot
    if op.fixed_angle is not None:
        return repr(op.fixed_angle)
    return "-"


def dumps_circuit(circuit: Circuit) -> str:
    lines = [f"QCIRCUIT v{FORMAT_VERSION} width={circuit.width}"]
    lines.append(" ".join(["PARAMS", *circuit.param_names]))
    for op in circuit.ops:
        targets = ",".join(str(t) for t in op.targets)
        controls = ",".join(f"({c.qubit},{int(c.polarity)})" for c in op.controls)
        lines.append(f"GATE {op.label} targets=[{targets}] controls=[{controls}] angle={_format_angle(op)}")
    return "\n".join(lines) + "\n"


def _parse_gate(line: str, number: int) -> GateOp:
    match = GATE_RE.match(line)
    if not match:
        raise CircuitFormatError(f"line {number}: malformed gate line {line!r}")
    label, targets_text, controls_text, angle_text = match.groups()

    base: Optional[GateKind] = None
    try:
        if label.startswith("MCU:"):
            kind, base = GateKind.MCU, GateKind(label[4:])
        else:
            kind = GateKind(label)
        targets = tuple(int(t) for t in targets_text.split(",") if t.strip())
    except ValueError:
        raise CircuitFormatError(f"line {number}: bad gate kind or targets in {line!r}")

    controls = tuple(
        Control(qubit=int(q), polarity=Polarity(int(p))) for q, p in CONTROL_RE.findall(controls_text)
    )
    if len(controls) != controls_text.count("("):
        raise CircuitFormatError(f"line {number}: bad control list {controls_text!r}")

    fields = {}
    if angle_text.startswith("$"):
        fields["param_slot"] = angle_text[1:]
    elif angle_text != "-":
        try:
            fields["fixed_angle"] = float(angle_text)
        except ValueError:
            raise CircuitFormatError(f"line {number}: bad angle {angle_text!r}")

    try:
        return GateOp(kind=kind, base=base, targets=targets, controls=controls, **fields)
    except (QnlpError, ValidationError) as exc:
        raise CircuitFormatError(f"line {number}: {exc}")


def loads_circuit(text: str) -> Circuit:
    lines: List[str] = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise CircuitFormatError("circuit text needs a header and a PARAMS line")

    header = HEADER_RE.match(lines[0])
    if not header:
        raise CircuitFormatError(f"bad header {lines[0]!r}")
    if int(header.group(1)) != FORMAT_VERSION:
        raise CircuitFormatError(f"unsupported circuit format version {header.group(1)}")
    width = int(header.group(2))

    params_line = lines[1].split()
    if not params_line or params_line[0] != "PARAMS":
        raise CircuitFormatError("second line must start with PARAMS")

    ops = tuple(_parse_gate(line, number) for number, line in enumerate(lines[2:], start=3))
    try:
        return Circuit(width=width, ops=ops, param_names=tuple(params_line[1:]))
    except (QnlpError, ValidationError) as exc:
        raise CircuitFormatError(str(exc))


def save_circuit(circuit: Circuit, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_circuit(circuit))
    return path


def load_circuit(path: Union[str, Path]) -> Circuit:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CircuitFormatError(f"cannot read circuit file {path}: {exc}")
    return loads_circuit(text)
