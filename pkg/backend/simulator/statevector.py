"""
Statevector simulation
- StateVector: normalized complex128 amplitudes, basis index bit k = qubit k
- Native kernels for single-qubit, controlled and swap gates
- Sampling, post-selection, reset, inner products, register marginals

Registers are read with their first qubit as the least significant bit.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import SIMULATOR_CONFIG
from errors import (
    CapacityError,
    ImpossibleOutcomeError,
    NormDriftError,
    ParameterError,
    QubitIndexError,
    WidthMismatchError,
)
from simulator.circuit import Circuit, ParameterVector, check_width
from simulator.gates import GateKind, GateOp, rotation_derivative, single_qubit_matrix
from simulator.rng import child_rngs, make_rng, ordered_map

ControlKey = Tuple[Tuple[int, int], ...]


class StateVector:
    """Normalized amplitude vector of a `width`-qubit register"""

    def __init__(self, amps: np.ndarray, check: bool = True):
        amps = np.array(amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise CapacityError(f"amplitude vector length {amps.size} is not a power of two >= 2")
        self.width = check_width(amps.size.bit_length() - 1)
        self._amps = amps
        self._amps.setflags(write=False)
        if check:
            if not np.all(np.isfinite(amps)):
                raise NormDriftError("state has non-finite amplitudes")
            check_norm(amps)

    @property
    def amps(self) -> np.ndarray:
        return self._amps

    @property
    def dim(self) -> int:
        return self._amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def copy_amps(self) -> np.ndarray:
        return self._amps.copy()

    def tensor(self, other: "StateVector") -> "StateVector":
        """self on the low qubits, other on the qubits above it"""
        return StateVector(np.kron(other.amps, self._amps))

    def __repr__(self) -> str:
        return f"StateVector(width={self.width})"


def check_norm(amps: np.ndarray) -> None:
    drift = abs(float(np.linalg.norm(amps)) - 1.0)
    if drift > SIMULATOR_CONFIG["norm_tolerance"]:
        raise NormDriftError(f"state norm drifted by {drift:.3e}")


def zero_state(width: int) -> StateVector:
    check_width(width)
    amps = np.zeros(1 << width, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, check=False)


def basis_state(width: int, index: int) -> StateVector:
    check_width(width)
    if not 0 <= index < (1 << width):
        raise QubitIndexError(f"basis index {index} outside a {width}-qubit register")
    amps = np.zeros(1 << width, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, check=False)


def _check_qubit(width: int, qubit: int) -> None:
    if not 0 <= qubit < width:
        raise QubitIndexError(f"qubit {qubit} outside a {width}-qubit register")


# --- kernels ---
# The buffer is viewed as a (2,)*width tensor; qubit q is axis width-1-q.

def _tensor_view(amps: np.ndarray, width: int) -> np.ndarray:
    view = amps.view()
    view.shape = (2,) * width  # never a copy; raises if amps cannot be viewed
    return view


def _branch(width: int, fixed: Sequence[Tuple[int, int]]) -> Tuple:
    """Selector pinning each (qubit, bit) with a length-1 slice, so even a fully pinned result is a view"""
    selector: List = [slice(None)] * width
    for qubit, bit in fixed:
        selector[width - 1 - qubit] = slice(bit, bit + 1)
    return tuple(selector)


def _target_pair(tensor: np.ndarray, width: int, target: int, controls: ControlKey) -> Tuple[np.ndarray, np.ndarray]:
    """Views of the target=0 and target=1 halves of the control-active subspace"""
    return (tensor[_branch(width, controls + ((target, 0),))],
            tensor[_branch(width, controls + ((target, 1),))])


def _apply_matrix(amps: np.ndarray, matrix: np.ndarray, width: int, target: int, controls: ControlKey) -> None:
    v0, v1 = _target_pair(_tensor_view(amps, width), width, target, controls)
    a0 = v0.copy()
    a1 = v1.copy()
    v0[...] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    v1[...] = matrix[1, 0] * a0 + matrix[1, 1] * a1


def _swap_views(left: np.ndarray, right: np.ndarray) -> None:
    held = left.copy()
    left[...] = right
    right[...] = held


def _flip(amps: np.ndarray, width: int, target: int, controls: ControlKey) -> None:
    _swap_views(*_target_pair(_tensor_view(amps, width), width, target, controls))


def _target_matrix(op: GateOp, angle: Optional[float]) -> Optional[np.ndarray]:
    """2x2 matrix acting on the target, or None for the permutation fast paths"""
    kind = op.base if op.kind == GateKind.MCU else op.kind
    if kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
        return None
    return single_qubit_matrix(kind, angle)


def apply_op_inplace(amps: np.ndarray, op: GateOp, angle: Optional[float], width: int) -> None:
    """
    Apply one unitary op to a raw amplitude buffer

    Args:
        amps: writable contiguous complex128 buffer of length 2^width
        op: any op except RESET
        angle: bound angle for rotation ops
    """
    if op.kind == GateKind.RESET:
        raise ParameterError("RESET is not a unitary op; use reset()")
    if op.is_rotation and angle is None:
        raise ParameterError(f"{op.label} on qubit {op.targets[0]} has no bound angle")

    controls = op.control_key
    if op.kind == GateKind.SWAP:
        a, b = op.targets
        tensor = _tensor_view(amps, width)
        _swap_views(tensor[_branch(width, controls + ((a, 1), (b, 0)))],
                    tensor[_branch(width, controls + ((a, 0), (b, 1)))])
        return

    target = op.targets[0]
    matrix = _target_matrix(op, angle)
    if matrix is None:
        _flip(amps, width, target, controls)
        return
    _apply_matrix(amps, matrix, width, target, controls)


def apply_op_inverse_inplace(amps: np.ndarray, op: GateOp, angle: Optional[float], width: int) -> None:
    """U^dagger: rotations invert by negating the angle, the rest are involutions"""
    apply_op_inplace(amps, op, -angle if op.is_rotation else angle, width)


def apply_op_derivative(amps: np.ndarray, op: GateOp, angle: float, width: int) -> np.ndarray:
    """
    d(U(theta))/dtheta applied to amps, as a new buffer

    For controlled rotations the inactive control branch has zero derivative.
    """
    derivative = rotation_derivative(op.rotation_kind, angle)
    out = np.zeros_like(amps)
    target = op.targets[0]
    a0, a1 = _target_pair(_tensor_view(amps, width), width, target, op.control_key)
    o0, o1 = _target_pair(_tensor_view(out, width), width, target, op.control_key)
    o0[...] = derivative[0, 0] * a0 + derivative[0, 1] * a1
    o1[...] = derivative[1, 0] * a0 + derivative[1, 1] * a1
    return out


# --- public operations ---

def apply_gate(state: StateVector, op: GateOp, bound_angle: Optional[float] = None) -> StateVector:
    """Apply one unitary gate; rotations take their fixed angle unless one is bound"""
    for qubit in op.qubits:
        _check_qubit(state.width, qubit)
    angle = bound_angle if bound_angle is not None else op.fixed_angle
    amps = state.copy_amps()
    apply_op_inplace(amps, op, angle, state.width)
    check_norm(amps)
    return StateVector(amps, check=False)


def run_angles(circuit: Circuit, angles: Sequence[Optional[float]], initial: Optional[StateVector] = None,
               seed: Optional[int] = None) -> np.ndarray:
    """Raw forward pass with explicit per-op angles; returns the final amplitude buffer"""
    if initial is None:
        initial = zero_state(circuit.width)
    elif initial.width != circuit.width:
        raise WidthMismatchError(f"state width {initial.width} != circuit width {circuit.width}")
    amps = initial.copy_amps()
    rng = None
    for op, angle in zip(circuit.ops, angles):
        if op.kind == GateKind.RESET:
            if seed is None:
                raise ParameterError("circuit contains RESET; a seed is required")
            rng = rng if rng is not None else make_rng(seed)
            amps = _reset_amps(amps, circuit.width, op.targets[0], rng)
        else:
            apply_op_inplace(amps, op, angle, circuit.width)
    return amps


def apply_circuit(circuit: Circuit, params: Optional[ParameterVector] = None,
                  initial: Optional[StateVector] = None, seed: Optional[int] = None) -> StateVector:
    """
    Run a circuit

    Args:
        circuit: gates applied in order
        params: values for circuit.param_names (omit for parameter-free circuits)
        initial: starting state, |0...0> by default
        seed: only needed when the circuit contains RESET
    """
    amps = run_angles(circuit, circuit.bind(params), initial, seed)
    check_norm(amps)
    return StateVector(amps, check=False)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amps) ** 2


def _normalized_probabilities(state: StateVector) -> np.ndarray:
    probs = probabilities(state)
    return probs / probs.sum()


def sample(state: StateVector, shots: int, seed: int) -> np.ndarray:
    """i.i.d. basis-index draws from the Born distribution"""
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    rng = make_rng(seed)
    return rng.choice(state.dim, size=shots, p=_normalized_probabilities(state))


def sample_batched(state: StateVector, shots: int, seed: int, batches: int = 4,
                   threads: Optional[int] = None) -> np.ndarray:
    """
    Split shots over batches, each drawing from its own child stream

    The result depends on (seed, batches) only, never on the thread count.
    """
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    batches = max(1, min(batches, shots))
    probs = _normalized_probabilities(state)
    sizes = [shots // batches + (1 if i < shots % batches else 0) for i in range(batches)]
    rngs = child_rngs(seed, batches)
    draws = ordered_map(lambda job: job[0].choice(state.dim, size=job[1], p=probs), list(zip(rngs, sizes)), threads)
    return np.concatenate(draws)


def _branch_mass(amps: np.ndarray, width: int, qubit: int, value: int) -> Tuple[np.ndarray, float]:
    index = np.arange(1 << width)
    keep = ((index >> qubit) & 1) == value
    return keep, float(np.sum(np.abs(amps[keep]) ** 2))


def post_select(state: StateVector, qubit: int, value: int) -> Tuple[StateVector, float]:
    """
    Condition on qubit == value

    Returns:
        (renormalized state, probability of the outcome before renormalization)
    """
    _check_qubit(state.width, qubit)
    if value not in (0, 1):
        raise ParameterError(f"post-selection value must be 0 or 1, got {value}")
    keep, mass = _branch_mass(state.amps, state.width, qubit, value)
    if mass < SIMULATOR_CONFIG["impossible_outcome"]:
        raise ImpossibleOutcomeError(f"outcome qubit {qubit} = {value} has probability {mass:.3e}")
    amps = np.where(keep, state.amps, 0.0) / np.sqrt(mass)
    return StateVector(amps, check=False), mass


def _reset_amps(amps: np.ndarray, width: int, qubit: int, rng: np.random.Generator) -> np.ndarray:
    _, p1 = _branch_mass(amps, width, qubit, 1)
    threshold = SIMULATOR_CONFIG["impossible_outcome"]
    if p1 < threshold:
        outcome = 0
    elif 1.0 - p1 < threshold:
        outcome = 1
    else:
        outcome = 1 if rng.random() < p1 else 0
    selected, _ = post_select(StateVector(amps, check=False), qubit, outcome)
    out = selected.copy_amps()
    if outcome == 1:
        _flip(out, width, qubit, ())
    return out


def reset(state: StateVector, qubit: int, seed: int) -> StateVector:
    """Measure qubit (seeded), then flip it back to |0> if the outcome was 1"""
    _check_qubit(state.width, qubit)
    amps = _reset_amps(state.amps, state.width, qubit, make_rng(seed))
    return StateVector(amps, check=False)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugating a"""
    if a.width != b.width:
        raise WidthMismatchError(f"inner product of widths {a.width} and {b.width}")
    return complex(np.vdot(a.amps, b.amps))


def expectation_z(state: StateVector, qubit: int) -> float:
    _check_qubit(state.width, qubit)
    probs = probabilities(state)
    bits = (np.arange(state.dim) >> qubit) & 1
    return float(np.sum(probs[bits == 0]) - np.sum(probs[bits == 1]))


def register_values(width: int, qubits: Sequence[int]) -> np.ndarray:
    """For every basis index, the integer value of the given register"""
    index = np.arange(1 << width)
    values = np.zeros(1 << width, dtype=np.int64)
    for position, qubit in enumerate(qubits):
        values |= ((index >> qubit) & 1) << position
    return values


def register_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Marginal distribution of a register (length 2^len(qubits))"""
    for qubit in qubits:
        _check_qubit(state.width, qubit)
    values = register_values(state.width, qubits)
    return np.bincount(values, weights=probabilities(state), minlength=1 << len(qubits))


def read_register(index: int, qubits: Sequence[int]) -> int:
    """Value of a register inside one sampled basis index"""
    value = 0
    for position, qubit in enumerate(qubits):
        value |= ((index >> qubit) & 1) << position
    return value


def dense_unitary(circuit: Circuit, params: Optional[ParameterVector] = None) -> np.ndarray:
    """Full 2^q x 2^q matrix of a unitary circuit, column j = circuit applied to |j>"""
    max_width = SIMULATOR_CONFIG["dense_unitary_max_qubits"]
    if circuit.width > max_width:
        raise CapacityError(f"dense unitary limited to {max_width} qubits")
    angles = circuit.bind(params)
    dim = 1 << circuit.width
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    for column in range(dim):
        matrix[:, column] = run_angles(circuit, angles, basis_state(circuit.width, column))
    return matrix


def nonzero_amplitudes(state: StateVector, tolerance: float = 1e-12) -> List[Tuple[int, complex]]:
    return [(int(i), complex(state.amps[i])) for i in np.flatnonzero(np.abs(state.amps) > tolerance)]
