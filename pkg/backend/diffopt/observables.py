"""
Diagonal observables
An observable here is one real weight per computational basis state;
E = sum_i w_i |amp_i|^2. Pauli-Z and basis projectors are special cases,
and any loss of the Born probabilities differentiates through its cotangent.
"""

from typing import Sequence

import numpy as np

from errors import QubitIndexError, WidthMismatchError
from simulator.circuit import check_width
from simulator.statevector import StateVector, probabilities, register_values


class DiagonalObservable:
    """Real diagonal observable over a `width`-qubit register"""

    def __init__(self, weights: np.ndarray):
        weights = np.array(weights, dtype=float)
        if weights.ndim != 1 or weights.size < 2 or weights.size & (weights.size - 1):
            raise WidthMismatchError(f"observable length {weights.size} is not a power of two")
        self.width = check_width(weights.size.bit_length() - 1)
        self.weights = weights
        self.weights.setflags(write=False)

    def expectation(self, state: StateVector) -> float:
        if state.width != self.width:
            raise WidthMismatchError(f"observable width {self.width} != state width {state.width}")
        return float(np.dot(self.weights, probabilities(state)))

    def scaled(self, factor: float) -> "DiagonalObservable":
        return DiagonalObservable(self.weights * factor)

    def __add__(self, other: "DiagonalObservable") -> "DiagonalObservable":
        if other.width != self.width:
            raise WidthMismatchError("cannot add observables of different widths")
        return DiagonalObservable(self.weights + other.weights)


def pauli_z(width: int, qubit: int) -> DiagonalObservable:
    if not 0 <= qubit < width:
        raise QubitIndexError(f"qubit {qubit} outside a {width}-qubit register")
    bits = (np.arange(1 << width) >> qubit) & 1
    return DiagonalObservable(1.0 - 2.0 * bits)


def projector(width: int, index: int) -> DiagonalObservable:
    """|index><index|"""
    if not 0 <= index < (1 << width):
        raise QubitIndexError(f"basis index {index} outside a {width}-qubit register")
    weights = np.zeros(1 << width)
    weights[index] = 1.0
    return DiagonalObservable(weights)


def register_projector(width: int, qubits: Sequence[int], value: int) -> DiagonalObservable:
    """Projector onto register value `value` (other qubits traced out)"""
    return DiagonalObservable((register_values(width, qubits) == value).astype(float))
