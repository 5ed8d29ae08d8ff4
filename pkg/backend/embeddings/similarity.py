"""
Fidelity and the swap test
Ancilla = qubit 0, first state on qubits 1..m, second on m+1..2m.
P(ancilla = 0) = (1 + F) / 2, so F = <Z_ancilla>.
"""

from typing import List, Sequence, Tuple

import numpy as np

from diffopt.observables import DiagonalObservable, pauli_z
from embeddings.model import EmbeddingModel, word_state
from errors import WidthMismatchError
from simulator.circuit import Circuit, CircuitBuilder
from simulator.statevector import (
    StateVector,
    apply_circuit,
    inner_product,
    probabilities,
    sample,
    zero_state,
)

ANCILLA = 0


def swap_test_block(qubits: int) -> Circuit:
    """H on the ancilla, one controlled SWAP per qubit pair, H on the ancilla"""
    builder = CircuitBuilder(1 + 2 * qubits)
    builder.h(ANCILLA)
    for i in range(qubits):
        builder.swap(1 + i, 1 + qubits + i, controls=[ANCILLA])
    builder.h(ANCILLA)
    return builder.build()


def swap_test_circuit(a: Circuit, b: Circuit) -> Circuit:
    """Prepare a and b (parameters prefixed "a:" / "b:") and run the swap test"""
    if a.width != b.width:
        raise WidthMismatchError(f"swap test of widths {a.width} and {b.width}")
    m = a.width
    width = 1 + 2 * m
    first = a.relabel([1 + i for i in range(m)], width, prefix="a:")
    second = b.relabel([1 + m + i for i in range(m)], width, prefix="b:")
    return first.compose(second).compose(swap_test_block(m))


def swap_test_observable(qubits: int) -> DiagonalObservable:
    """<Z_ancilla> on the swap-test register equals the fidelity"""
    return pauli_z(1 + 2 * qubits, ANCILLA)


def swap_test_states(a: StateVector, b: StateVector) -> StateVector:
    """Final swap-test state for two already prepared states"""
    if a.width != b.width:
        raise WidthMismatchError(f"swap test of widths {a.width} and {b.width}")
    initial = zero_state(1).tensor(a).tensor(b)
    return apply_circuit(swap_test_block(a.width), initial=initial)


def ancilla_zero_probability(state: StateVector) -> float:
    probs = probabilities(state)
    return float(np.sum(probs[0::2]))


def fidelity_exact(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 clipped to [0, 1]"""
    return float(min(1.0, max(0.0, abs(inner_product(a, b)) ** 2)))


def swap_test_estimate(a: StateVector, b: StateVector, shots: int, seed: int) -> float:
    """
    Shot estimate F = 2 * P(ancilla = 0) - 1

    Unclipped, so it can fall slightly below 0 for near-orthogonal states.
    """
    draws = sample(swap_test_states(a, b), shots, seed)
    zeros = int(np.count_nonzero((draws & 1) == 0))
    return 2.0 * zeros / shots - 1.0


def pair_fidelities(model: EmbeddingModel, pairs: Sequence[Tuple[str, str]]) -> List[Tuple[str, str, float]]:
    """Exact fidelity for each token pair; both schemes"""
    cache = {}

    def state_of(token: str) -> StateVector:
        index = model.vocabulary.index(token)
        if index not in cache:
            cache[index] = word_state(model, index)
        return cache[index]

    return [(first, second, fidelity_exact(state_of(first), state_of(second))) for first, second in pairs]
