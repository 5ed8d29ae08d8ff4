"""
Quantum Skip-gram / CBOW prediction head
p(k|w) = |<k| V(phi) (|w> (x) |0...0>)|^2 over n = max(index_bits, m) qubits;
outcomes k >= N are dead and the vocabulary part is renormalized.
"""

from typing import Tuple

import numpy as np

from config.settings import EMBEDDING_DEFAULTS, SEQGEN_DEFAULTS
from embeddings.ansatz import AnsatzSpec, build_ansatz_circuit
from embeddings.model import EmbeddingModel
from errors import DegenerateOutputError, ParameterError, VocabularyError, WidthMismatchError
from simulator.circuit import Circuit, ParameterVector
from simulator.statevector import StateVector, apply_circuit, probabilities, zero_state

HEAD_PREFIX = "head:"


def head_ansatz(model: EmbeddingModel, layers: int = EMBEDDING_DEFAULTS["head_layers"]) -> AnsatzSpec:
    return AnsatzSpec(qubits=model.register_width, layers=layers)


def head_circuit(model: EmbeddingModel, layers: int = EMBEDDING_DEFAULTS["head_layers"]) -> Circuit:
    return build_ansatz_circuit(head_ansatz(model, layers), prefix=HEAD_PREFIX)


def head_layers(model: EmbeddingModel, head_params: ParameterVector) -> int:
    per_layer = 2 * model.register_width
    if not head_params.values or len(head_params) % per_layer:
        raise ParameterError(f"head needs a positive multiple of {per_layer} angles, got {len(head_params)}")
    return len(head_params) // per_layer


def pad_input(model: EmbeddingModel, input_state: StateVector) -> StateVector:
    """|w> on the low m qubits, |0> on the rest of the head register"""
    if input_state.width != model.qubits:
        raise WidthMismatchError(f"input state has {input_state.width} qubits, model uses {model.qubits}")
    extra = model.register_width - model.qubits
    return input_state.tensor(zero_state(extra)) if extra else input_state


def head_output(model: EmbeddingModel, head_params: ParameterVector, input_state: StateVector) -> np.ndarray:
    """Born probabilities over all 2^n head outcomes"""
    circuit = head_circuit(model, head_layers(model, head_params))
    return probabilities(apply_circuit(circuit, head_params, pad_input(model, input_state)))


def skipgram_head_prob(model: EmbeddingModel, head_params: ParameterVector, input_state: StateVector,
                       k: int) -> float:
    """Raw (not renormalized) probability of outcome k"""
    if not 0 <= k < 1 << model.register_width:
        raise VocabularyError(f"outcome {k} outside a {model.register_width}-qubit head")
    return float(head_output(model, head_params, input_state)[k])


def renormalize(probs: np.ndarray, vocab_size: int) -> Tuple[np.ndarray, float]:
    """Restrict to the first N outcomes and renormalize; returns (p_tilde, in-vocabulary mass)"""
    mass = float(np.sum(probs[:vocab_size]))
    if mass < SEQGEN_DEFAULTS["min_vocab_mass"]:
        raise DegenerateOutputError(f"in-vocabulary probability mass {mass:.3e}")
    return probs[:vocab_size] / mass, mass


def head_distribution(model: EmbeddingModel, head_params: ParameterVector, input_state: StateVector) -> np.ndarray:
    """p_tilde(k|w) for k < N"""
    return renormalize(head_output(model, head_params, input_state), model.vocabulary.size)[0]


def nll_objective(vocab_size: int, target: int, floor: float = SEQGEN_DEFAULTS["probability_floor"]):
    """-ln max(p_tilde(target), floor) as a ProbabilityObjective over the head register"""
    def objective(probs: np.ndarray) -> Tuple[float, np.ndarray]:
        mass = float(np.sum(probs[:vocab_size]))
        if mass < SEQGEN_DEFAULTS["min_vocab_mass"]:
            raise DegenerateOutputError(f"in-vocabulary probability mass {mass:.3e}")
        p_target = probs[target] / mass
        cotangent = np.zeros_like(probs)
        if p_target < floor:
            return -np.log(floor), cotangent
        cotangent[:vocab_size] = 1.0 / mass
        cotangent[target] -= 1.0 / probs[target]
        return float(-np.log(p_target)), cotangent
    return objective
