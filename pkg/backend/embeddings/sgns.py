"""
Quantum skip-gram with negative sampling
loss = -ln(F(target, context) + eps) - sum_neg ln(1 - F(target, neg) + eps)
Fidelities come from the swap-test circuit, so their gradients are diffopt
gradients of <Z_ancilla>. The memory scheme is trained by finite differences.
"""

import logging
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import EMBEDDING_DEFAULTS, OPTIMIZER_DEFAULTS
from diffopt.gradients import GRADIENT_METHODS, LossResult, circuit_grad, expectation, finite_diff_grad
from diffopt.trainer import TrainConfig, train
from embeddings.ansatz import AnsatzSpec, build_ansatz_circuit
from embeddings.model import EmbeddingModel, EmbeddingScheme, memory_efficient_state, word_state
from embeddings.similarity import fidelity_exact, swap_test_circuit, swap_test_observable
from errors import CorpusError, ParameterError
from reports.trace_reporter import TraceReporter
from simulator.circuit import Circuit, ParameterVector
from simulator.rng import make_rng, ordered_map

logger = logging.getLogger(__name__)


class SgnsConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int = Field(default=EMBEDDING_DEFAULTS["window"], ge=1)
    negatives: int = Field(default=EMBEDDING_DEFAULTS["negatives"], ge=1)
    epochs: int = Field(default=EMBEDDING_DEFAULTS["epochs"], ge=0)
    learning_rate: float = Field(default=OPTIMIZER_DEFAULTS["learning_rate"], gt=0)
    seed: int = 0
    gradient_method: str = Field(default="adjoint", pattern="^(adjoint|parameter_shift|finite_diff)$")
    threads: Optional[int] = None


class TrainingPair(NamedTuple):
    target: int
    context: int
    negatives: Tuple[int, ...]


class SgnsLossResult(NamedTuple):
    loss: float
    # circuit scheme: word index -> dLoss/dtheta_word
    word_grads: Dict[int, np.ndarray]
    # memory scheme: dLoss/dtheta_shared
    shared_grad: Optional[np.ndarray] = None


class EmbeddingTrainResult(NamedTuple):
    model: EmbeddingModel
    history: List[float]


def _window(sentence: Sequence[int], position: int, radius: int) -> List[int]:
    return [j for j in range(max(0, position - radius), min(len(sentence), position + radius + 1)) if j != position]


def generate_training_pairs(corpus: Sequence[Sequence[int]], config: SgnsConfig,
                            vocab_size: int) -> List[TrainingPair]:
    """
    One record per (target, in-window context) pair, in corpus order

    Negatives are drawn uniformly with replacement, excluding the target and
    every token of its window; when that leaves nothing, only the target and
    the pair's context are excluded.
    """
    rng = make_rng(config.seed)
    pairs: List[TrainingPair] = []
    for sentence in corpus:
        for position, target in enumerate(sentence):
            window = _window(sentence, position, config.window)
            window_tokens = {sentence[j] for j in window}
            for j in window:
                context = sentence[j]
                candidates = [v for v in range(vocab_size) if v != target and v not in window_tokens]
                if not candidates:
                    candidates = [v for v in range(vocab_size) if v not in (target, context)]
                if not candidates:
                    raise CorpusError(f"no negative candidates for target {target} and context {context}")
                drawn = rng.choice(candidates, size=config.negatives, replace=True)
                pairs.append(TrainingPair(target, context, tuple(int(v) for v in drawn)))
    if not pairs:
        raise CorpusError("corpus yields no (target, context) pairs")
    return pairs


def sgns_objective(positive_fidelity: float, negative_fidelities: Sequence[float],
                   epsilon: float = EMBEDDING_DEFAULTS["sgns_epsilon"]) -> float:
    loss = -np.log(positive_fidelity + epsilon)
    for fidelity in negative_fidelities:
        loss -= np.log(1.0 - fidelity + epsilon)
    return float(loss)


@lru_cache(maxsize=16)
def fidelity_circuit(ansatz: AnsatzSpec) -> Circuit:
    """Swap test of two symbolic word states; params = theta_a followed by theta_b"""
    word = build_ansatz_circuit(ansatz)
    return swap_test_circuit(word, word)


def _fidelity_and_grads(model: EmbeddingModel, a: int, b: int, method: str) -> Tuple[float, np.ndarray, np.ndarray]:
    """F(a, b) with dF/dtheta_a and dF/dtheta_b (circuit scheme)"""
    circuit = fidelity_circuit(model.ansatz)
    observable = swap_test_observable(model.qubits)
    params = ParameterVector(values=model.word_params[a] + model.word_params[b])
    fidelity = expectation(circuit, params, observable)
    grad = circuit_grad(method, circuit, params, observable)
    half = model.ansatz.num_params
    return fidelity, grad[:half], grad[half:]


def _check_pair(model: EmbeddingModel, target: int, context: int, negatives: Sequence[int]) -> None:
    for index in (target, context, *negatives):
        model.vocabulary.check_index(index)
    if target in negatives:
        raise ParameterError(f"target {target} appears among its negatives")


def _accumulate(grads: Dict[int, np.ndarray], index: int, value: np.ndarray) -> None:
    if index in grads:
        grads[index] = grads[index] + value
    else:
        grads[index] = value.copy()


def _pair_term(fidelities: Dict, target: int, context: int, negatives: Sequence[int],
               epsilon: float) -> Tuple[float, Dict[int, np.ndarray]]:
    """Loss of one record and its per-word gradients from cached (F, dF/da, dF/db) entries"""
    grads: Dict[int, np.ndarray] = {}
    f_pos, da, db = fidelities[(target, context)]
    f_pos = min(1.0, max(0.0, f_pos))
    _accumulate(grads, target, -da / (f_pos + epsilon))
    _accumulate(grads, context, -db / (f_pos + epsilon))
    f_negs = []
    for negative in negatives:
        f_neg, da, db = fidelities[(target, negative)]
        f_neg = min(1.0, max(0.0, f_neg))
        f_negs.append(f_neg)
        _accumulate(grads, target, da / (1.0 - f_neg + epsilon))
        _accumulate(grads, negative, db / (1.0 - f_neg + epsilon))
    return sgns_objective(f_pos, f_negs, epsilon), grads


def _memory_term_loss(model: EmbeddingModel, target: int, context: int, negatives: Sequence[int],
                      epsilon: float) -> float:
    state = memory_efficient_state(model, target)[0]
    f_pos = fidelity_exact(state, memory_efficient_state(model, context)[0])
    f_negs = [fidelity_exact(state, memory_efficient_state(model, n)[0]) for n in negatives]
    return sgns_objective(f_pos, f_negs, epsilon)


def sgns_loss(model: EmbeddingModel, target: int, context: int, negatives: Sequence[int],
              method: str = "adjoint", epsilon: float = EMBEDDING_DEFAULTS["sgns_epsilon"]) -> SgnsLossResult:
    """
    Loss of one (target, context, negatives) record with its gradient contributions

    Circuit scheme: per-word gradients from the swap-test circuits.
    Memory scheme: central differences on the shared vector.
    """
    _check_pair(model, target, context, negatives)
    if model.scheme == EmbeddingScheme.MEMORY:
        def term(params: ParameterVector, seed: int) -> float:
            return _memory_term_loss(model.with_flat_params(params.as_array()), target, context, negatives, epsilon)
        shared = ParameterVector(values=model.shared_params)
        return SgnsLossResult(term(shared, 0), {}, finite_diff_grad(term, shared))

    if method not in GRADIENT_METHODS:
        raise ParameterError(f"sgns_loss gradient method must be one of {GRADIENT_METHODS}")
    fidelities = {key: _fidelity_and_grads(model, key[0], key[1], method)
                  for key in [(target, context), *((target, n) for n in negatives)]}
    loss, grads = _pair_term(fidelities, target, context, negatives, epsilon)
    return SgnsLossResult(loss, grads)


def _circuit_loss_fn(model: EmbeddingModel, pairs: List[TrainingPair], config: SgnsConfig):
    keys = sorted({(p.target, p.context) for p in pairs} | {(p.target, n) for p in pairs for n in p.negatives})
    size, width = model.vocabulary.size, model.ansatz.num_params
    epsilon = EMBEDDING_DEFAULTS["sgns_epsilon"]
    analytic = config.gradient_method != "finite_diff"

    def loss(params: ParameterVector, seed: int) -> LossResult:
        current = model.with_flat_params(params.as_array())
        if analytic:
            values = ordered_map(lambda key: _fidelity_and_grads(current, key[0], key[1], config.gradient_method),
                                 keys, config.threads)
        else:
            states = [word_state(current, k) for k in range(size)]
            values = [(fidelity_exact(states[a], states[b]), None, None) for a, b in keys]
        fidelities = dict(zip(keys, values))

        total = 0.0
        grad = np.zeros((size, width))
        for pair in pairs:
            if analytic:
                value, grads = _pair_term(fidelities, pair.target, pair.context, pair.negatives, epsilon)
                for index, g in grads.items():
                    grad[index] += g
            else:
                f_pos = fidelities[(pair.target, pair.context)][0]
                value = sgns_objective(f_pos, [fidelities[(pair.target, n)][0] for n in pair.negatives], epsilon)
            total += value
        count = len(pairs)
        return LossResult(total / count, grad.reshape(-1) / count if analytic else None)

    return loss


def _memory_loss_fn(model: EmbeddingModel, pairs: List[TrainingPair]):
    epsilon = EMBEDDING_DEFAULTS["sgns_epsilon"]

    def loss(params: ParameterVector, seed: int) -> LossResult:
        current = model.with_flat_params(params.as_array())
        states = [memory_efficient_state(current, k)[0] for k in range(current.vocabulary.size)]
        total = 0.0
        for pair in pairs:
            state = states[pair.target]
            f_pos = fidelity_exact(state, states[pair.context])
            total += sgns_objective(f_pos, [fidelity_exact(state, states[n]) for n in pair.negatives], epsilon)
        return LossResult(total / len(pairs))

    return loss


def train_sgns(corpus: Sequence[Sequence[int]], model: EmbeddingModel, config: SgnsConfig,
               reporter: Optional[TraceReporter] = None) -> EmbeddingTrainResult:
    """
    Optimize word angles (circuit scheme) or the shared angles (memory scheme)

    Pairs and negatives are drawn once from config.seed; every epoch is one
    full-batch Adam step over all of them.
    """
    pairs = generate_training_pairs(corpus, config, model.vocabulary.size)
    logger.info("SGNS: %d training records, %s scheme, %d epochs", len(pairs), model.scheme.value, config.epochs)
    if model.scheme == EmbeddingScheme.CIRCUIT:
        loss = _circuit_loss_fn(model, pairs, config)
    else:
        loss = _memory_loss_fn(model, pairs)

    train_config = TrainConfig(epochs=config.epochs, learning_rate=config.learning_rate, seed=config.seed)
    result = train(loss, ParameterVector.of(model.flat_params()), train_config, reporter)
    return EmbeddingTrainResult(model.with_flat_params(result.params.as_array()), result.history)
