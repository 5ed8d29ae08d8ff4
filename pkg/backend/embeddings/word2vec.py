"""
Quantum Skip-gram and CBOW
Both train the word angles and the head V(phi) jointly on the negative
log-likelihood of the vocabulary-renormalized head distribution.
Skip-gram predicts each context word from the centre word; CBOW predicts the
centre word from the average of its context words' angles.
"""

import logging
from collections import Counter
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import EMBEDDING_DEFAULTS, OPTIMIZER_DEFAULTS, SEQGEN_DEFAULTS
from diffopt.gradients import LossResult, probability_objective_grad
from diffopt.trainer import TrainConfig, train
from embeddings.ansatz import AnsatzSpec, build_ansatz_circuit
from embeddings.heads import head_ansatz, head_distribution, head_layers, nll_objective
from embeddings.model import EmbeddingModel, EmbeddingScheme
from errors import CorpusError, SchemeError
from reports.trace_reporter import TraceReporter
from simulator.circuit import Circuit, ParameterVector
from simulator.rng import make_rng, ordered_map
from simulator.statevector import apply_circuit

logger = logging.getLogger(__name__)

# (input word ids, target id); inputs hold one word for Skip-gram, the context for CBOW
Example = Tuple[Tuple[int, ...], int]


class Word2VecConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    window: int = Field(default=EMBEDDING_DEFAULTS["window"], ge=1)
    epochs: int = Field(default=EMBEDDING_DEFAULTS["epochs"], ge=0)
    learning_rate: float = Field(default=OPTIMIZER_DEFAULTS["learning_rate"], gt=0)
    seed: int = 0
    gradient_method: str = Field(default="adjoint", pattern="^(adjoint|parameter_shift)$")
    threads: Optional[int] = None


class HeadTrainResult(NamedTuple):
    model: EmbeddingModel
    head_params: ParameterVector
    history: List[float]


def init_head_params(model: EmbeddingModel, layers: int = EMBEDDING_DEFAULTS["head_layers"], seed: int = 0,
                     init_range: float = EMBEDDING_DEFAULTS["init_range"]) -> ParameterVector:
    count = head_ansatz(model, layers).num_params
    return ParameterVector.of(make_rng(seed).uniform(-init_range, init_range, size=count))


def skipgram_examples(corpus: Sequence[Sequence[int]], window: int) -> List[Example]:
    examples = []
    for sentence in corpus:
        for i, center in enumerate(sentence):
            for j in range(max(0, i - window), min(len(sentence), i + window + 1)):
                if j != i:
                    examples.append(((center,), sentence[j]))
    return examples


def cbow_examples(corpus: Sequence[Sequence[int]], window: int) -> List[Example]:
    examples = []
    for sentence in corpus:
        for i, center in enumerate(sentence):
            context = tuple(sentence[j] for j in range(max(0, i - window), min(len(sentence), i + window + 1))
                            if j != i)
            if context:
                examples.append((context, center))
    return examples


@lru_cache(maxsize=16)
def prediction_circuit(ansatz: AnsatzSpec, width: int, layers: int) -> Circuit:
    """Word ansatz (params "w:") on the low qubits followed by the head (params "head:")"""
    word = build_ansatz_circuit(ansatz, prefix="w:").relabel(list(range(ansatz.qubits)), width)
    head = build_ansatz_circuit(AnsatzSpec(qubits=width, layers=layers), prefix="head:")
    return word.compose(head)


def pooled_angles(model: EmbeddingModel, inputs: Sequence[int]) -> np.ndarray:
    """Average of the input words' angles (a single input is returned as is)"""
    rows = np.array([model.word_params[model.vocabulary.check_index(i)] for i in inputs], dtype=float)
    return rows.mean(axis=0)


def predict_distribution(model: EmbeddingModel, head_params: ParameterVector, inputs: Sequence[int]) -> np.ndarray:
    """p_tilde(k | pooled inputs) over the vocabulary"""
    if model.scheme != EmbeddingScheme.CIRCUIT:
        raise SchemeError("prediction heads train the circuit scheme")
    word = build_ansatz_circuit(model.ansatz)
    state = apply_circuit(word, ParameterVector.of(pooled_angles(model, inputs)))
    return head_distribution(model, head_params, state)


def _group(examples: Sequence[Example]) -> List[Tuple[Tuple[int, ...], Counter]]:
    groups: Dict[Tuple[int, ...], Counter] = {}
    for inputs, target in examples:
        groups.setdefault(inputs, Counter())[target] += 1
    return sorted(groups.items())


def _grouped_objective(vocab_size: int, targets: Counter):
    parts = [(count, nll_objective(vocab_size, target)) for target, count in sorted(targets.items())]

    def objective(probs: np.ndarray):
        total, cotangent = 0.0, np.zeros_like(probs)
        for count, part in parts:
            value, grad = part(probs)
            total += count * value
            cotangent += count * grad
        return total, cotangent
    return objective


def example_loss(model: EmbeddingModel, head_params: ParameterVector, inputs: Sequence[int], target: int) -> float:
    """-ln max(p_tilde(target | inputs), floor)"""
    probs = predict_distribution(model, head_params, inputs)
    return float(-np.log(max(probs[model.vocabulary.check_index(target)], SEQGEN_DEFAULTS["probability_floor"])))


def _head_loss_fn(model: EmbeddingModel, examples: Sequence[Example], layers: int, config: Word2VecConfig):
    size, per_word = model.vocabulary.size, model.ansatz.num_params
    word_count = size * per_word
    circuit = prediction_circuit(model.ansatz, model.register_width, layers)
    groups = _group(examples)

    def loss(params: ParameterVector, seed: int) -> LossResult:
        values = params.as_array()
        words = values[:word_count].reshape(size, per_word)
        head = values[word_count:]

        def evaluate(group):
            inputs, targets = group
            pooled = words[list(inputs)].mean(axis=0)
            bound = ParameterVector.of(np.concatenate([pooled, head]))
            return probability_objective_grad(circuit, bound, _grouped_objective(size, targets),
                                              config.gradient_method)

        results = ordered_map(evaluate, groups, config.threads)
        total = 0.0
        grad_words = np.zeros((size, per_word))
        grad_head = np.zeros(head.size)
        for (inputs, _), (value, grad) in zip(groups, results):
            total += value
            for index in inputs:
                grad_words[index] += grad[:per_word] / len(inputs)
            grad_head += grad[per_word:]
        count = len(examples)
        return LossResult(total / count, np.concatenate([grad_words.reshape(-1), grad_head]) / count)

    return loss


def _train_head(examples: List[Example], model: EmbeddingModel, head_params: ParameterVector,
                config: Word2VecConfig, reporter: Optional[TraceReporter], mode: str) -> HeadTrainResult:
    if model.scheme != EmbeddingScheme.CIRCUIT:
        raise SchemeError(f"{mode} trains per-word angles and needs the circuit scheme")
    if not examples:
        raise CorpusError(f"corpus yields no {mode} examples")
    layers = head_layers(model, head_params)

    logger.info("%s: %d examples, %d epochs", mode, len(examples), config.epochs)
    loss = _head_loss_fn(model, examples, layers, config)
    init = ParameterVector.of(np.concatenate([model.flat_params(), head_params.as_array()]))
    train_config = TrainConfig(epochs=config.epochs, learning_rate=config.learning_rate, seed=config.seed)
    result = train(loss, init, train_config, reporter)

    values = result.params.as_array()
    word_count = model.vocabulary.size * model.ansatz.num_params
    return HeadTrainResult(model.with_flat_params(values[:word_count]),
                           ParameterVector.of(values[word_count:]), result.history)


def train_skipgram(corpus: Sequence[Sequence[int]], model: EmbeddingModel, head_params: ParameterVector,
                   config: Word2VecConfig, reporter: Optional[TraceReporter] = None) -> HeadTrainResult:
    return _train_head(skipgram_examples(corpus, config.window), model, head_params, config, reporter, "skip-gram")


def train_cbow(corpus: Sequence[Sequence[int]], model: EmbeddingModel, head_params: ParameterVector,
               config: Word2VecConfig, reporter: Optional[TraceReporter] = None) -> HeadTrainResult:
    return _train_head(cbow_examples(corpus, config.window), model, head_params, config, reporter, "cbow")
