"""
Sequence model evaluation
- next_token_distribution: exact output-register marginal, renormalized over the vocabulary
- nll_loss / perplexity: mean -ln p_tilde(next | context) over a split
- classify: P(readout = 1) for the london-baseline classification mode
- sample_next_tokens / generate: single-shot sampling with reject-and-redraw
"""

import logging
import math
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.settings import OPTIMIZER_DEFAULTS, SEQGEN_DEFAULTS
from database.db import load_record, save_record
from diffopt.gradients import LossResult, probability_objective_grad
from embeddings.heads import renormalize
from embeddings.vocabulary import Vocabulary
from errors import CheckpointError, CorpusError, DegenerateOutputError, ParameterError, QnlpError, SpecError
from seqgen.circuits import build_seq_circuit
from seqgen.corpus import PAD_ID, next_token_pairs
from seqgen.spec import Architecture, SeqModelSpec, count_parameters
from simulator.circuit import ParameterVector
from simulator.rng import derive_seed, make_rng, ordered_map
from simulator.statevector import apply_circuit, probabilities, register_values, sample

logger = logging.getLogger(__name__)

RECORD_KIND = "seq-checkpoint"

Context = Tuple[int, ...]


class SeqTrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=SEQGEN_DEFAULTS["epochs"], ge=0)
    learning_rate: float = Field(default=OPTIMIZER_DEFAULTS["learning_rate"], gt=0)
    seed: int = 0
    init_range: float = Field(default=SEQGEN_DEFAULTS["init_range"], ge=0)
    gradient_method: str = Field(default="adjoint", pattern="^(adjoint|parameter_shift|finite_diff)$")
    # estimate the output distribution from this many shots instead of exact probabilities
    shots: Optional[int] = Field(default=None, ge=1)
    threads: Optional[int] = None


class Checkpoint(BaseModel):
    """Everything needed to evaluate or resume a trained sequence model"""
    model_config = ConfigDict(frozen=True)

    spec: SeqModelSpec
    params: ParameterVector
    vocabulary: Vocabulary
    config: SeqTrainConfig = SeqTrainConfig()

    @model_validator(mode="after")
    def _check_shapes(self) -> "Checkpoint":
        expected = count_parameters(self.spec)
        if len(self.params) != expected:
            raise ParameterError(f"{self.spec.architecture.value} needs {expected} parameters, got {len(self.params)}")
        if self.spec.output_width < self.vocabulary.index_bits:
            raise SpecError(f"{self.spec.output_width} output qubits cannot hold {self.vocabulary.size} tokens")
        return self

    @property
    def is_uniform(self) -> bool:
        return self.spec.architecture == Architecture.UNIFORM


def check_context(checkpoint: Checkpoint, context: Sequence[int]) -> Context:
    context = tuple(int(t) for t in context)
    if len(context) != checkpoint.spec.context_length:
        raise SpecError(f"context of {len(context)} tokens, model expects {checkpoint.spec.context_length}")
    for token in context:
        checkpoint.vocabulary.check_index(token)
    return context


def window(checkpoint: Checkpoint, tokens: Sequence[int]) -> Context:
    """Last context_length tokens, left-padded with the boundary token"""
    length = checkpoint.spec.context_length
    return check_context(checkpoint, ([PAD_ID] * length + list(tokens))[-length:])


def _full_probabilities(checkpoint: Checkpoint, context: Context) -> np.ndarray:
    circuit = build_seq_circuit(checkpoint.spec, context)
    return probabilities(apply_circuit(circuit, checkpoint.params))


def output_marginal(checkpoint: Checkpoint, context: Sequence[int]) -> np.ndarray:
    """Raw Born distribution of the output register (all 2^width outcomes)"""
    context = check_context(checkpoint, context)
    width = checkpoint.spec.output_width
    if checkpoint.is_uniform:
        marginal = np.zeros(1 << width)
        marginal[:checkpoint.vocabulary.size] = 1.0 / checkpoint.vocabulary.size
        return marginal
    values = register_values(checkpoint.spec.total_qubits, checkpoint.spec.output_qubits)
    return np.bincount(values, weights=_full_probabilities(checkpoint, context), minlength=1 << width)


def next_token_distribution(checkpoint: Checkpoint, context: Sequence[int]) -> np.ndarray:
    """p_tilde(k | context) for k < N"""
    return renormalize(output_marginal(checkpoint, context), checkpoint.vocabulary.size)[0]


def group_pairs(sentences: Sequence[Sequence[int]], context_length: int) -> Tuple[List[Tuple[Context, Counter]], int]:
    """(context, next-token counts) in sorted context order, plus the pair count"""
    pairs = next_token_pairs(sentences, context_length)
    if not pairs:
        raise CorpusError("split yields no (context, next token) pairs")
    groups: Dict[Context, Counter] = {}
    for context, target in pairs:
        groups.setdefault(context, Counter())[target] += 1
    return sorted(groups.items()), len(pairs)


def marginal_nll(marginal: np.ndarray, vocab_size: int, targets: Counter,
                 floor: float = SEQGEN_DEFAULTS["probability_floor"]) -> Tuple[float, np.ndarray]:
    """Summed -ln max(p_tilde(t), floor) over the targets of one context, with d/d(marginal)"""
    mass = float(np.sum(marginal[:vocab_size]))
    if mass < SEQGEN_DEFAULTS["min_vocab_mass"]:
        raise DegenerateOutputError(f"in-vocabulary probability mass {mass:.3e}")
    total = 0.0
    d_marginal = np.zeros_like(marginal)
    for target, count in sorted(targets.items()):
        p_target = marginal[target] / mass
        if p_target < floor:
            total -= count * math.log(floor)
            continue
        total -= count * math.log(p_target)
        d_marginal[target] -= count / marginal[target]
        d_marginal[:vocab_size] += count / mass
    return total, d_marginal


def context_objective(values: np.ndarray, output_width: int, vocab_size: int, targets: Counter):
    """marginal_nll as a ProbabilityObjective over the full register; values[i] is the output value of index i"""
    def objective(probs: np.ndarray) -> Tuple[float, np.ndarray]:
        marginal = np.bincount(values, weights=probs, minlength=1 << output_width)
        total, d_marginal = marginal_nll(marginal, vocab_size, targets)
        return total, d_marginal[values]
    return objective


def _estimated_marginal(spec: SeqModelSpec, params: ParameterVector, context: Context, shots: int,
                        seed: int) -> np.ndarray:
    state = apply_circuit(build_seq_circuit(spec, context), params)
    outcomes = register_values(spec.total_qubits, spec.output_qubits)[sample(state, shots, seed)]
    return np.bincount(outcomes, minlength=1 << spec.output_width) / shots


def nll_loss_fn(spec: SeqModelSpec, vocab_size: int, sentences: Sequence[Sequence[int]],
                method: str = "adjoint", shots: Optional[int] = None, threads: Optional[int] = None):
    """
    LossFn over the model parameters: mean NLL of every (context, next token) pair

    Contexts are evaluated concurrently and reduced in sorted order. With
    shots the output distribution is estimated by sampling and the loss
    carries no gradient; otherwise the gradient comes from the adjoint sweep
    or the shift rule.
    """
    groups, count = group_pairs(sentences, spec.context_length)
    values = register_values(spec.total_qubits, spec.output_qubits)
    analytic = shots is None and method != "finite_diff"

    def loss(params: ParameterVector, seed: int) -> LossResult:
        def evaluate(job):
            number, (context, targets) = job
            if shots is not None:
                marginal = _estimated_marginal(spec, params, context, shots, derive_seed(seed, number))
                return marginal_nll(marginal, vocab_size, targets)[0], None
            circuit = build_seq_circuit(spec, context)
            objective = context_objective(values, spec.output_width, vocab_size, targets)
            if not analytic:
                return objective(probabilities(apply_circuit(circuit, params)))[0], None
            return probability_objective_grad(circuit, params, objective, method)

        results = ordered_map(evaluate, list(enumerate(groups)), threads)
        total = sum(value for value, _ in results)
        if not analytic:
            return LossResult(total / count)
        grad = np.zeros(len(params))
        for _, g in results:
            grad += g
        return LossResult(total / count, grad / count)

    return loss


def nll_loss(checkpoint: Checkpoint, sentences: Sequence[Sequence[int]]) -> float:
    """Mean -ln max(p_tilde(next | context), floor) over a split; short contexts are left-padded with 0"""
    groups, count = group_pairs(sentences, checkpoint.spec.context_length)
    total = 0.0
    for context, targets in groups:
        total += marginal_nll(output_marginal(checkpoint, context), checkpoint.vocabulary.size, targets)[0]
    return total / count


def nll_loss_and_grad(checkpoint: Checkpoint, sentences: Sequence[Sequence[int]],
                      method: str = "adjoint") -> Tuple[float, np.ndarray]:
    """Exact loss with its gradient with respect to checkpoint.params"""
    if checkpoint.is_uniform:
        return nll_loss(checkpoint, sentences), np.zeros(0)
    fn = nll_loss_fn(checkpoint.spec, checkpoint.vocabulary.size, sentences, method)
    result = fn(checkpoint.params, 0)
    return result.loss, result.grad


def perplexity(checkpoint: Checkpoint, sentences: Sequence[Sequence[int]]) -> float:
    return math.exp(nll_loss(checkpoint, sentences))


def classify(checkpoint: Checkpoint, sequence: Sequence[int]) -> float:
    """P(readout qubit = 1) after reading the last context_length tokens of the sequence"""
    qubit = checkpoint.spec.readout_qubit
    if qubit is None:
        raise SpecError(f"{checkpoint.spec.architecture.value} has no classification readout")
    probs = _full_probabilities(checkpoint, window(checkpoint, sequence))
    bits = (np.arange(probs.size) >> qubit) & 1
    return float(np.sum(probs[bits == 1]))


def _draw_tokens(marginal: np.ndarray, vocab_size: int, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Single-shot outcomes of the output register; outcomes >= vocab_size are redrawn"""
    if float(np.sum(marginal[:vocab_size])) < SEQGEN_DEFAULTS["min_vocab_mass"]:
        raise DegenerateOutputError("output register never lands in the vocabulary")
    probs = marginal / marginal.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    rounds = 0
    rejected = draws >= vocab_size
    while rejected.any():
        rounds += 1
        if rounds > SEQGEN_DEFAULTS["max_rejections"]:
            raise DegenerateOutputError(f"{rounds - 1} consecutive out-of-vocabulary samples")
        draws[rejected] = rng.choice(probs.size, size=int(rejected.sum()), p=probs)
        rejected = draws >= vocab_size
    if rounds:
        logger.debug("redrew out-of-vocabulary samples for %d rounds", rounds)
    return draws


def sample_next_tokens(checkpoint: Checkpoint, context: Sequence[int], shots: int, seed: int) -> np.ndarray:
    """`shots` independent next-token draws for one context"""
    if shots < 1:
        raise ParameterError("shots must be >= 1")
    marginal = output_marginal(checkpoint, context)
    return _draw_tokens(marginal, checkpoint.vocabulary.size, shots, make_rng(seed))


def generate(checkpoint: Checkpoint, prompt: Sequence[int], length: int, seed: int) -> List[int]:
    """
    Autoregressive generation; returns the `length` new tokens

    Each step measures the output register once; the emitted token slides
    into the context window.
    """
    if length < 0:
        raise ParameterError("length must be >= 0")
    history = [checkpoint.vocabulary.check_index(int(t)) for t in prompt]
    rng = make_rng(seed)
    cache: Dict[Context, np.ndarray] = {}
    generated: List[int] = []
    for _ in range(length):
        context = window(checkpoint, history)
        if context not in cache:
            cache[context] = output_marginal(checkpoint, context)
        token = int(_draw_tokens(cache[context], checkpoint.vocabulary.size, 1, rng)[0])
        generated.append(token)
        history.append(token)
    return generated


def save_checkpoint(checkpoint: Checkpoint, path: str) -> str:
    return save_record(path, RECORD_KIND, checkpoint.model_dump(mode="json"))


def load_checkpoint(path: str) -> Checkpoint:
    payload = load_record(path, RECORD_KIND)
    try:
        return Checkpoint.model_validate(payload)
    except (ValidationError, QnlpError) as exc:
        raise CheckpointError(f"{path}: malformed sequence checkpoint ({exc})")
