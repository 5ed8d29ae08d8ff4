"""
Quantum word-embedding model
- circuit scheme: one parameter vector per word, |w_k> = U(theta_k)|0> on m qubits
- memory scheme: one shared U(theta) on n = max(index_bits, m) qubits applied to
  |k>, ancilla qubits m..n-1 post-selected on |0>
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import EMBEDDING_DEFAULTS
from database.db import load_record, save_record
from embeddings.ansatz import AnsatzSpec, build_ansatz_circuit
from embeddings.vocabulary import Vocabulary
from errors import (
    CheckpointError,
    ImpossibleOutcomeError,
    ParameterError,
    PreparationError,
    QnlpError,
    SchemeError,
)
from simulator.circuit import Circuit, ParameterVector
from simulator.rng import make_rng
from simulator.statevector import StateVector, apply_circuit, basis_state, post_select

logger = logging.getLogger(__name__)

RECORD_KIND = "embedding"
LOW_SUCCESS_WARNING = 0.01


class EmbeddingScheme(str, Enum):
    CIRCUIT = "circuit"
    MEMORY = "memory"


class EmbeddingModel(BaseModel):
    """Vocabulary, ansatz and trained angles"""
    model_config = ConfigDict(frozen=True)

    vocabulary: Vocabulary
    ansatz: AnsatzSpec
    scheme: EmbeddingScheme
    word_params: Optional[Tuple[Tuple[float, ...], ...]] = None
    shared_params: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_params(self) -> "EmbeddingModel":
        if self.scheme == EmbeddingScheme.CIRCUIT:
            if self.word_params is None or self.shared_params is not None:
                raise SchemeError("circuit scheme needs word_params only")
            if len(self.word_params) != self.vocabulary.size:
                raise ParameterError(f"{len(self.word_params)} parameter vectors for {self.vocabulary.size} words")
            for vector in self.word_params:
                if len(vector) != self.ansatz.num_params:
                    raise ParameterError(f"word vector has {len(vector)} angles, ansatz needs {self.ansatz.num_params}")
        else:
            if self.shared_params is None or self.word_params is not None:
                raise SchemeError("memory scheme needs shared_params only")
            if len(self.shared_params) != self.shared_ansatz.num_params:
                raise ParameterError(
                    f"shared vector has {len(self.shared_params)} angles, ansatz needs {self.shared_ansatz.num_params}"
                )
        return self

    @property
    def qubits(self) -> int:
        return self.ansatz.qubits

    @property
    def register_width(self) -> int:
        """n = max(index_bits, m)"""
        return max(self.vocabulary.index_bits, self.ansatz.qubits)

    @property
    def shared_ansatz(self) -> AnsatzSpec:
        return AnsatzSpec(qubits=self.register_width, layers=self.ansatz.layers)

    def flat_params(self) -> np.ndarray:
        if self.scheme == EmbeddingScheme.CIRCUIT:
            return np.array(self.word_params, dtype=float).reshape(-1)
        return np.array(self.shared_params, dtype=float)

    def with_flat_params(self, values: np.ndarray) -> "EmbeddingModel":
        values = np.asarray(values, dtype=float)
        if self.scheme == EmbeddingScheme.CIRCUIT:
            rows = values.reshape(self.vocabulary.size, self.ansatz.num_params)
            return self.model_copy(update={"word_params": tuple(tuple(r.tolist()) for r in rows)})
        return self.model_copy(update={"shared_params": tuple(values.tolist())})


def init_embedding_model(vocabulary: Vocabulary, scheme: EmbeddingScheme = EmbeddingScheme.CIRCUIT,
                         qubits: int = EMBEDDING_DEFAULTS["qubits"], layers: int = EMBEDDING_DEFAULTS["layers"],
                         seed: int = 0, init_range: float = EMBEDDING_DEFAULTS["init_range"]) -> EmbeddingModel:
    """Angles drawn uniformly from (-init_range, init_range)"""
    scheme = EmbeddingScheme(scheme)
    ansatz = AnsatzSpec(qubits=qubits, layers=layers)
    rng = make_rng(seed)
    if scheme == EmbeddingScheme.CIRCUIT:
        values = rng.uniform(-init_range, init_range, size=(vocabulary.size, ansatz.num_params))
        return EmbeddingModel(vocabulary=vocabulary, ansatz=ansatz, scheme=scheme,
                              word_params=tuple(tuple(row.tolist()) for row in values))
    width = max(vocabulary.index_bits, qubits)
    values = rng.uniform(-init_range, init_range, size=AnsatzSpec(qubits=width, layers=layers).num_params)
    return EmbeddingModel(vocabulary=vocabulary, ansatz=ansatz, scheme=scheme, shared_params=tuple(values.tolist()))


def _require_scheme(model: EmbeddingModel, scheme: EmbeddingScheme, operation: str) -> None:
    if model.scheme != scheme:
        raise SchemeError(f"{operation} needs the {scheme.value} scheme, model uses {model.scheme.value}")


def word_params(model: EmbeddingModel, word_index: int) -> ParameterVector:
    _require_scheme(model, EmbeddingScheme.CIRCUIT, "word_params")
    model.vocabulary.check_index(word_index)
    return ParameterVector(values=model.word_params[word_index])


def word_state_circuit(model: EmbeddingModel, word_index: int) -> Circuit:
    """Parameter-free circuit of width m preparing U(theta_k)|0>"""
    return build_ansatz_circuit(model.ansatz).freeze(word_params(model, word_index))


def memory_efficient_state(model: EmbeddingModel, word_index: int) -> Tuple[StateVector, float]:
    """
    Prepare |k>, apply the shared U, keep the branch where every ancilla is |0>

    Returns:
        (m-qubit state, post-selection success probability)
    """
    _require_scheme(model, EmbeddingScheme.MEMORY, "memory_efficient_state")
    model.vocabulary.check_index(word_index)
    width, m = model.register_width, model.qubits
    circuit = build_ansatz_circuit(model.shared_ansatz)
    state = apply_circuit(circuit, ParameterVector(values=model.shared_params), basis_state(width, word_index))

    success = 1.0
    try:
        for ancilla in range(m, width):
            state, probability = post_select(state, ancilla, 0)
            success *= probability
    except ImpossibleOutcomeError as exc:
        raise PreparationError(f"word {word_index}: {exc}")
    if success < EMBEDDING_DEFAULTS["min_success_probability"]:
        raise PreparationError(f"word {word_index}: post-selection success probability {success:.3e}")
    if success < LOW_SUCCESS_WARNING:
        logger.warning("word %d prepared with low success probability %.3e", word_index, success)
    return StateVector(state.amps[:1 << m]), success


def word_state(model: EmbeddingModel, word_index: int) -> StateVector:
    """m-qubit word state under either scheme"""
    if model.scheme == EmbeddingScheme.CIRCUIT:
        return apply_circuit(word_state_circuit(model, word_index))
    return memory_efficient_state(model, word_index)[0]


def save_embedding(model: EmbeddingModel, path: str) -> str:
    payload: Dict = {
        "scheme": model.scheme.value,
        "qubits": model.ansatz.qubits,
        "layers": model.ansatz.layers,
        "vocabulary": list(model.vocabulary.tokens),
    }
    if model.scheme == EmbeddingScheme.CIRCUIT:
        payload["word_params"] = {token: list(vector) for token, vector in zip(model.vocabulary.tokens,
                                                                              model.word_params)}
    else:
        payload["shared_params"] = list(model.shared_params)
    return save_record(path, RECORD_KIND, payload)


def load_embedding(path: str) -> EmbeddingModel:
    payload = load_record(path, RECORD_KIND)
    try:
        vocabulary = Vocabulary(tokens=tuple(payload["vocabulary"]))
        ansatz = AnsatzSpec(qubits=payload["qubits"], layers=payload["layers"])
        scheme = EmbeddingScheme(payload["scheme"])
        if scheme == EmbeddingScheme.CIRCUIT:
            vectors: List[Tuple[float, ...]] = [tuple(payload["word_params"][t]) for t in vocabulary.tokens]
            return EmbeddingModel(vocabulary=vocabulary, ansatz=ansatz, scheme=scheme, word_params=tuple(vectors))
        return EmbeddingModel(vocabulary=vocabulary, ansatz=ansatz, scheme=scheme,
                              shared_params=tuple(payload["shared_params"]))
    except (KeyError, TypeError, ValueError, QnlpError) as exc:
        raise CheckpointError(f"{path}: malformed embedding record ({exc})")
