"""
Toolkit API Routes
REST endpoints for string encoding, resource estimates and the sequence models
"""

import logging
from typing import Dict, List, Optional

from fastapi import APIRouter, Query
from pydantic import BaseModel, Field

from collectors.corpus_collector import load_alphabet
from config.settings import QPOSTR_CONFIG
from errors import ParameterError
from qpostr.encoder import amplitude_table, build_encoding_circuit, layout_for
from qpostr.readout import reconstruct_text, run_readout
from qpostr.resources import resource_estimate
from seqgen.corpus import builtin_corpus
from seqgen.model import generate, load_checkpoint, perplexity
from seqgen.spec import builtin_spec
from seqgen.trainer import init_checkpoint
from simulator.serialization import dumps_circuit
from simulator.statevector import apply_circuit

logger = logging.getLogger(__name__)

router = APIRouter()

MODULES = ["statevector-core", "diffopt", "qpostr", "embeddings", "seqgen"]


class EncodeRequest(BaseModel):
    text: str
    alphabet: Optional[str] = None


class DecodeRequest(BaseModel):
    text: str
    alphabet: Optional[str] = None
    shots: int = Field(default=QPOSTR_CONFIG["default_shots"], ge=1, le=QPOSTR_CONFIG["max_shots"])
    seed: int = 0


class PerplexityRequest(BaseModel):
    checkpoint: Optional[str] = None
    architecture: str = "uniform"
    split: str = "test"


class GenerateRequest(BaseModel):
    checkpoint: str
    prompt: List[str] = []
    length: int = Field(default=5, ge=0)
    seed: int = 0


@router.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "qnlp-desk API",
        "version": "1.0.0",
        "status": "running"
    }


@router.get("/status")
async def get_system_status() -> Dict:
    """Modules served by this backend"""
    return {
        "system": "operational",
        "modules": MODULES,
        "alphabets": QPOSTR_CONFIG["builtin_alphabets"]
    }


@router.post("/qpostr/encode")
async def encode_text(request: EncodeRequest) -> Dict:
    """
    Build the positional encoding circuit of a string

    Returns:
        Register sizes, the serialized circuit and the non-zero amplitudes
    """
    alphabet = load_alphabet(request.alphabet)
    layout = layout_for(request.text, alphabet)
    circuit = build_encoding_circuit(request.text, alphabet)
    rows = amplitude_table(apply_circuit(circuit), layout, alphabet)
    return {
        "pos_bits": layout.pos_bits,
        "char_bits": layout.char_bits,
        "total_qubits": layout.total_qubits,
        "circuit": dumps_circuit(circuit),
        "amplitudes": [
            {"index": r["index"], "position": r["position"], "char": r["char"],
             "real": float(r["amplitude"].real), "imag": float(r["amplitude"].imag)}
            for r in rows
        ]
    }


@router.post("/qpostr/decode")
async def decode_text(request: DecodeRequest) -> Dict:
    """Sample the readout circuit and rebuild the string"""
    alphabet = load_alphabet(request.alphabet)
    layout, histogram = run_readout(request.text, alphabet, request.shots, request.seed)
    return {
        "shots": request.shots,
        "histogram": {str(p): dict(sorted(counts.items())) for p, counts in histogram.items()},
        "text": reconstruct_text(histogram, layout)
    }


@router.get("/qpostr/resources")
async def get_resources(positions: float = Query(..., ge=1), alphabet_size: float = Query(..., ge=1)) -> Dict:
    """Qubits needed to hold `positions` characters over an alphabet"""
    estimate = resource_estimate(positions, alphabet_size)
    return estimate._asdict()


@router.post("/seq/perplexity")
async def seq_perplexity(request: PerplexityRequest) -> Dict:
    """Perplexity of a checkpoint, or of an untrained architecture, on the builtin corpus"""
    corpus = builtin_corpus()
    if request.checkpoint:
        checkpoint = load_checkpoint(request.checkpoint)
    else:
        checkpoint = init_checkpoint(builtin_spec(request.architecture), corpus.vocabulary)
    sentences = [checkpoint.vocabulary.encode(corpus.vocabulary.decode(s)) for s in corpus.split(request.split)]
    return {
        "architecture": checkpoint.spec.architecture.value,
        "split": request.split,
        "perplexity": perplexity(checkpoint, sentences)
    }


@router.post("/seq/generate")
async def seq_generate(request: GenerateRequest) -> Dict:
    """Generate tokens from a saved checkpoint"""
    checkpoint = load_checkpoint(request.checkpoint)
    if request.length > 1000:
        raise ParameterError("length above 1000")
    prompt = checkpoint.vocabulary.encode([t.lower() for t in request.prompt])
    tokens = generate(checkpoint, prompt, request.length, request.seed)
    logger.info("generated %d tokens from %s", len(tokens), request.checkpoint)
    return {
        "prompt": request.prompt,
        "tokens": checkpoint.vocabulary.decode(tokens)
    }
