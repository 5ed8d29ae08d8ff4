"""
QPOSTR readout and decoding
The readout circuit copies the character register into an output register,
one multi-controlled X per (position, character bit).
"""

import logging
from collections import Counter
from typing import Dict, Iterable, Tuple

from errors import DecodeError
from qpostr.alphabet import AlphabetMap
from qpostr.encoder import ReadoutLayout, build_encoding_circuit, layout_for, position_controls
from simulator.circuit import Circuit, CircuitBuilder
from simulator.statevector import apply_circuit, sample, sample_batched

logger = logging.getLogger(__name__)


def readout_layout(text: str, alphabet: AlphabetMap) -> ReadoutLayout:
    return ReadoutLayout.from_layout(layout_for(text, alphabet))


def build_readout_circuit(text: str, alphabet: AlphabetMap) -> Circuit:
    layout = readout_layout(text, alphabet)
    encoding = build_encoding_circuit(text, alphabet)
    qubit_map = list(range(encoding.width))
    builder = CircuitBuilder(layout.total_qubits)
    builder.extend(encoding.relabel(qubit_map, layout.total_qubits))
    for position in range(layout.positions):
        controls = position_controls(position, layout.pos_bits)
        for bit in range(layout.char_bits):
            builder.mcx(controls + [(layout.char_qubits[bit], 1)], layout.output_qubits[bit])
    return builder.build()


def decode_samples(samples: Iterable[int], layout: ReadoutLayout,
                   alphabet: AlphabetMap) -> Dict[int, Counter]:
    """
    Per-position character histograms

    Raises:
        DecodeError: index outside the register, output register differing
            from the character register, unknown code, or two different
            characters seen at one position
    """
    pos_mask = (1 << layout.pos_bits) - 1
    char_mask = (1 << layout.char_bits) - 1
    limit = 1 << layout.total_qubits
    histogram: Dict[int, Counter] = {}

    for raw in samples:
        index = int(raw)
        if not 0 <= index < limit:
            raise DecodeError(f"basis index {index} outside a {layout.total_qubits}-qubit register")
        position = index & pos_mask
        code = (index >> layout.pos_bits) & char_mask
        output = (index >> (layout.pos_bits + layout.char_bits)) & char_mask
        if output != code:
            raise DecodeError(f"index {index}: output register {output} != character register {code}")
        ch = alphabet.char(code)
        counts = histogram.setdefault(position, Counter())
        if counts and ch not in counts:
            raise DecodeError(f"position {position} decoded to both {next(iter(counts))!r} and {ch!r}")
        counts[ch] += 1

    return dict(sorted(histogram.items()))


def reconstruct_text(histogram: Dict[int, Counter], layout: ReadoutLayout) -> str:
    """The padded input string; every position must have been observed"""
    missing = [p for p in range(layout.positions) if not histogram.get(p)]
    if missing:
        raise DecodeError(f"positions {missing} never observed; sample more shots")
    return "".join(histogram[p].most_common(1)[0][0] for p in range(layout.positions))


def run_readout(text: str, alphabet: AlphabetMap, shots: int, seed: int,
                batches: int = 1) -> Tuple[ReadoutLayout, Dict[int, Counter]]:
    """Build, simulate, sample and decode in one call"""
    layout = readout_layout(text, alphabet)
    state = apply_circuit(build_readout_circuit(text, alphabet))
    if batches > 1:
        samples = sample_batched(state, shots, seed, batches)
    else:
        samples = sample(state, shots, seed)
    histogram = decode_samples(samples, layout, alphabet)
    logger.info("decoded %d shots over %d/%d positions", shots, len(histogram), layout.positions)
    return layout, histogram
