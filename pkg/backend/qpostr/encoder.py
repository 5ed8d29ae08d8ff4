"""
Positional string encoding
Position register = qubits 0..n-1, character register = qubits n..n+m-1.
Basis index of (position p, character code c) is p + (c << n).
"""

import math
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import EncodingError
from qpostr.alphabet import AlphabetMap
from simulator.circuit import Circuit, CircuitBuilder
from simulator.statevector import StateVector, nonzero_amplitudes


class QpostrLayout(BaseModel):
    """Register split for a text of length text_length"""
    model_config = ConfigDict(frozen=True)

    pos_bits: int = Field(ge=1)
    char_bits: int = Field(ge=1)
    text_length: int = Field(ge=0)

    @model_validator(mode="after")
    def _check_capacity(self) -> "QpostrLayout":
        if self.text_length > 1 << self.pos_bits:
            raise EncodingError(f"{self.pos_bits} position qubits hold at most {1 << self.pos_bits} characters")
        return self

    @property
    def positions(self) -> int:
        return 1 << self.pos_bits

    @property
    def position_qubits(self) -> Tuple[int, ...]:
        return tuple(range(self.pos_bits))

    @property
    def char_qubits(self) -> Tuple[int, ...]:
        return tuple(range(self.pos_bits, self.pos_bits + self.char_bits))

    @property
    def total_qubits(self) -> int:
        return self.pos_bits + self.char_bits


class ReadoutLayout(QpostrLayout):
    """QpostrLayout plus an m-qubit output register after the character register"""

    @classmethod
    def from_layout(cls, layout: QpostrLayout) -> "ReadoutLayout":
        return cls(**layout.model_dump())

    @property
    def output_qubits(self) -> Tuple[int, ...]:
        start = self.pos_bits + self.char_bits
        return tuple(range(start, start + self.char_bits))

    @property
    def total_qubits(self) -> int:
        return self.pos_bits + 2 * self.char_bits


def position_bits(text_length: int) -> int:
    """n = ceil(log2(max(L, 2))), so even a one-character string gets a position qubit"""
    return (max(text_length, 2) - 1).bit_length()


def layout_for(text: str, alphabet: AlphabetMap) -> QpostrLayout:
    alphabet.codes(text)
    return QpostrLayout(pos_bits=position_bits(len(text)), char_bits=alphabet.char_bits, text_length=len(text))


def position_controls(position: int, pos_bits: int) -> List[Tuple[int, int]]:
    """Controls matching a position: CLOSED where the bit is 1, OPEN where it is 0"""
    return [(bit, (position >> bit) & 1) for bit in range(pos_bits)]


def build_encoding_circuit(text: str, alphabet: AlphabetMap) -> Circuit:
    """
    Hadamard layer on the position register, then one multi-controlled X
    block per non-padding character
    """
    layout = layout_for(text, alphabet)
    builder = CircuitBuilder(layout.total_qubits)
    for qubit in layout.position_qubits:
        builder.h(qubit)
    for position, code in enumerate(alphabet.codes(text)):
        controls = position_controls(position, layout.pos_bits)
        for bit in range(layout.char_bits):
            if (code >> bit) & 1:
                builder.mcx(controls, layout.char_qubits[bit])
    return builder.build()


def padded_codes(text: str, alphabet: AlphabetMap, layout: QpostrLayout) -> List[int]:
    codes = alphabet.codes(text)
    return codes + [0] * (layout.positions - len(codes))


def expected_state(text: str, alphabet: AlphabetMap) -> StateVector:
    """Analytic 2^{-n/2} sum_p |p>_P |c_p>_C, built without the simulator"""
    layout = layout_for(text, alphabet)
    amps = np.zeros(1 << layout.total_qubits, dtype=np.complex128)
    amplitude = 1.0 / math.sqrt(layout.positions)
    for position, code in enumerate(padded_codes(text, alphabet, layout)):
        amps[position + (code << layout.pos_bits)] = amplitude
    return StateVector(amps)


def amplitude_table(state: StateVector, layout: QpostrLayout, alphabet: AlphabetMap) -> List[Dict]:
    """Non-zero amplitudes as (index, position, character) rows"""
    rows = []
    pos_mask = (1 << layout.pos_bits) - 1
    char_mask = (1 << layout.char_bits) - 1
    for index, amplitude in nonzero_amplitudes(state):
        code = (index >> layout.pos_bits) & char_mask
        rows.append({
            "index": index,
            "position": index & pos_mask,
            "char": alphabet.char(code) if code < alphabet.size else None,
            "amplitude": amplitude,
        })
    return rows
