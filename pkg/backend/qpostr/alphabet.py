"""
Alphabets for positional string encoding
Code 0 is always the padding character; codes are alphabet ordinals written
in binary on the character register (a=01, b=10, c=11 for " abc").
"""

import string
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import QPOSTR_CONFIG
from errors import DecodeError, EncodingError


class AlphabetMap(BaseModel):
    """Ordered distinct characters; index 0 is padding"""
    model_config = ConfigDict(frozen=True)

    characters: Tuple[str, ...]

    @model_validator(mode="after")
    def _check_characters(self) -> "AlphabetMap":
        if len(self.characters) < 2:
            raise EncodingError("an alphabet needs the padding character and at least one more")
        if any(len(ch) != 1 for ch in self.characters):
            raise EncodingError("alphabet entries must be single characters")
        if len(set(self.characters)) != len(self.characters):
            raise EncodingError("alphabet has duplicate characters")
        return self

    @property
    def size(self) -> int:
        return len(self.characters)

    @property
    def char_bits(self) -> int:
        return (self.size - 1).bit_length()

    @property
    def padding(self) -> str:
        return self.characters[0]

    def code(self, ch: str) -> int:
        try:
            return self.characters.index(ch)
        except ValueError:
            raise EncodingError(f"character {ch!r} is not in the alphabet")

    def codes(self, text: str) -> List[int]:
        return [self.code(ch) for ch in text]

    def char(self, code: int) -> str:
        if not 0 <= code < self.size:
            raise DecodeError(f"code {code} outside alphabet of size {self.size}")
        return self.characters[code]


def alphabet_from_line(line: str) -> AlphabetMap:
    """Characters in code order; a leading padding space is added when missing"""
    line = line.rstrip("\r\n")
    padding = QPOSTR_CONFIG["padding_char"]
    if not line.startswith(padding):
        line = padding + line
    return AlphabetMap(characters=tuple(line))


def builtin_alphabet(name: str) -> AlphabetMap:
    if name == "abc":
        return alphabet_from_line("abc")
    if name == "lowercase":
        return alphabet_from_line(string.ascii_lowercase)
    if name == "ascii":
        # 7-bit mode: code = code point, NUL pads
        return AlphabetMap(characters=tuple(chr(i) for i in range(128)))
    raise EncodingError(f"unknown builtin alphabet {name!r}; choose from {QPOSTR_CONFIG['builtin_alphabets']}")
