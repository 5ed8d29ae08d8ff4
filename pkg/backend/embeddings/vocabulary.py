"""
Token vocabulary shared by the embedding and sequence models
"""

from typing import Iterable, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from errors import VocabularyError


class Vocabulary(BaseModel):
    """Ordered unique tokens; index_bits = ceil(log2 N)"""
    model_config = ConfigDict(frozen=True)

    tokens: Tuple[str, ...]

    @model_validator(mode="after")
    def _check_tokens(self) -> "Vocabulary":
        if len(self.tokens) < 2:
            raise VocabularyError(f"vocabulary needs at least 2 tokens, got {len(self.tokens)}")
        if len(set(self.tokens)) != len(self.tokens):
            raise VocabularyError("vocabulary has duplicate tokens")
        return self

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]], first: Sequence[str] = ()) -> "Vocabulary":
        """Tokens in order of first appearance, after any forced leading tokens"""
        seen = dict.fromkeys(first)
        for sentence in sentences:
            for token in sentence:
                seen.setdefault(token, None)
        return cls(tokens=tuple(seen))

    @property
    def size(self) -> int:
        return len(self.tokens)

    @property
    def index_bits(self) -> int:
        return (self.size - 1).bit_length()

    def index(self, token: str) -> int:
        try:
            return self.tokens.index(token)
        except ValueError:
            raise VocabularyError(f"unknown token {token!r}")

    def token(self, index: int) -> str:
        self.check_index(index)
        return self.tokens[index]

    def check_index(self, index: int) -> int:
        if not 0 <= index < self.size:
            raise VocabularyError(f"token id {index} outside vocabulary of size {self.size}")
        return index

    def encode(self, sentence: Sequence[str]) -> List[int]:
        return [self.index(token) for token in sentence]

    def decode(self, ids: Sequence[int]) -> List[str]:
        return [self.token(i) for i in ids]
