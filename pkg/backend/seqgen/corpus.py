"""
Sentence corpora for the sequence generator
Token 0 is the boundary token "."; it ends every sentence and left-pads
short contexts.
"""

from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import SEQGEN_DEFAULTS
from embeddings.vocabulary import Vocabulary
from errors import CorpusError, VocabularyError

BOUNDARY = SEQGEN_DEFAULTS["boundary_token"]
PAD_ID = SEQGEN_DEFAULTS["pad_token_id"]

BUILTIN_TRAIN = (
    "the cat chases a mouse .",
    "the dog chases the cat .",
    "a bird sees the fish .",
    "the cat likes a fish .",
    "a dog sees a bird .",
)
BUILTIN_TEST = (
    "the dog sees the fish .",
    "a dog chases a mouse .",
)


class SeqCorpus(BaseModel):
    """Vocabulary plus disjoint train/test splits of token-id sentences"""
    model_config = ConfigDict(frozen=True)

    vocabulary: Vocabulary
    train: Tuple[Tuple[int, ...], ...]
    test: Tuple[Tuple[int, ...], ...] = ()

    @model_validator(mode="after")
    def _check_ids(self) -> "SeqCorpus":
        if not self.train:
            raise CorpusError("corpus has no training sentences")
        if self.vocabulary.tokens[PAD_ID] != BOUNDARY:
            raise VocabularyError(f"token {PAD_ID} must be the boundary token {BOUNDARY!r}")
        for sentence in self.train + self.test:
            for token in sentence:
                self.vocabulary.check_index(token)
        return self

    def split(self, name: str) -> Tuple[Tuple[int, ...], ...]:
        if name == "train":
            return self.train
        if name == "test":
            return self.test
        raise CorpusError(f"unknown split {name!r}; use train or test")


def normalize_sentence(tokens: Sequence[str]) -> List[str]:
    """Lowercase tokens, ending with the boundary token"""
    words = [t.lower() for t in tokens]
    if not words or words[-1] != BOUNDARY:
        words.append(BOUNDARY)
    return words


def corpus_from_sentences(train: Sequence[Sequence[str]], test: Sequence[Sequence[str]] = (),
                          test_size: int = SEQGEN_DEFAULTS["test_sentences"]) -> SeqCorpus:
    """
    Build a corpus; without an explicit test split the last `test_size`
    sentences are held out. The vocabulary comes from the train split.
    """
    train = [normalize_sentence(s) for s in train if s]
    test = [normalize_sentence(s) for s in test if s]
    if not test:
        if len(train) <= test_size:
            raise CorpusError(f"need more than {test_size} sentences to hold out a test split")
        train, test = train[:-test_size], train[-test_size:]
    vocabulary = Vocabulary.from_sentences(train, first=[BOUNDARY])
    known = set(vocabulary.tokens)
    for sentence in test:
        unknown = [token for token in sentence if token not in known]
        if unknown:
            raise CorpusError(f"test sentence uses {unknown[0]!r}, which never appears in the train split")
    return SeqCorpus(
        vocabulary=vocabulary,
        train=tuple(tuple(vocabulary.encode(s)) for s in train),
        test=tuple(tuple(vocabulary.encode(s)) for s in test),
    )


def builtin_corpus() -> SeqCorpus:
    """Seven sentences over eleven tokens, 5 train / 2 test"""
    return corpus_from_sentences([s.split() for s in BUILTIN_TRAIN], [s.split() for s in BUILTIN_TEST])


def next_token_pairs(sentences: Sequence[Sequence[int]], context_length: int) -> List[Tuple[Tuple[int, ...], int]]:
    """Every (context, next token) pair, the first token included; contexts are left-padded with 0"""
    pairs = []
    for sentence in sentences:
        history = [PAD_ID] * context_length
        for token in sentence:
            pairs.append((tuple(history[-context_length:]), token))
            history.append(token)
    return pairs
