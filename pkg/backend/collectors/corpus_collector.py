"""
Corpus Collector Module
Reads the plain-text inputs of the toolkit
- Sentence corpora (one sentence per line, optional `---` train/test separator)
- Token-pair files for embedding evaluation
- Alphabet files for string encoding
"""

import logging
from typing import List, Optional, Tuple

from config.settings import QPOSTR_CONFIG, SEQGEN_DEFAULTS
from errors import CorpusError
from qpostr.alphabet import AlphabetMap, alphabet_from_line, builtin_alphabet

logger = logging.getLogger(__name__)

Sentence = List[str]


class CorpusCollector:
    """Collects sentences, pairs and alphabets from text files"""

    def __init__(self, split_marker: str = SEQGEN_DEFAULTS["split_marker"]):
        self.split_marker = split_marker

    def _read_lines(self, path: str) -> List[str]:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                lines = f.read().splitlines()
        except FileNotFoundError:
            raise CorpusError(f"{path} not found")
        except (OSError, UnicodeDecodeError) as exc:
            raise CorpusError(f"cannot read {path}: {exc}")
        return lines

    def _content_lines(self, path: str) -> List[str]:
        """Stripped lines without blanks and `#` comments"""
        return [line.strip() for line in self._read_lines(path)
                if line.strip() and not line.strip().startswith("#")]

    def collect_sentences(self, path: str) -> Tuple[List[Sentence], List[Sentence]]:
        """
        Read a sentence corpus

        Returns:
            (train sentences, test sentences); test is empty when the file
            has no separator line
        """
        train: List[Sentence] = []
        test: List[Sentence] = []
        current = train
        for line in self._content_lines(path):
            if line == self.split_marker:
                if current is test:
                    raise CorpusError(f"{path} has more than one {self.split_marker!r} separator")
                current = test
                continue
            current.append(line.lower().split())
        if not train:
            raise CorpusError(f"{path} contains no sentences")
        logger.info("Collected %d train / %d test sentences from %s", len(train), len(test), path)
        return train, test

    def collect_tokens(self, path: str) -> List[Sentence]:
        """All sentences of a corpus file, separator ignored"""
        train, test = self.collect_sentences(path)
        return train + test

    def collect_pairs(self, path: str) -> List[Tuple[str, str]]:
        pairs = []
        for number, line in enumerate(self._content_lines(path), start=1):
            tokens = line.lower().split()
            if len(tokens) != 2:
                raise CorpusError(f"{path}: pair line {number} has {len(tokens)} tokens, expected 2")
            pairs.append((tokens[0], tokens[1]))
        if not pairs:
            raise CorpusError(f"{path} contains no pairs")
        logger.info("Collected %d token pairs from %s", len(pairs), path)
        return pairs

    def collect_alphabet(self, path: str) -> AlphabetMap:
        """First line lists the characters in code order (padding space prepended if missing)"""
        lines = self._read_lines(path)
        if not lines or not lines[0].strip():
            raise CorpusError(f"{path} has no alphabet line")
        return alphabet_from_line(lines[0])


def load_alphabet(spec: Optional[str], collector: Optional[CorpusCollector] = None) -> AlphabetMap:
    """Builtin alphabet name, or a path to an alphabet file"""
    spec = spec or QPOSTR_CONFIG["builtin_alphabets"][0]
    if spec in QPOSTR_CONFIG["builtin_alphabets"]:
        return builtin_alphabet(spec)
    return (collector or CorpusCollector()).collect_alphabet(spec)
