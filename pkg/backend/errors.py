"""
Error types for the quantum NLP toolkit
Every failure raised by the toolkit derives from QnlpError so that the
CLI and the HTTP routes can map it to an exit code / response
"""


class QnlpError(Exception):
    """Base class for all toolkit errors"""


# --- statevector-core ---

class CapacityError(QnlpError):
    """Register width outside the supported range"""


class ParameterError(QnlpError):
    """Unbound, misaligned or non-finite parameters"""


class QubitIndexError(QnlpError):
    """Qubit index outside the register, or overlapping controls/targets"""


class WidthMismatchError(QnlpError):
    """Two states or circuits of different widths were combined"""


class ImpossibleOutcomeError(QnlpError):
    """Post-selection on an outcome with (numerically) zero probability"""


class NormDriftError(QnlpError):
    """State norm drifted beyond tolerance; signals a kernel bug"""


class CircuitFormatError(QnlpError):
    """Malformed serialized circuit"""


# --- diffopt ---

class UnsupportedGateError(QnlpError):
    """Gate cannot be differentiated by the requested method"""


class GradientError(QnlpError):
    """Invalid gradient request (bad step size, length mismatch)"""


# --- qpostr ---

class EncodingError(QnlpError):
    """Text cannot be encoded with the given alphabet"""


class DecodeError(QnlpError):
    """Sampled basis index cannot be decoded"""


# --- embeddings / seqgen ---

class VocabularyError(QnlpError):
    """Unknown token or invalid vocabulary"""


class PreparationError(QnlpError):
    """Post-selected state preparation failed"""


class SchemeError(QnlpError):
    """Operation not available for this embedding scheme"""


class CorpusError(QnlpError):
    """Empty or unreadable corpus / data file"""


class SpecError(QnlpError):
    """Invalid sequence-model specification"""


class DegenerateOutputError(QnlpError):
    """Model puts (almost) no probability on in-vocabulary outcomes"""


# --- persistence / config ---

class CheckpointError(QnlpError):
    """Missing, unreadable or incompatible checkpoint file"""


class ConfigError(QnlpError):
    """Invalid run configuration or config file"""


# Errors caused by bad input files rather than by the computation itself
INPUT_ERRORS = (CorpusError, CheckpointError, ConfigError, CircuitFormatError)
