"""
Qubit and shot resources for positional string encoding
"""

import math
from typing import NamedTuple, Union

from errors import ParameterError


class ResourceEstimate(NamedTuple):
    pos_bits: int
    char_bits: int
    total_qubits: int


def ceil_log2(count: Union[int, float]) -> int:
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    return (math.ceil(count) - 1).bit_length()


def resource_estimate(char_positions: Union[int, float], alphabet_size: Union[int, float]) -> ResourceEstimate:
    """(ceil log2 positions, ceil log2 alphabet, sum), computed on integers"""
    pos_bits = ceil_log2(char_positions)
    char_bits = ceil_log2(alphabet_size)
    return ResourceEstimate(pos_bits, char_bits, pos_bits + char_bits)


def recovery_probability(positions: int, shots: int) -> float:
    """(1 - (1 - 1/P)^s)^P: chance that s uniform shots have seen every position"""
    if positions < 1:
        raise ParameterError("positions must be >= 1")
    if positions == 1:
        return 1.0 if shots >= 1 else 0.0
    miss = (1.0 - 1.0 / positions) ** shots
    return (1.0 - miss) ** positions


def shots_for_recovery(positions: int, confidence: float) -> int:
    """Smallest s with recovery_probability(P, s) >= confidence"""
    if not 0.0 < confidence < 1.0:
        raise ParameterError(f"confidence must lie in (0, 1), got {confidence}")
    if positions < 1:
        raise ParameterError("positions must be >= 1")
    if positions == 1:
        return 1

    high = 1
    while recovery_probability(positions, high) < confidence:
        high *= 2
    low = high // 2
    while high - low > 1:
        middle = (low + high) // 2
        if recovery_probability(positions, middle) >= confidence:
            high = middle
        else:
            low = middle
    return high
