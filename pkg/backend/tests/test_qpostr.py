import itertools
import math
from collections import Counter

import numpy as np
import pytest

from errors import DecodeError, EncodingError, ParameterError
from qpostr.alphabet import alphabet_from_line, builtin_alphabet
from qpostr.encoder import amplitude_table, build_encoding_circuit, expected_state, layout_for
from qpostr.readout import build_readout_circuit, decode_samples, readout_layout, reconstruct_text, run_readout
from qpostr.resources import recovery_probability, resource_estimate, shots_for_recovery
from simulator.statevector import apply_circuit

ABC = builtin_alphabet("abc")


def encode(text, alphabet=ABC):
    return apply_circuit(build_encoding_circuit(text, alphabet))


def test_cab_matches_analytic_state():
    state = encode("cab")
    amps = np.zeros(16, dtype=complex)
    # index = position + (code << 2): c=11, a=01, b=10, padding=00
    for position, code in [(0, 3), (1, 1), (2, 2), (3, 0)]:
        amps[position + (code << 2)] = 0.5
    assert np.max(np.abs(state.amps - amps)) < 1e-12


def test_exhaustive_short_strings_match_oracle():
    characters = "".join(ABC.characters)
    for length in range(1, 6):
        for letters in itertools.product(characters, repeat=length):
            text = "".join(letters)
            assert np.max(np.abs(encode(text).amps - expected_state(text, ABC).amps)) < 1e-12, text


def test_random_long_strings_match_oracle_and_resources():
    rng = np.random.default_rng(11)
    characters = list(ABC.characters)
    for length in range(6, 17):
        for _ in range(5):
            text = "".join(rng.choice(characters, size=length))
            circuit = build_encoding_circuit(text, ABC)
            assert np.max(np.abs(apply_circuit(circuit).amps - expected_state(text, ABC).amps)) < 1e-12
            assert circuit.width == resource_estimate(max(length, 2), ABC.size).total_qubits


def test_amplitude_table_rows():
    layout = layout_for("cab", ABC)
    rows = amplitude_table(encode("cab"), layout, ABC)
    assert [(r["position"], r["char"]) for r in rows] == [(3, " "), (1, "a"), (2, "b"), (0, "c")]
    assert all(abs(r["amplitude"] - 0.5) < 1e-12 for r in rows)


def test_single_character_still_gets_a_position_qubit():
    layout = layout_for("a", ABC)
    assert layout.pos_bits == 1
    assert layout.positions == 2


def test_unknown_character_is_rejected():
    with pytest.raises(EncodingError):
        build_encoding_circuit("abd", ABC)


def test_alphabets():
    assert builtin_alphabet("lowercase").char_bits == 5
    assert builtin_alphabet("ascii").code("A") == 65
    assert alphabet_from_line("xyz").characters == (" ", "x", "y", "z")
    assert alphabet_from_line(" xy").characters == (" ", "x", "y")
    with pytest.raises(EncodingError):
        builtin_alphabet("klingon")
    with pytest.raises(DecodeError):
        ABC.char(4)


def test_readout_at_ten_thousand_shots():
    shots = 10_000
    layout, histogram = run_readout("cab", ABC, shots, seed=2024)
    assert layout.total_qubits == 6
    for position in range(4):
        frequency = sum(histogram[position].values()) / shots
        assert abs(frequency - 0.25) <= 0.02
    assert reconstruct_text(histogram, layout) == "cab "


def test_batched_readout_is_reproducible():
    first = run_readout("abc", ABC, 2000, seed=5, batches=4)[1]
    assert first == run_readout("abc", ABC, 2000, seed=5, batches=4)[1]


def test_readout_circuit_copies_character_register():
    state = apply_circuit(build_readout_circuit("ba", ABC))
    layout = readout_layout("ba", ABC)
    for index in np.flatnonzero(np.abs(state.amps) > 1e-12):
        code = (index >> layout.pos_bits) & 3
        output = (index >> (layout.pos_bits + layout.char_bits)) & 3
        assert code == output


def test_decode_rejects_inconsistent_samples():
    layout = readout_layout("cab", ABC)
    # position 0, character code 3, output register 1
    with pytest.raises(DecodeError):
        decode_samples([0 + (3 << 2) + (1 << 4)], layout, ABC)
    with pytest.raises(DecodeError):
        decode_samples([1 << 6], layout, ABC)
    with pytest.raises(DecodeError):
        reconstruct_text({0: Counter("c")}, layout)


def test_resource_estimates():
    assert tuple(resource_estimate(3.6e12, 149_813)) == (42, 18, 60)
    assert tuple(resource_estimate(3, 4)) == (2, 2, 4)
    assert tuple(resource_estimate(1, 1)) == (0, 0, 0)
    with pytest.raises(ParameterError):
        resource_estimate(0, 4)


def test_shots_for_recovery():
    shots = shots_for_recovery(4, 0.99)
    assert recovery_probability(4, shots) >= 0.99
    assert recovery_probability(4, shots - 1) < 0.99
    assert shots_for_recovery(1, 0.5) == 1
    assert recovery_probability(4, 0) == pytest.approx(0.0)
    assert math.isclose(recovery_probability(2, 1), 0.25)
    assert math.isclose(recovery_probability(5, 12), (1 - (4 / 5) ** 12) ** 5)
    with pytest.raises(ParameterError):
        shots_for_recovery(4, 1.0)
