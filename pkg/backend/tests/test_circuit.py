import math

import numpy as np
import pytest

from errors import CircuitFormatError, ParameterError, QubitIndexError, WidthMismatchError
from simulator.circuit import Circuit, CircuitBuilder, ParameterVector
from simulator.gates import GateKind
from simulator.rng import child_rngs, derive_seed, ordered_map
from simulator.serialization import dumps_circuit, load_circuit, loads_circuit, save_circuit
from simulator.statevector import apply_circuit


def sample_circuit() -> Circuit:
    return (CircuitBuilder(3)
            .h(0)
            .ry(1, "theta")
            .rz(2, 0.1)
            .mcu(GateKind.RX, [(0, 1), (1, 0)], 2, "phi")
            .swap(0, 2, [(1, 1)])
            .mcx([0, 1], 2)
            .build())


def test_builder_declares_params_in_first_use_order():
    circuit = sample_circuit()
    assert circuit.param_names == ("theta", "phi")
    assert circuit.count(GateKind.MCX) == 1
    assert circuit.bind(ParameterVector.of([0.5, 0.7]))[1] == 0.5


def test_bind_rejects_wrong_count():
    with pytest.raises(ParameterError):
        sample_circuit().bind(ParameterVector.of([1.0]))


def test_parameter_vector_must_be_finite():
    with pytest.raises(ParameterError):
        ParameterVector.of([float("nan")])


def test_circuit_validation():
    with pytest.raises(QubitIndexError):
        CircuitBuilder(2).cnot(0, 2).build()
    with pytest.raises(ParameterError):
        CircuitBuilder(1).add(CircuitBuilder(1).ry(0, "a").build().ops[0]).build().bind()


def test_freeze_matches_bound_run():
    circuit = sample_circuit()
    params = ParameterVector.of([0.3, -1.2])
    frozen = circuit.freeze(params)
    assert frozen.num_params == 0
    assert np.allclose(apply_circuit(frozen).amps, apply_circuit(circuit, params).amps)


def test_relabel_and_compose():
    small = CircuitBuilder(1).ry(0, "t").build()
    moved = small.relabel([2], width=3, prefix="w:")
    assert moved.ops[0].targets == (2,)
    assert moved.param_names == ("w:t",)
    both = moved.compose(CircuitBuilder(3).rx(0, "w:t").build())
    assert both.param_names == ("w:t",)
    with pytest.raises(WidthMismatchError):
        small.compose(moved)


def test_text_format_round_trip(tmp_path):
    circuit = sample_circuit()
    text = dumps_circuit(circuit)
    assert text.splitlines()[0] == "QCIRCUIT v1 width=3"
    assert "GATE MCU:RX targets=[2] controls=[(0,1),(1,0)] angle=$phi" in text
    assert loads_circuit(text) == circuit
    path = save_circuit(circuit, tmp_path / "nested" / "c.qc")
    assert load_circuit(path) == circuit


def test_fixed_angles_round_trip_exactly():
    circuit = CircuitBuilder(1).rz(0, math.pi / 7).build()
    assert loads_circuit(dumps_circuit(circuit)).ops[0].fixed_angle == math.pi / 7


@pytest.mark.parametrize("text", [
    "",
    "QCIRCUIT v2 width=1\nPARAMS\n",
    "QCIRCUIT v1 width=1\nGATE X targets=[0] controls=[] angle=-\n",
    "QCIRCUIT v1 width=1\nPARAMS\nGATE Q targets=[0] controls=[] angle=-\n",
    "QCIRCUIT v1 width=1\nPARAMS\nGATE X targets=[1] controls=[] angle=-\n",
    "QCIRCUIT v1 width=1\nPARAMS\nGATE RY targets=[0] controls=[] angle=$missing\n",
    "QCIRCUIT v1 width=1\nPARAMS\nGATE RY targets=[0] controls=[] angle=abc\n",
])
def test_malformed_circuit_text(text):
    with pytest.raises(CircuitFormatError):
        loads_circuit(text)


def test_missing_circuit_file(tmp_path):
    with pytest.raises(CircuitFormatError):
        load_circuit(tmp_path / "absent.qc")


def test_rng_streams_are_reproducible():
    first = [g.random() for g in child_rngs(5, 3)]
    assert first == [g.random() for g in child_rngs(5, 3)]
    assert len(set(first)) == 3
    assert derive_seed(1, 2) == derive_seed(1, 2) != derive_seed(1, 3)
    assert ordered_map(lambda v: v * v, [3, 1, 2], threads=3) == [9, 1, 4]
