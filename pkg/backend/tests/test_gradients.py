import math

import numpy as np
import pytest

from config.settings import OPTIMIZER_DEFAULTS
from diffopt.gradients import (
    LossResult,
    adjoint_grad,
    circuit_grad,
    expectation,
    finite_diff_grad,
    parameter_shift_grad,
    probability_objective_grad,
)
from diffopt.observables import DiagonalObservable, pauli_z, projector, register_projector
from diffopt.optimizer import init_optimizer, optimizer_step
from diffopt.trainer import TrainConfig, train
from errors import GradientError, ParameterError, UnsupportedGateError, WidthMismatchError
from reports.trace_reporter import TraceReporter
from simulator.circuit import Circuit, CircuitBuilder, ParameterVector
from simulator.gates import GateKind
from simulator.statevector import apply_circuit


def random_circuit(rng: np.random.Generator) -> Circuit:
    width = int(rng.integers(1, 7))
    count = int(rng.integers(1, 21))
    builder = CircuitBuilder(width)
    names = [f"p{i}" for i in range(count)]
    for name in names:
        builder.param(name)
    for _ in range(int(rng.integers(count, 2 * count + 4))):
        target = int(rng.integers(width))
        name = names[int(rng.integers(count))]
        choice = rng.integers(6)
        if choice == 0:
            builder.h(target)
        elif choice == 1 and width > 1:
            builder.cnot((target + 1) % width, target)
        elif choice == 2 and width > 1:
            control = (target + 1 + int(rng.integers(width - 1))) % width
            base = [GateKind.RX, GateKind.RY, GateKind.RZ][int(rng.integers(3))]
            builder.mcu(base, [(control, int(rng.integers(2)))], target, name)
        else:
            [builder.rx, builder.ry, builder.rz][int(rng.integers(3))](target, name)
    return builder.build()


def random_observable(width: int, rng: np.random.Generator) -> DiagonalObservable:
    return DiagonalObservable(rng.normal(size=1 << width))


def test_shift_rule_and_adjoint_agree_with_finite_differences():
    rng = np.random.default_rng(42)
    for _ in range(20):
        circuit = random_circuit(rng)
        observable = random_observable(circuit.width, rng)
        params = ParameterVector.of(rng.uniform(-math.pi, math.pi, size=circuit.num_params))

        def loss(p, seed):
            return expectation(circuit, p, observable)

        reference = finite_diff_grad(loss, params)
        shift = parameter_shift_grad(circuit, params, observable)
        adjoint = adjoint_grad(circuit, params, observable)
        scale = max(1.0, float(np.linalg.norm(shift)))
        assert np.linalg.norm(shift - reference) <= 1e-6 * scale
        assert np.linalg.norm(adjoint - shift) <= 1e-8 * scale


def test_controlled_rotation_needs_four_term_rule():
    circuit = CircuitBuilder(2).h(0).mcu(GateKind.RY, [0], 1, "t").build()
    observable = pauli_z(2, 1)
    params = ParameterVector.of([0.4])
    # <Z_1> = 1/2 + cos(t)/2, so d/dt = -sin(t)/2
    assert parameter_shift_grad(circuit, params, observable)[0] == pytest.approx(-math.sin(0.4) / 2, abs=1e-12)


def test_shared_slot_sums_occurrences():
    circuit = CircuitBuilder(1).ry(0, "t").ry(0, "t").build()
    params = ParameterVector.of([0.3])
    # <Z> = cos(2t)
    expected = -2 * math.sin(0.6)
    assert adjoint_grad(circuit, params, pauli_z(1, 0))[0] == pytest.approx(expected, abs=1e-12)
    assert parameter_shift_grad(circuit, params, pauli_z(1, 0))[0] == pytest.approx(expected, abs=1e-12)


def test_reset_is_not_differentiable():
    circuit = CircuitBuilder(1).ry(0, "t").reset(0).build()
    params = ParameterVector.of([0.1])
    for method in ("adjoint", "parameter_shift"):
        with pytest.raises(UnsupportedGateError):
            circuit_grad(method, circuit, params, pauli_z(1, 0))


def test_gradient_request_errors():
    circuit = CircuitBuilder(1).ry(0, "t").build()
    params = ParameterVector.of([0.1])
    with pytest.raises(GradientError):
        circuit_grad("backprop", circuit, params, pauli_z(1, 0))
    with pytest.raises(WidthMismatchError):
        adjoint_grad(circuit, params, pauli_z(2, 0))
    with pytest.raises(GradientError):
        finite_diff_grad(lambda p, s: 0.0, params, h=1e-2)


def test_probability_objective_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    circuit = random_circuit(rng)
    while circuit.width < 2:
        circuit = random_circuit(rng)
    params = ParameterVector.of(rng.uniform(-1, 1, size=circuit.num_params))

    def objective(probs):
        return float(-np.log(probs[0] + 0.1)), np.eye(probs.size)[0] * (-1.0 / (probs[0] + 0.1))

    def loss(p, seed):
        return objective(np.abs(apply_circuit(circuit, p).amps) ** 2)[0]

    reference = finite_diff_grad(loss, params)
    for method in ("adjoint", "parameter_shift"):
        value, grad = probability_objective_grad(circuit, params, objective, method)
        assert value == pytest.approx(loss(params, 0))
        assert np.allclose(grad, reference, atol=1e-7)


def test_observables():
    state = apply_circuit(CircuitBuilder(2).x(1).build())
    assert pauli_z(2, 1).expectation(state) == -1.0
    assert projector(2, 2).expectation(state) == 1.0
    assert register_projector(2, [1], 1).expectation(state) == 1.0
    assert (pauli_z(2, 0) + pauli_z(2, 1).scaled(2.0)).expectation(state) == -1.0


def test_adam_step_moves_against_gradient():
    state = init_optimizer(2)
    new_state, params = optimizer_step(state, ParameterVector.of([0.0, 0.0]), np.array([1.0, -1.0]))
    lr = OPTIMIZER_DEFAULTS["learning_rate"]
    assert new_state.step == 1
    assert params.values == pytest.approx((-lr, lr))
    assert state.step == 0
    with pytest.raises(ParameterError):
        optimizer_step(state, ParameterVector.of([0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ParameterError):
        optimizer_step(state, ParameterVector.of([0.0, 0.0]), np.array([np.inf, 1.0]))


def test_train_minimizes_expectation_and_records_trace():
    circuit = CircuitBuilder(1).ry(0, "t").build()
    observable = pauli_z(1, 0)

    def loss(params, seed):
        return LossResult(expectation(circuit, params, observable), adjoint_grad(circuit, params, observable))

    reporter = TraceReporter()
    result = train(loss, ParameterVector.of([0.5]), TrainConfig(epochs=120, learning_rate=0.1), reporter)
    assert len(result.history) == 120
    assert reporter.history == result.history
    assert expectation(circuit, result.params, observable) < -0.99
    assert reporter.summary()["best_loss"] <= result.history[0]


def test_train_falls_back_to_finite_differences():
    def loss(params, seed):
        return float((params.values[0] - 1.0) ** 2)

    result = train(loss, ParameterVector.of([0.0]), TrainConfig(epochs=200, learning_rate=0.1))
    assert result.params.values[0] == pytest.approx(1.0, abs=1e-2)


def test_zero_epochs_returns_init():
    init = ParameterVector.of([0.2])
    result = train(lambda p, s: 0.0, init, TrainConfig(epochs=0))
    assert result.params == init
    assert result.history == []


def test_closed_form_gradients():
    circuit = CircuitBuilder(1).rx(0, "t").build()
    params = ParameterVector.of([math.pi / 2])
    assert parameter_shift_grad(circuit, params, pauli_z(1, 0))[0] == pytest.approx(-1.0, abs=1e-12)
    phase_only = CircuitBuilder(1).rz(0, "t").build()
    assert adjoint_grad(phase_only, ParameterVector.of([0.7]), pauli_z(1, 0))[0] == pytest.approx(0.0, abs=1e-12)
    fixed = CircuitBuilder(1).h(0).build()
    assert adjoint_grad(fixed, ParameterVector.of([]), pauli_z(1, 0)).size == 0


def test_finite_differences_of_quadratic():
    grad = finite_diff_grad(lambda p, s: float(np.sum(p.as_array() ** 2)), ParameterVector.of([1.0, 2.0]))
    assert np.allclose(grad, [2.0, 4.0], atol=1e-6)
