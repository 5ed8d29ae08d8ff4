"""
Gradients of parameterized circuits
- parameter_shift_grad: shift rule per rotation occurrence (two-term, or
  the exact four-term rule for controlled rotations)
- adjoint_grad: one forward and one backward statevector sweep
- finite_diff_grad: central differences of any LossFn (test oracle)
- probability_objective_grad: any loss of the Born probabilities
"""

import math
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from config.settings import GRADIENT_CONFIG
from diffopt.observables import DiagonalObservable
from errors import GradientError, UnsupportedGateError, WidthMismatchError
from simulator.circuit import Circuit, ParameterVector
from simulator.gates import GateKind
from simulator.rng import ordered_map
from simulator.statevector import (
    StateVector,
    apply_op_derivative,
    apply_op_inverse_inplace,
    run_angles,
)

GRADIENT_METHODS = ("adjoint", "parameter_shift")

_HALF_PI = math.pi / 2
_TWO_TERM_RULE = ((_HALF_PI, 0.5), (-_HALF_PI, -0.5))
_C1 = (2 + math.sqrt(2)) / 8
_C2 = (math.sqrt(2) - 2) / 8
_FOUR_TERM_RULE = ((_HALF_PI, _C1), (-_HALF_PI, -_C1), (3 * _HALF_PI, _C2), (-3 * _HALF_PI, -_C2))


class LossResult(NamedTuple):
    """Scalar loss and, when available, its gradient"""
    loss: float
    grad: Optional[np.ndarray] = None


# (params, seed) -> LossResult; must be deterministic for fixed inputs
LossFn = Callable[[ParameterVector, int], Union[LossResult, float]]

# probabilities -> (loss, dLoss/dprobabilities)
ProbabilityObjective = Callable[[np.ndarray], Tuple[float, np.ndarray]]


def loss_value(result: Union[LossResult, float]) -> float:
    return float(result.loss) if isinstance(result, LossResult) else float(result)


def _check_differentiable(circuit: Circuit, method: str) -> None:
    for position, op in enumerate(circuit.ops):
        if op.kind == GateKind.RESET:
            raise UnsupportedGateError(f"op {position}: RESET cannot be differentiated by {method}")
        if op.param_slot is not None and not op.is_rotation:
            raise UnsupportedGateError(f"op {position}: parameterized {op.label} is not a rotation")


def _check_observable(circuit: Circuit, observable: DiagonalObservable) -> None:
    if observable.width != circuit.width:
        raise WidthMismatchError(f"observable width {observable.width} != circuit width {circuit.width}")


def expectation(circuit: Circuit, params: ParameterVector, observable: DiagonalObservable,
                initial: Optional[StateVector] = None) -> float:
    _check_observable(circuit, observable)
    amps = run_angles(circuit, circuit.bind(params), initial)
    return float(np.dot(observable.weights, np.abs(amps) ** 2))


def parameter_shift_grad(circuit: Circuit, params: ParameterVector, observable: DiagonalObservable,
                         initial: Optional[StateVector] = None, threads: Optional[int] = None) -> np.ndarray:
    """
    Shift-rule gradient

    Each occurrence of a parameter is shifted on its own; a slot shared by
    several gates receives the sum over its occurrences.
    """
    _check_differentiable(circuit, "parameter shift")
    _check_observable(circuit, observable)
    angles = circuit.bind(params)
    slots = circuit.slot_index

    jobs = []
    for position, op in enumerate(circuit.ops):
        if op.param_slot is None:
            continue
        rule = _FOUR_TERM_RULE if op.controls else _TWO_TERM_RULE
        for shift, coefficient in rule:
            jobs.append((position, shift, coefficient, slots[op.param_slot]))

    def evaluate(job) -> float:
        position, shift, _, _ = job
        shifted: List[Optional[float]] = list(angles)
        shifted[position] = angles[position] + shift
        amps = run_angles(circuit, shifted, initial)
        return float(np.dot(observable.weights, np.abs(amps) ** 2))

    values = ordered_map(evaluate, jobs, threads)
    grad = np.zeros(circuit.num_params)
    for (_, _, coefficient, slot), value in zip(jobs, values):
        grad[slot] += coefficient * value
    return grad


def _adjoint_sweep(circuit: Circuit, angles: List[Optional[float]], psi: np.ndarray,
                   weights: np.ndarray) -> np.ndarray:
    """Backward sweep from the final state psi; consumes psi"""
    slots = circuit.slot_index
    grad = np.zeros(circuit.num_params)
    lam = weights * psi
    for position in range(len(circuit.ops) - 1, -1, -1):
        op = circuit.ops[position]
        angle = angles[position]
        apply_op_inverse_inplace(psi, op, angle, circuit.width)
        if op.param_slot is not None:
            mu = apply_op_derivative(psi, op, angle, circuit.width)
            grad[slots[op.param_slot]] += 2.0 * float(np.real(np.vdot(lam, mu)))
        apply_op_inverse_inplace(lam, op, angle, circuit.width)
    return grad


def adjoint_grad(circuit: Circuit, params: ParameterVector, observable: DiagonalObservable,
                 initial: Optional[StateVector] = None) -> np.ndarray:
    """Exact gradient of <psi(theta)|W|psi(theta)> for a diagonal W"""
    _check_differentiable(circuit, "the adjoint method")
    _check_observable(circuit, observable)
    angles = circuit.bind(params)
    psi = run_angles(circuit, angles, initial)
    return _adjoint_sweep(circuit, angles, psi, observable.weights)


def circuit_grad(method: str, circuit: Circuit, params: ParameterVector, observable: DiagonalObservable,
                 initial: Optional[StateVector] = None) -> np.ndarray:
    if method == "adjoint":
        return adjoint_grad(circuit, params, observable, initial)
    if method == "parameter_shift":
        return parameter_shift_grad(circuit, params, observable, initial)
    raise GradientError(f"unknown gradient method {method!r}; use one of {GRADIENT_METHODS}")


def probability_objective_grad(circuit: Circuit, params: ParameterVector, objective: ProbabilityObjective,
                               method: str = "adjoint",
                               initial: Optional[StateVector] = None) -> Tuple[float, np.ndarray]:
    """
    Loss and gradient of objective(probabilities(circuit(params)))

    The objective returns its cotangent dL/dp, which is used as a diagonal
    observable for either gradient method.
    """
    if method not in GRADIENT_METHODS:
        raise GradientError(f"unknown gradient method {method!r}; use one of {GRADIENT_METHODS}")
    _check_differentiable(circuit, method)
    angles = circuit.bind(params)
    psi = run_angles(circuit, angles, initial)
    loss, cotangent = objective(np.abs(psi) ** 2)
    cotangent = np.asarray(cotangent, dtype=float)
    if cotangent.shape != psi.shape:
        raise GradientError(f"objective cotangent has shape {cotangent.shape}, expected {psi.shape}")
    if method == "adjoint":
        return float(loss), _adjoint_sweep(circuit, angles, psi, cotangent)
    return float(loss), parameter_shift_grad(circuit, params, DiagonalObservable(cotangent), initial)


def finite_diff_grad(loss: LossFn, params: ParameterVector, h: float = GRADIENT_CONFIG["finite_diff_step"],
                     seed: int = 0) -> np.ndarray:
    """Central differences per coordinate, same seed for every evaluation"""
    if not GRADIENT_CONFIG["finite_diff_min_step"] <= h <= GRADIENT_CONFIG["finite_diff_max_step"]:
        raise GradientError(
            f"finite-difference step {h} outside "
            f"[{GRADIENT_CONFIG['finite_diff_min_step']}, {GRADIENT_CONFIG['finite_diff_max_step']}]"
        )
    base = params.as_array()
    grad = np.zeros(base.size)
    for j in range(base.size):
        plus = base.copy()
        minus = base.copy()
        plus[j] += h
        minus[j] -= h
        up = loss_value(loss(ParameterVector.of(plus), seed))
        down = loss_value(loss(ParameterVector.of(minus), seed))
        grad[j] = (up - down) / (2.0 * h)
    return grad
