"""
Adaptive-moment (Adam) optimizer
OptimizerState is a plain value; optimizer_step returns a new state and new
parameters and never mutates its inputs
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import OPTIMIZER_DEFAULTS
from errors import ParameterError
from simulator.circuit import ParameterVector


class OptimizerState(BaseModel):
    """Step count, moment accumulators and hyperparameters"""
    model_config = ConfigDict(frozen=True)

    step: int = 0
    first_moment: Tuple[float, ...]
    second_moment: Tuple[float, ...]
    learning_rate: float = Field(default=OPTIMIZER_DEFAULTS["learning_rate"], gt=0)
    beta1: float = Field(default=OPTIMIZER_DEFAULTS["beta1"], ge=0, lt=1)
    beta2: float = Field(default=OPTIMIZER_DEFAULTS["beta2"], ge=0, lt=1)
    epsilon: float = Field(default=OPTIMIZER_DEFAULTS["epsilon"], gt=0)


def init_optimizer(num_params: int, **overrides) -> OptimizerState:
    zeros = (0.0,) * num_params
    return OptimizerState(first_moment=zeros, second_moment=zeros, **overrides)


def optimizer_step(state: OptimizerState, params: ParameterVector,
                   grad: np.ndarray) -> Tuple[OptimizerState, ParameterVector]:
    grad = np.asarray(grad, dtype=float)
    if not (len(params) == grad.size == len(state.first_moment)):
        raise ParameterError(
            f"length mismatch: {len(params)} params, {grad.size} grads, {len(state.first_moment)} accumulators"
        )
    if not np.all(np.isfinite(grad)):
        raise ParameterError("gradient has non-finite entries")

    step = state.step + 1
    m = state.beta1 * np.array(state.first_moment) + (1 - state.beta1) * grad
    v = state.beta2 * np.array(state.second_moment) + (1 - state.beta2) * grad ** 2
    m_hat = m / (1 - state.beta1 ** step)
    v_hat = v / (1 - state.beta2 ** step)
    values = params.as_array() - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)

    new_state = state.model_copy(update={
        "step": step,
        "first_moment": tuple(m.tolist()),
        "second_moment": tuple(v.tolist()),
    })
    return new_state, ParameterVector.of(values)
