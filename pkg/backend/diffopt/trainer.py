"""
Full-batch training loop
One epoch is one optimizer step. The history holds the loss evaluated
before each step; the returned parameters are the best seen, final ones included.
"""

import logging
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import GRADIENT_CONFIG, OPTIMIZER_DEFAULTS
from diffopt.gradients import LossFn, LossResult, finite_diff_grad, loss_value
from diffopt.optimizer import init_optimizer, optimizer_step
from errors import ParameterError
from reports.trace_reporter import TraceReporter
from simulator.circuit import ParameterVector
from simulator.rng import derive_seed

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=100, ge=0)
    learning_rate: float = Field(default=OPTIMIZER_DEFAULTS["learning_rate"], gt=0)
    seed: int = 0
    # "auto": use the loss's own gradient, falling back to finite differences
    grad_method: str = Field(default="auto", pattern="^(auto|finite_diff)$")
    finite_diff_step: float = GRADIENT_CONFIG["finite_diff_step"]


class TrainResult(NamedTuple):
    params: ParameterVector
    history: List[float]


def _evaluate(loss: LossFn, params: ParameterVector, seed: int, config: TrainConfig):
    result = loss(params, seed)
    value = loss_value(result)
    grad = result.grad if isinstance(result, LossResult) else None
    if config.grad_method == "finite_diff" or grad is None:
        grad = finite_diff_grad(loss, params, config.finite_diff_step, seed)
    grad = np.asarray(grad, dtype=float)
    if grad.size != len(params):
        raise ParameterError(f"loss returned {grad.size} gradients for {len(params)} parameters")
    return value, grad


def train(loss: LossFn, init: ParameterVector, config: TrainConfig,
          reporter: Optional[TraceReporter] = None) -> TrainResult:
    """
    Minimize loss from init with Adam

    Args:
        loss: (params, seed) -> LossResult; the seed for epoch e is derived from config.seed
        init: starting parameters
        config: epochs / learning rate / seed / gradient method
        reporter: receives one record per epoch
    """
    if config.epochs == 0:
        return TrainResult(init, [])

    state = init_optimizer(len(init), learning_rate=config.learning_rate)
    params = init
    best_params, best_loss = init, float("inf")
    history: List[float] = []

    for epoch in range(config.epochs):
        value, grad = _evaluate(loss, params, derive_seed(config.seed, epoch), config)
        grad_norm = float(np.linalg.norm(grad))
        history.append(value)
        if reporter is not None:
            reporter.record(epoch, value, grad_norm)
        if value < best_loss:
            best_params, best_loss = params, value
        state, params = optimizer_step(state, params, grad)

    final = loss_value(loss(params, derive_seed(config.seed, config.epochs)))
    if final < best_loss:
        best_params, best_loss = params, final

    logger.info("trained %d epochs: loss %.6f -> best %.6f", config.epochs, history[0], best_loss)
    return TrainResult(best_params, history)
