"""
Trace Reporter
Collects per-epoch training records
- Writes `epoch,loss,grad_norm` lines to an optional text sink
- Warns when the gradient norm vanishes (barren-plateau observation)
- Summarizes a finished run
"""

import logging
from typing import Dict, List, NamedTuple, Optional, TextIO

from config.settings import GRADIENT_CONFIG
from errors import ParameterError

logger = logging.getLogger(__name__)


class TraceRecord(NamedTuple):
    epoch: int
    loss: float
    grad_norm: float

    def line(self) -> str:
        return f"{self.epoch},{self.loss!r},{self.grad_norm!r}"


class TraceReporter:
    """Records the training trace of one run"""

    def __init__(self, sink: Optional[TextIO] = None, name: str = "train",
                 vanishing_threshold: float = GRADIENT_CONFIG["vanishing_grad_norm"]):
        self.sink = sink
        self.name = name
        self.vanishing_threshold = vanishing_threshold
        self.records: List[TraceRecord] = []

    def record(self, epoch: int, loss: float, grad_norm: float) -> TraceRecord:
        """
        Append one epoch to the trace

        Args:
            epoch: must follow the previously recorded epoch
            loss: loss before the optimizer step
            grad_norm: Euclidean norm of the gradient used for the step
        """
        if self.records and epoch <= self.records[-1].epoch:
            raise ParameterError(f"epoch {epoch} recorded after epoch {self.records[-1].epoch}")
        entry = TraceRecord(epoch, float(loss), float(grad_norm))
        self.records.append(entry)

        if self.sink is not None:
            self.sink.write(entry.line() + "\n")
        if grad_norm < self.vanishing_threshold:
            logger.warning("%s epoch %d: gradient norm %.3e below %.0e (vanishing gradient)",
                           self.name, epoch, grad_norm, self.vanishing_threshold)
        else:
            logger.debug("%s epoch %d: loss %.6f grad_norm %.3e", self.name, epoch, loss, grad_norm)
        return entry

    @property
    def history(self) -> List[float]:
        return [r.loss for r in self.records]

    def summary(self) -> Dict:
        if not self.records:
            return {"epochs": 0, "initial_loss": None, "final_loss": None, "best_loss": None}
        losses = self.history
        return {
            "epochs": len(self.records),
            "initial_loss": losses[0],
            "final_loss": losses[-1],
            "best_loss": min(losses),
        }

    def log_summary(self) -> None:
        summary = self.summary()
        if summary["epochs"]:
            logger.info("%s: %d epochs, loss %.6f -> %.6f (best %.6f)", self.name, summary["epochs"],
                        summary["initial_loss"], summary["final_loss"], summary["best_loss"])


def format_record(kind: str, **fields) -> str:
    """One line-delimited metric record: `<kind> key=value ...` with keys in the given order"""
    parts = [kind]
    for key, value in fields.items():
        text = repr(value) if isinstance(value, float) else str(value)
        parts.append(f"{key}={text}")
    return " ".join(parts)
