"""
Sequence model training
Full-batch Adam on the mean next-token NLL of the train split.
"""

import logging
from typing import List, NamedTuple, Optional, Sequence

from diffopt.trainer import TrainConfig, train
from embeddings.vocabulary import Vocabulary
from reports.trace_reporter import TraceReporter
from seqgen.model import Checkpoint, SeqTrainConfig, nll_loss_fn
from seqgen.spec import SeqModelSpec, count_parameters
from simulator.circuit import ParameterVector
from simulator.rng import make_rng

logger = logging.getLogger(__name__)


class SeqTrainResult(NamedTuple):
    checkpoint: Checkpoint
    history: List[float]


def init_checkpoint(spec: SeqModelSpec, vocabulary: Vocabulary,
                    config: Optional[SeqTrainConfig] = None) -> Checkpoint:
    """Parameters uniform in (-init_range, init_range) from config.seed"""
    config = config or SeqTrainConfig()
    count = count_parameters(spec)
    values = make_rng(config.seed).uniform(-config.init_range, config.init_range, size=count)
    return Checkpoint(spec=spec, params=ParameterVector.of(values), vocabulary=vocabulary, config=config)


def train_seq(checkpoint: Checkpoint, sentences: Sequence[Sequence[int]], config: Optional[SeqTrainConfig] = None,
              reporter: Optional[TraceReporter] = None) -> SeqTrainResult:
    """
    Train a checkpoint's parameters on the given sentences

    Returns the best checkpoint seen (carrying `config`) with the per-epoch
    loss history. Models without parameters are returned unchanged.
    """
    config = config or checkpoint.config
    if not len(checkpoint.params):
        logger.info("%s has no parameters; nothing to train", checkpoint.spec.architecture.value)
        return SeqTrainResult(checkpoint.model_copy(update={"config": config}), [])

    loss = nll_loss_fn(checkpoint.spec, checkpoint.vocabulary.size, sentences, config.gradient_method,
                       config.shots, config.threads)
    logger.info("training %s: %d parameters, %d epochs, seed %d", checkpoint.spec.architecture.value,
                len(checkpoint.params), config.epochs, config.seed)
    train_config = TrainConfig(epochs=config.epochs, learning_rate=config.learning_rate, seed=config.seed,
                               grad_method="finite_diff" if config.gradient_method == "finite_diff" else "auto")
    result = train(loss, checkpoint.params, train_config, reporter)
    trained = Checkpoint(spec=checkpoint.spec, params=result.params, vocabulary=checkpoint.vocabulary, config=config)
    return SeqTrainResult(trained, result.history)
