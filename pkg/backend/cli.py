"""
Command-line entry point
Subcommands: encode, decode, resources (qpostr); train-embed, eval-embed
(embeddings); train-seq, eval-seq, generate (seqgen).

Metric records go to stdout as `<kind> key=value ...` lines; logs go to
stderr. Exit codes: 0 ok, 2 usage, 3 bad input file, 4 computation error.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from collectors.corpus_collector import CorpusCollector, load_alphabet
from config.run_config import RunConfig, load_config_file, resolve_run_config
from config.settings import EMBEDDING_DEFAULTS, EXIT_CODES, OPTIMIZER_DEFAULTS, QPOSTR_CONFIG, SAMPLE_DATA_DIR, \
    SEQGEN_DEFAULTS
from embeddings.model import init_embedding_model, load_embedding, save_embedding
from embeddings.sgns import SgnsConfig, train_sgns
from embeddings.similarity import pair_fidelities
from embeddings.vocabulary import Vocabulary
from errors import INPUT_ERRORS, QnlpError
from qpostr.encoder import amplitude_table, build_encoding_circuit, layout_for
from qpostr.readout import reconstruct_text, run_readout
from qpostr.resources import resource_estimate
from reports.trace_reporter import TraceReporter, format_record
from seqgen.corpus import SeqCorpus, builtin_corpus, corpus_from_sentences
from seqgen.model import Checkpoint, SeqTrainConfig, generate, load_checkpoint, nll_loss, perplexity, \
    save_checkpoint
from seqgen.spec import builtin_spec
from seqgen.trainer import init_checkpoint, train_seq
from simulator.serialization import dumps_circuit, save_circuit
from simulator.statevector import apply_circuit

logger = logging.getLogger("qnlp")

DEFAULT_EMBED_CORPUS = os.path.join(SAMPLE_DATA_DIR, "toy_corpus.txt")


def emit(kind: str, **fields) -> None:
    print(format_record(kind, **fields))


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='random seed (default 0)')
    common.add_argument('--config', metavar='file', help='qnlp-config v1 key-value file')
    common.add_argument('--quiet', action='store_true', help='only log warnings and errors')
    common.add_argument('--threads', type=int, help='worker threads (default from QNLP_THREADS)')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="qnlp", description="Desk-scale quantum NLP toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    encode = sub.add_parser("encode", parents=[common], help="QPOSTR encoding circuit and amplitude table")
    encode.add_argument('--text', required=True)
    encode.add_argument('--alphabet', metavar='file|builtin', help='abc, lowercase, ascii or an alphabet file')
    encode.add_argument('--circuit-out', dest='circuit_out', metavar='file', help='write the circuit here')

    decode = sub.add_parser("decode", parents=[common], help="sample the readout circuit and decode the string")
    decode.add_argument('--text', required=True)
    decode.add_argument('--alphabet', metavar='file|builtin')
    decode.add_argument('--shots', type=int)

    resources = sub.add_parser("resources", parents=[common], help="qubit estimate for a text size")
    resources.add_argument('--positions', type=float, required=True)
    resources.add_argument('--alphabet-size', dest='alphabet_size', type=float, required=True)

    train_embed = sub.add_parser("train-embed", parents=[common], help="train SGNS word embeddings")
    train_embed.add_argument('--corpus', metavar='file')
    train_embed.add_argument('--scheme', choices=["circuit", "memory"])
    train_embed.add_argument('--epochs', type=int)
    train_embed.add_argument('--lr', dest='learning_rate', type=float)
    train_embed.add_argument('--qubits', type=int)
    train_embed.add_argument('--layers', type=int)
    train_embed.add_argument('--window', type=int)
    train_embed.add_argument('--negatives', type=int)
    train_embed.add_argument('--grad-method', dest='gradient_method',
                             choices=["adjoint", "parameter_shift", "finite_diff"])
    train_embed.add_argument('--out', metavar='file', help='embedding checkpoint to write')

    eval_embed = sub.add_parser("eval-embed", parents=[common], help="fidelities of token pairs")
    eval_embed.add_argument('--model', metavar='file', required=True)
    eval_embed.add_argument('--pairs', metavar='file', required=True)

    train_seq_cmd = sub.add_parser("train-seq", parents=[common], help="train a sequence model")
    train_seq_cmd.add_argument('--corpus', metavar='file', help='corpus file (builtin corpus by default)')
    train_seq_cmd.add_argument('--arch', choices=["proposed", "london", "london-baseline", "uniform"])
    train_seq_cmd.add_argument('--epochs', type=int)
    train_seq_cmd.add_argument('--lr', dest='learning_rate', type=float)
    train_seq_cmd.add_argument('--shots', type=int, help='train on shot estimates instead of exact probabilities')
    train_seq_cmd.add_argument('--grad-method', dest='gradient_method',
                               choices=["adjoint", "parameter_shift", "finite_diff"])
    train_seq_cmd.add_argument('--out', metavar='file', help='checkpoint to write')

    eval_seq = sub.add_parser("eval-seq", parents=[common], help="perplexity of a sequence model")
    eval_seq.add_argument('--ckpt', metavar='file')
    eval_seq.add_argument('--arch', choices=["proposed", "london", "london-baseline", "uniform"],
                          help='untrained model when no checkpoint is given (default uniform)')
    eval_seq.add_argument('--corpus', metavar='file')
    eval_seq.add_argument('--split', choices=["train", "test"])

    generate_cmd = sub.add_parser("generate", parents=[common], help="sample tokens from a checkpoint")
    generate_cmd.add_argument('--ckpt', metavar='file', required=True)
    generate_cmd.add_argument('--prompt', default=None)
    generate_cmd.add_argument('--length', type=int)

    return parser


def _flags(args: argparse.Namespace) -> Dict:
    skip = {"command", "config", "quiet"}
    return {key: value for key, value in vars(args).items() if key not in skip}


def _setup_logging(quiet: bool) -> None:
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _print_effective(config: RunConfig) -> None:
    emit("seed", value=config.seed)
    fields = {key: (repr(value) if isinstance(value, str) else value)
              for key, value in config.record_fields().items()}
    emit("config", **fields)


# --- qpostr ---

def cmd_encode(config: RunConfig) -> None:
    alphabet = load_alphabet(config.alphabet)
    layout = layout_for(config.text, alphabet)
    circuit = build_encoding_circuit(config.text, alphabet)
    emit("layout", positions=layout.positions, pos_bits=layout.pos_bits, char_bits=layout.char_bits,
         total_qubits=layout.total_qubits)
    if config.circuit_out:
        save_circuit(circuit, config.circuit_out)
        emit("circuit", path=config.circuit_out, gates=len(circuit.ops))
    else:
        for line in dumps_circuit(circuit).splitlines():
            print(line)
    for row in amplitude_table(apply_circuit(circuit), layout, alphabet):
        emit("amplitude", index=row["index"], position=row["position"], char=repr(row["char"]),
             real=float(row["amplitude"].real), imag=float(row["amplitude"].imag))


def cmd_decode(config: RunConfig) -> None:
    alphabet = load_alphabet(config.alphabet)
    shots = config.shots or QPOSTR_CONFIG["default_shots"]
    layout, histogram = run_readout(config.text, alphabet, shots, config.seed)
    for position, counts in histogram.items():
        for char, count in sorted(counts.items()):
            emit("count", position=position, char=repr(char), count=count, frequency=count / shots)
    emit("text", value=repr(reconstruct_text(histogram, layout)))


def cmd_resources(config: RunConfig) -> None:
    estimate = resource_estimate(config.positions, config.alphabet_size)
    emit("resources", pos_bits=estimate.pos_bits, char_bits=estimate.char_bits,
         total_qubits=estimate.total_qubits)


# --- embeddings ---

def _emit_trace(reporter: TraceReporter) -> None:
    for record in reporter.records:
        emit("epoch", epoch=record.epoch, loss=record.loss, grad_norm=record.grad_norm)


def cmd_train_embed(config: RunConfig) -> None:
    sentences = CorpusCollector().collect_tokens(config.corpus or DEFAULT_EMBED_CORPUS)
    vocabulary = Vocabulary.from_sentences(sentences)
    corpus = [vocabulary.encode(s) for s in sentences]
    model = init_embedding_model(vocabulary, config.scheme,
                                 qubits=config.qubits or EMBEDDING_DEFAULTS["qubits"],
                                 layers=config.layers or EMBEDDING_DEFAULTS["layers"], seed=config.seed)
    sgns_config = SgnsConfig(
        window=config.window or EMBEDDING_DEFAULTS["window"],
        negatives=config.negatives or EMBEDDING_DEFAULTS["negatives"],
        epochs=config.epochs if config.epochs is not None else EMBEDDING_DEFAULTS["epochs"],
        learning_rate=config.learning_rate or OPTIMIZER_DEFAULTS["learning_rate"],
        seed=config.seed,
        gradient_method=config.gradient_method or "adjoint",
        threads=config.threads,
    )
    reporter = TraceReporter(name="train-embed")
    result = train_sgns(corpus, model, sgns_config, reporter)
    _emit_trace(reporter)
    reporter.log_summary()
    if config.out:
        save_embedding(result.model, config.out)
        emit("model", path=config.out, vocabulary=vocabulary.size, scheme=result.model.scheme.value)


def cmd_eval_embed(config: RunConfig) -> None:
    model = load_embedding(config.model)
    pairs = CorpusCollector().collect_pairs(config.pairs)
    for first, second, fidelity in pair_fidelities(model, pairs):
        emit("fidelity", first=first, second=second, value=fidelity)


# --- seqgen ---

def _seq_corpus(path: Optional[str]) -> SeqCorpus:
    if not path:
        return builtin_corpus()
    train, test = CorpusCollector().collect_sentences(path)
    return corpus_from_sentences(train, test)


def _split_ids(checkpoint: Checkpoint, corpus: SeqCorpus, split: str) -> List[List[int]]:
    """Sentences of a split re-encoded with the checkpoint's vocabulary"""
    return [checkpoint.vocabulary.encode(corpus.vocabulary.decode(s)) for s in corpus.split(split)]


def _emit_perplexity(checkpoint: Checkpoint, corpus: SeqCorpus, split: str) -> float:
    sentences = _split_ids(checkpoint, corpus, split)
    value = perplexity(checkpoint, sentences)
    emit("perplexity", split=split, arch=checkpoint.spec.architecture.value,
         nll=nll_loss(checkpoint, sentences), value=f"{value:.6f}")
    return value


def cmd_train_seq(config: RunConfig) -> None:
    corpus = _seq_corpus(config.corpus)
    train_config = SeqTrainConfig(
        epochs=config.epochs if config.epochs is not None else SEQGEN_DEFAULTS["epochs"],
        learning_rate=config.learning_rate or OPTIMIZER_DEFAULTS["learning_rate"],
        seed=config.seed,
        gradient_method=config.gradient_method or "adjoint",
        shots=config.shots,
        threads=config.threads,
    )
    checkpoint = init_checkpoint(builtin_spec(config.arch), corpus.vocabulary, train_config)
    reporter = TraceReporter(name="train-seq")
    result = train_seq(checkpoint, corpus.train, train_config, reporter)
    _emit_trace(reporter)
    reporter.log_summary()
    _emit_perplexity(result.checkpoint, corpus, "train")
    if corpus.test:
        held_out = _emit_perplexity(result.checkpoint, corpus, "test")
        target = SEQGEN_DEFAULTS["target_perplexity"]
        logger.info("held-out perplexity %.4f (target <= %.1f: %s)", held_out, target, "met" if held_out <= target else "missed")
    if config.out:
        save_checkpoint(result.checkpoint, config.out)
        emit("checkpoint", path=config.out, params=len(result.checkpoint.params))


def cmd_eval_seq(config: RunConfig) -> None:
    corpus = _seq_corpus(config.corpus)
    if config.ckpt:
        checkpoint = load_checkpoint(config.ckpt)
    else:
        arch = config.arch if "arch" in config.model_fields_set else "uniform"
        checkpoint = init_checkpoint(builtin_spec(arch), corpus.vocabulary, SeqTrainConfig(seed=config.seed))
    _emit_perplexity(checkpoint, corpus, config.split)


def cmd_generate(config: RunConfig) -> None:
    checkpoint = load_checkpoint(config.ckpt)
    prompt = checkpoint.vocabulary.encode((config.prompt or "").lower().split())
    tokens = generate(checkpoint, prompt, config.length, config.seed)
    emit("generated", prompt=repr(config.prompt or ""), tokens=repr(" ".join(checkpoint.vocabulary.decode(tokens))))


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "resources": cmd_resources,
    "train-embed": cmd_train_embed,
    "eval-embed": cmd_eval_embed,
    "train-seq": cmd_train_seq,
    "eval-seq": cmd_eval_seq,
    "generate": cmd_generate,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and return the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CODES["ok"] if exc.code == 0 else EXIT_CODES["usage"]

    _setup_logging(args.quiet)
    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = resolve_run_config(args.command, file_values, _flags(args))
        _print_effective(config)
        COMMANDS[args.command](config)
    except INPUT_ERRORS as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CODES["bad_input"]
    except QnlpError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CODES["failure"]
    except OSError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_CODES["bad_input"]
    return EXIT_CODES["ok"]


if __name__ == "__main__":
    sys.exit(run())
