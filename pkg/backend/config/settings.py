"""
Configuration settings for the quantum NLP toolkit
Contains all constants, tolerances, and default hyperparameters
"""

import os

# Statevector simulator limits and tolerances
SIMULATOR_CONFIG = {
    "max_qubits": 24,  # desk-scale cap: 2^24 complex128 amplitudes = 256 MiB
    "norm_tolerance": 1e-10,
    "impossible_outcome": 1e-12,  # post-selection mass below this is an error
    "dense_unitary_max_qubits": 10
}

# Adaptive-moment optimizer defaults
OPTIMIZER_DEFAULTS = {
    "learning_rate": 0.05,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1e-8
}

# Gradient settings
GRADIENT_CONFIG = {
    "finite_diff_step": 1e-5,
    "finite_diff_min_step": 1e-7,
    "finite_diff_max_step": 1e-3,
    "vanishing_grad_norm": 1e-6  # below this the trace reporter warns (barren plateau)
}

# Quantum word2vec defaults
EMBEDDING_DEFAULTS = {
    "qubits": 3,
    "layers": 2,
    "head_layers": 2,
    "init_range": 0.1,  # parameters start uniform in (-0.1, 0.1)
    "sgns_epsilon": 1e-9,
    "min_success_probability": 1e-9,
    "window": 2,
    "negatives": 2,
    "epochs": 60
}

# Sequence generator defaults
SEQGEN_DEFAULTS = {
    "boundary_token": ".",
    "pad_token_id": 0,
    "max_rejections": 1000,
    "min_vocab_mass": 1e-9,
    "probability_floor": 1e-12,
    "test_sentences": 2,
    "split_marker": "---",
    "init_range": 0.1,
    "epochs": 150,
    "target_perplexity": 4.0
}

# QPOSTR string encoding
QPOSTR_CONFIG = {
    "padding_char": " ",
    "builtin_alphabets": ["abc", "lowercase", "ascii"],
    "default_shots": 10000,
    "max_shots": 1_000_000
}

# Server Configuration
SERVER_CONFIG = {
    "host": "127.0.0.1",
    "port": 8000,
    "debug": True
}

# CLI exit codes
EXIT_CODES = {
    "ok": 0,
    "usage": 2,
    "bad_input": 3,
    "failure": 4
}

# Environment variable holding the default worker-thread count
THREADS_ENV_VAR = "QNLP_THREADS"


def default_threads() -> int:
    """Worker threads for parallel loss/sampling evaluation (>= 1)"""
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1

# Shipped corpora, pair lists and alphabets
SAMPLE_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))),
                               "sample_data")
