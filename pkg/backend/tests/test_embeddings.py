import numpy as np
import pytest

from collectors.corpus_collector import CorpusCollector
from conftest import random_state
from embeddings.ansatz import AnsatzSpec, build_ansatz_circuit
from embeddings.heads import (
    head_ansatz,
    head_distribution,
    head_output,
    nll_objective,
    renormalize,
    skipgram_head_prob,
)
from embeddings.model import (
    EmbeddingScheme,
    init_embedding_model,
    load_embedding,
    memory_efficient_state,
    save_embedding,
    word_state,
)
from embeddings.sgns import SgnsConfig, generate_training_pairs, sgns_loss, sgns_objective, train_sgns
from embeddings.similarity import (
    ancilla_zero_probability,
    fidelity_exact,
    pair_fidelities,
    swap_test_estimate,
    swap_test_states,
)
from embeddings.vocabulary import Vocabulary
from embeddings.word2vec import (
    Word2VecConfig,
    cbow_examples,
    example_loss,
    init_head_params,
    predict_distribution,
    skipgram_examples,
    train_cbow,
    train_skipgram,
)
from errors import CheckpointError, CorpusError, DegenerateOutputError, ParameterError, SchemeError, VocabularyError
from simulator.circuit import ParameterVector

VOCAB = Vocabulary(tokens=("red", "green", "blue", "one", "two", "three"))
CORPUS = [[0, 1, 2], [2, 0, 1], [3, 4, 5], [5, 3, 4]]


def test_vocabulary():
    assert VOCAB.index_bits == 3
    assert VOCAB.encode(["blue", "one"]) == [2, 3]
    assert Vocabulary.from_sentences([["b", "a"], ["a", "c"]], first=["."]).tokens == (".", "b", "a", "c")
    with pytest.raises(VocabularyError):
        VOCAB.index("purple")
    with pytest.raises(VocabularyError):
        Vocabulary(tokens=("solo",))
    with pytest.raises(VocabularyError):
        Vocabulary(tokens=("a", "a"))


def test_ansatz_layout():
    spec = AnsatzSpec(qubits=3, layers=2)
    circuit = build_ansatz_circuit(spec)
    assert spec.num_params == 12
    assert list(circuit.param_names) == spec.param_names()
    assert len(circuit.ops) == 2 * (6 + 3)


def test_circuit_scheme_states_are_normalized():
    model = init_embedding_model(VOCAB, seed=1)
    for k in range(VOCAB.size):
        assert word_state(model, k).norm() == pytest.approx(1.0)


def test_memory_scheme_post_selection():
    vocabulary = Vocabulary(tokens=tuple(f"w{i}" for i in range(16)))
    model = init_embedding_model(vocabulary, EmbeddingScheme.MEMORY, qubits=2, layers=2, seed=4, init_range=1.0)
    assert model.register_width == 4
    state, success = memory_efficient_state(model, 5)
    assert state.width == 2
    assert 0.0 < success <= 1.0
    assert state.norm() == pytest.approx(1.0)


def test_swap_test_probability_equals_half_one_plus_fidelity():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a, b = random_state(2, rng), random_state(2, rng)
        p0 = ancilla_zero_probability(swap_test_states(a, b))
        assert abs(p0 - (1 + fidelity_exact(a, b)) / 2) < 1e-12


def test_swap_test_shot_estimate():
    rng = np.random.default_rng(9)
    hits = 0
    for trial in range(100):
        a, b = random_state(1, rng), random_state(1, rng)
        if abs(swap_test_estimate(a, b, 10_000, seed=trial) - fidelity_exact(a, b)) <= 0.02:
            hits += 1
    assert hits >= 95


def scheme_model(scheme: EmbeddingScheme):
    return init_embedding_model(VOCAB, scheme, qubits=2, layers=2, seed=2, init_range=1.0)


@pytest.mark.parametrize("scheme", list(EmbeddingScheme))
def test_word_state_swap_test_matches_fidelity(scheme):
    model = scheme_model(scheme)
    states = [word_state(model, k) for k in range(VOCAB.size)]
    for i, a in enumerate(states):
        for b in states[i:]:
            p0 = ancilla_zero_probability(swap_test_states(a, b))
            assert abs(p0 - (1 + fidelity_exact(a, b)) / 2) < 1e-12


@pytest.mark.parametrize("scheme", list(EmbeddingScheme))
def test_word_state_shot_estimate(scheme):
    model = scheme_model(scheme)
    states = [word_state(model, k) for k in range(VOCAB.size)]
    for i in range(VOCAB.size):
        for j in range(i + 1, VOCAB.size):
            estimate = swap_test_estimate(states[i], states[j], 10_000, seed=10 * i + j)
            # four standard deviations of the 10^4-shot estimator
            assert abs(estimate - fidelity_exact(states[i], states[j])) <= 0.04


def test_sgns_objective_values():
    assert sgns_objective(1.0, [0.0]) == pytest.approx(0.0, abs=1e-8)
    assert sgns_objective(0.5, []) == pytest.approx(np.log(2), rel=1e-8)


def test_training_pairs_exclude_target_window():
    config = SgnsConfig(window=1, negatives=3, seed=2)
    pairs = generate_training_pairs(CORPUS, config, VOCAB.size)
    assert len(pairs) == 4 * 4
    for pair in pairs:
        assert pair.target not in pair.negatives
    assert pairs == generate_training_pairs(CORPUS, config, VOCAB.size)
    with pytest.raises(CorpusError):
        generate_training_pairs([[0]], config, VOCAB.size)


def test_sgns_gradients_match_finite_differences():
    model = init_embedding_model(VOCAB, seed=3, init_range=1.0)
    result = sgns_loss(model, 0, 1, [3, 4])
    step = 1e-5
    for word in (0, 1, 3):
        for j in range(model.ansatz.num_params):
            values = model.flat_params()
            offset = word * model.ansatz.num_params + j
            values[offset] += step
            up = sgns_loss(model.with_flat_params(values), 0, 1, [3, 4]).loss
            values[offset] -= 2 * step
            down = sgns_loss(model.with_flat_params(values), 0, 1, [3, 4]).loss
            assert result.word_grads[word][j] == pytest.approx((up - down) / (2 * step), abs=1e-6)
    with pytest.raises(ParameterError):
        sgns_loss(model, 0, 1, [0])


def test_sgns_training_reduces_loss():
    model = init_embedding_model(VOCAB, seed=0, init_range=1.0)
    result = train_sgns(CORPUS, model, SgnsConfig(window=2, negatives=2, epochs=15, learning_rate=0.1, seed=0))
    assert len(result.history) == 15
    assert min(result.history[1:]) < result.history[0]


def test_memory_scheme_sgns_uses_shared_gradient():
    model = init_embedding_model(VOCAB, EmbeddingScheme.MEMORY, qubits=3, layers=1, seed=1, init_range=1.0)
    result = sgns_loss(model, 0, 1, [3])
    assert result.word_grads == {}
    assert result.shared_grad.shape == (len(model.shared_params),)


def mean_fidelities(model):
    positives, negatives = [], []
    for a in range(6):
        for b in range(a + 1, 6):
            fidelity = fidelity_exact(word_state(model, a), word_state(model, b))
            (positives if (a < 3) == (b < 3) else negatives).append(fidelity)
    return np.mean(positives), np.mean(negatives)


@pytest.mark.slow
def test_two_cluster_corpus_separates(sample_path):
    sentences = CorpusCollector().collect_tokens(sample_path("toy_corpus.txt"))
    vocabulary = Vocabulary.from_sentences(sentences)
    assert vocabulary.tokens == ("red", "green", "blue", "one", "two", "three")
    corpus = [vocabulary.encode(s) for s in sentences]
    separated = 0
    for seed in range(5):
        model = init_embedding_model(vocabulary, seed=seed, init_range=1.0)
        config = SgnsConfig(window=2, negatives=2, epochs=60, learning_rate=0.1, seed=seed)
        trained = train_sgns(corpus, model, config).model
        positive, negative = mean_fidelities(trained)
        if positive - negative >= 0.1:
            separated += 1
    assert separated >= 4


def test_embedding_checkpoint_round_trip(tmp_path):
    for scheme in EmbeddingScheme:
        model = init_embedding_model(VOCAB, scheme, seed=6)
        path = str(tmp_path / f"{scheme.value}.json")
        save_embedding(model, path)
        assert load_embedding(path) == model
    (tmp_path / "bad.json").write_text('{"format": "qnlp-embedding", "version": 1, "payload": {"scheme": "x"}}')
    with pytest.raises(CheckpointError):
        load_embedding(str(tmp_path / "bad.json"))


@pytest.mark.parametrize("scheme", list(EmbeddingScheme))
def test_pair_fidelities_are_symmetric(scheme):
    model = scheme_model(scheme)
    rows = pair_fidelities(model, [("red", "one"), ("one", "red"), ("red", "red")])
    assert rows[0][2] == pytest.approx(rows[1][2])
    assert rows[2][2] == pytest.approx(1.0)


def test_head_distribution_is_renormalized():
    model = init_embedding_model(VOCAB, seed=5, init_range=1.0)
    head = init_head_params(model, layers=2, seed=5, init_range=1.0)
    assert len(head) == head_ansatz(model, 2).num_params
    raw = head_output(model, head, word_state(model, 0))
    probs = head_distribution(model, head, word_state(model, 0))
    assert raw.sum() == pytest.approx(1.0)
    assert probs.sum() == pytest.approx(1.0)
    assert probs[2] == pytest.approx(raw[2] / raw[:6].sum())
    assert skipgram_head_prob(model, head, word_state(model, 0), 7) == pytest.approx(raw[7])
    with pytest.raises(VocabularyError):
        skipgram_head_prob(model, head, word_state(model, 0), 8)


def test_renormalize_rejects_dead_vocabulary():
    with pytest.raises(DegenerateOutputError):
        renormalize(np.array([0.0, 0.0, 1.0, 0.0]), 2)
    value, cotangent = nll_objective(2, 0)(np.array([0.25, 0.25, 0.5, 0.0]))
    assert value == pytest.approx(np.log(2))
    assert cotangent[2] == 0.0


def test_skipgram_and_cbow_examples():
    assert skipgram_examples([[0, 1, 2]], 1) == [((0,), 1), ((1,), 0), ((1,), 2), ((2,), 1)]
    assert cbow_examples([[0, 1, 2]], 1) == [((1,), 0), ((0, 2), 1), ((1,), 2)]


def test_skipgram_and_cbow_training():
    model = init_embedding_model(VOCAB, seed=7, init_range=1.0)
    head = init_head_params(model, seed=7, init_range=1.0)
    config = Word2VecConfig(window=1, epochs=10, learning_rate=0.1, seed=7)
    for trainer in (train_skipgram, train_cbow):
        result = trainer(CORPUS, model, head, config)
        assert len(result.history) == 10
        assert min(result.history[1:]) < result.history[0]
    trained = train_skipgram(CORPUS, model, head, config)
    probs = predict_distribution(trained.model, trained.head_params, [0])
    assert probs.sum() == pytest.approx(1.0)
    assert example_loss(trained.model, trained.head_params, [0], 1) == pytest.approx(-np.log(probs[1]))


def test_single_word_cbow_matches_skipgram():
    corpus = [[0, 1], [2, 3]]
    model = init_embedding_model(VOCAB, seed=11, init_range=1.0)
    head = init_head_params(model, seed=11, init_range=1.0)
    config = Word2VecConfig(window=1, epochs=4, learning_rate=0.1, seed=11)
    assert sorted(cbow_examples(corpus, 1)) == sorted(skipgram_examples(corpus, 1))
    cbow = train_cbow(corpus, model, head, config)
    skipgram = train_skipgram(corpus, model, head, config)
    assert np.allclose(cbow.history, skipgram.history, atol=1e-10)
    assert np.allclose(cbow.head_params.values, skipgram.head_params.values, atol=1e-8)


def test_heads_need_circuit_scheme():
    model = init_embedding_model(VOCAB, EmbeddingScheme.MEMORY, seed=1)
    with pytest.raises(SchemeError):
        train_skipgram(CORPUS, model, ParameterVector.of([0.0] * 12), Word2VecConfig(epochs=1))
