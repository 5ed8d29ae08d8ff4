import pytest

from cli import run
from simulator.serialization import load_circuit


def records(output: str, kind: str):
    return [line for line in output.splitlines() if line.startswith(kind + " ")]


def test_encode_prints_layout_and_amplitudes(capsys):
    assert run(["encode", "--text", "cab", "--alphabet", "abc"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "seed value=0"
    assert records(out, "layout") == ["layout positions=4 pos_bits=2 char_bits=2 total_qubits=4"]
    amplitudes = records(out, "amplitude")
    assert len(amplitudes) == 4
    assert "position=3 char=' ' real=" in amplitudes[0]
    assert "QCIRCUIT v1 width=4" in out


def test_encode_writes_circuit_file(tmp_path, capsys):
    path = tmp_path / "cab.qc"
    assert run(["encode", "--text", "cab", "--alphabet", "abc", "--circuit-out", str(path)]) == 0
    assert load_circuit(path).width == 4
    assert records(capsys.readouterr().out, "circuit")[0].startswith(f"circuit path={path}")


def test_decode_is_reproducible(capsys):
    argv = ["decode", "--text", "cab", "--alphabet", "abc", "--shots", "2000", "--seed", "4"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert records(first, "text") == ["text value='cab '"]


def test_resources(capsys):
    assert run(["resources", "--positions", "3.6e12", "--alphabet-size", "149813"]) == 0
    assert records(capsys.readouterr().out, "resources") == ["resources pos_bits=42 char_bits=18 total_qubits=60"]


def test_uniform_perplexity_by_default(capsys):
    assert run(["eval-seq"]) == 0
    [line] = records(capsys.readouterr().out, "perplexity")
    assert line.startswith("perplexity split=test arch=uniform")
    assert line.endswith("value=11.000000")


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("qnlp-config v1\n# evaluate on train\nseed = 3\nsplit = train\n")
    assert run(["eval-seq", "--config", str(config), "--seed", "9"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "seed value=9"
    assert "split=train" in records(out, "perplexity")[0]


def test_sample_config_file_is_valid(sample_path, capsys):
    assert run(["eval-seq", "--config", sample_path("train_seq.conf")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "seed value=3"
    assert "arch=proposed" in records(out, "perplexity")[0]


@pytest.mark.parametrize("argv", [
    ["encode"],
    ["encode", "--text", "cab", "--bogus"],
    ["transpile"],
    ["eval-seq", "--split", "dev"],
])
def test_usage_errors_exit_two(argv):
    assert run(argv) == 2


def test_bad_input_files_exit_three(tmp_path, capsys):
    assert run(["eval-embed", "--model", str(tmp_path / "none.json"), "--pairs", str(tmp_path / "p.txt")]) == 3
    assert run(["train-embed", "--corpus", str(tmp_path / "none.txt")]) == 3
    assert run(["eval-seq", "--config", str(tmp_path / "none.conf")]) == 3
    bad = tmp_path / "bad.conf"
    bad.write_text("seed = 1\n")
    assert run(["eval-seq", "--config", str(bad)]) == 3
    bad.write_text("qnlp-config v1\ncolour = red\n")
    assert run(["eval-seq", "--config", str(bad)]) == 3
    assert "ConfigError" in capsys.readouterr().err
    zebra = tmp_path / "zebra.txt"
    zebra.write_text("the cat sat\nthe dog sat\n---\nthe zebra sat\n")
    assert run(["train-seq", "--corpus", str(zebra), "--epochs", "1"]) == 3
    assert "CorpusError" in capsys.readouterr().err


def test_computation_errors_exit_four():
    assert run(["encode", "--text", "xyz", "--alphabet", "abc"]) == 4


def test_train_embed_then_eval(tmp_path, sample_path, capsys):
    model = tmp_path / "emb.json"
    assert run(["train-embed", "--epochs", "2", "--qubits", "2", "--layers", "1", "--out", str(model)]) == 0
    out = capsys.readouterr().out
    assert len(records(out, "epoch")) == 2
    assert records(out, "model")[0].endswith("vocabulary=6 scheme=circuit")
    assert run(["eval-embed", "--model", str(model), "--pairs", sample_path("toy_pairs.txt")]) == 0
    fidelities = records(capsys.readouterr().out, "fidelity")
    assert len(fidelities) == 7
    assert fidelities[0].startswith("fidelity first=red second=green value=")


def test_train_seq_then_generate(tmp_path, sample_path, capsys):
    ckpt = tmp_path / "seq.json"
    argv = ["train-seq", "--corpus", sample_path("seq_corpus.txt"), "--epochs", "2", "--out", str(ckpt)]
    assert run(argv) == 0
    out = capsys.readouterr().out
    assert len(records(out, "epoch")) == 2
    assert [line.split()[1] for line in records(out, "perplexity")] == ["split=train", "split=test"]
    assert records(out, "checkpoint")[0].endswith("params=172")

    generate = ["generate", "--ckpt", str(ckpt), "--prompt", "the cat", "--length", "4", "--seed", "2"]
    assert run(generate) == 0
    [first] = records(capsys.readouterr().out, "generated")
    assert first.startswith("generated prompt='the cat' tokens=")
    assert run(generate) == 0
    assert records(capsys.readouterr().out, "generated") == [first]

    assert run(["eval-seq", "--ckpt", str(ckpt), "--split", "train"]) == 0
    assert "arch=proposed" in records(capsys.readouterr().out, "perplexity")[0]
    assert run(["generate", "--ckpt", str(ckpt), "--prompt", "unicorn"]) == 4
