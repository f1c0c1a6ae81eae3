import json

import numpy as np
import pytest

from jsrforge import constants as C
from jsrforge.cli import main
from jsrforge.polytope import Certificate


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pair_file(tmp_path):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"A": C.A0.tolist(), "B": C.B0.tolist()}))
    return str(p)


def test_fricke(capsys):
    code, out, _ = run(["fricke", "a2bab2"], capsys)
    assert code == 0
    assert out.strip() == "-x^2*z*v + x*y*z^2 - y^2*z*u + z*u*v"


def test_fricke_json(capsys):
    code, out, _ = run(["fricke", "aab", "--json"], capsys)
    doc = json.loads(out)
    assert doc["polynomial"] == "x*z - y*u"


def test_words_counts(capsys):
    assert run(["words", "--max-len", "14", "--count"], capsys)[1].strip() == "2538"
    assert run(["words", "--max-len", "14", "--dedup", "--count"], capsys)[1].strip() == "1549"
    assert run(["words", "--chiral", "--max-len", "9", "--count"], capsys)[1].strip() == "23"


def test_words_fraction_json(capsys):
    doc = json.loads(run(["words", "--fraction", "10", "--json"], capsys)[1])
    assert (doc["numerator"], doc["denominator"]) == (20, 33)


def test_realize_round_trip(capsys, tmp_path):
    out_file = tmp_path / "p.json"
    t = [str(c) for c in C.TABLE[0][1]]
    code, _, _ = run(["realize", *t, "--out", str(out_file)], capsys)
    assert code == 0
    doc = json.loads(out_file.read_text())
    A, B = np.array(doc["A"]), np.array(doc["B"])
    assert np.trace(A @ B) == pytest.approx(C.TABLE[0][1][2])


def test_bounds(pair_file, capsys):
    code, out, _ = run(["bounds", "--pair", pair_file, "-k", "8", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["lower"] <= doc["upper"]


def test_certify_json_round_trip(pair_file, capsys, tmp_path):
    cert_file = tmp_path / "cert.json"
    code, _, _ = run(
        ["certify", "--pair", pair_file, "--smp", "a2bab2,b2aba2", "--ratios", "1,0.885", "--out", str(cert_file)],
        capsys,
    )
    assert code == 0
    doc = json.loads(cert_file.read_text())
    cert = Certificate.from_json(doc)
    assert cert.verdict == "certified-unique-pair"
    assert cert.to_json() == doc


def test_example_command(capsys):
    code, out, _ = run(["paper-example", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["verdict"] == "certified-unique-pair"
    assert doc["n_vertices"] == 32


def test_example_command_perturbed(capsys):
    code, out, _ = run(["paper-example", "--perturb-b21", "0.005", "--json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["chiral_pair"]["verdict"] == "failed"
    assert doc["runner_up"]["unique"]


def test_search_csv_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        code, _, _ = run(["search", "--samples", "1000", "--seed", "7", "--out", str(f)], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("sample_index,x,y,z,u,v,best_word,normalized_rho,gap,status")


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["fricke", "aab"], 0),
        (["realize", "0", "0", "0", "1", "1"], 1),
        (["certify", "--pair", "PAIR", "--smp", "ab"], 1),
        (["fricke", "abc"], 2),
        (["fricke"], 2),
        (["bogus"], 2),
        (["bounds", "--pair", "PAIR", "-k", "0"], 2),
        (["bounds", "--pair", "/nonexistent.json"], 2),
        (["certify", "--pair", "PAIR", "--smp", "a2bab2", "--ratios", "1,2"], 2),
        (["search", "--samples", "0"], 2),
        (["words", "--fraction", "99"], 2),
        (["fricke", "aab", "--no-such-flag"], 2),
    ],
)
def test_exit_codes(argv, expected, pair_file, capsys):
    argv = [pair_file if a == "PAIR" else a for a in argv]
    assert run(argv, capsys)[0] == expected
