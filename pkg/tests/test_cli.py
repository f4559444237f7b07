import csv
import io
import shutil
import subprocess

import numpy as np
import pytest

from ccspectra.cli import main
from ccspectra.complex import dump, load
from ccspectra.datasets import fig4_pair


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.fixture
def fig4(tmp_path):
    p = fig4_pair()
    dump(p.left, tmp_path / "A.cc")
    dump(p.right, tmp_path / "B.cc")
    return tmp_path / "A.cc", tmp_path / "B.cc"


def test_validate(capsys, fig4, tmp_path):
    assert run(capsys, "validate", fig4[0])[0] == 0
    bad = tmp_path / "bad.cc"
    bad.write_text('{"vertices": [1, 2], "cells": [{"vertices": [1, 2], "rank": 0}]}')
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "invalid" in err
    broken = tmp_path / "broken.cc"
    broken.write_text("{not json")
    assert run(capsys, "validate", broken)[0] == 1
    assert run(capsys, "validate", tmp_path / "missing.cc")[0] == 2


def test_laplacian_signed_fig4(capsys, fig4):
    code, out, _ = run(capsys, "laplacian", fig4[0], "--convention", "signed")
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["", "1", "2", "3"]
    M = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    expected = np.array([[1.125, -1.125, -0.125], [-1.125, 1.125, 0.125], [-0.125, 0.125, 0.125]])
    np.testing.assert_array_equal(M, expected)


def test_laplacian_hodge0_identical(capsys, fig4):
    _, a, _ = run(capsys, "laplacian", fig4[0], "--laplacian", "hodge:0")
    _, b, _ = run(capsys, "laplacian", fig4[1], "--laplacian", "hodge:0")
    assert a == b
    _, c, _ = run(capsys, "laplacian", fig4[0], "--laplacian", "hodge:4")
    assert read_csv(c) == [["", "1-2-3@4"], ["1-2-3@4", "0.0"]]


def test_laplacian_bad_rank(capsys, fig4):
    assert run(capsys, "laplacian", fig4[1], "--laplacian", "hodge:3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["laplacian", str(fig4[1]), "--convention", "nope"])
    assert exc.value.code == 2


def test_hks_output(capsys, fig4, tmp_path):
    code, out, _ = run(capsys, "hks", fig4[0], "--d", "4")
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["vertex", "t_1", "t_2", "t_3", "t_4"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
    vals = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    assert np.all((vals > 0) & (vals <= 1))
    target = tmp_path / "out" / "h.csv"
    assert run(capsys, "hks", fig4[0], "--d", "4", "--out", target)[0] == 0
    assert target.read_text() == out


def test_gen_fig4(capsys, tmp_path):
    assert run(capsys, "gen", "fig4", "--out", tmp_path)[0] == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["A.cc", "B.cc"]
    assert load(tmp_path / "A.cc") == fig4_pair().left


def test_gen_torus(capsys, tmp_path):
    assert run(capsys, "gen", "torus", "--m", 3, "--n", 3, "--out", tmp_path)[0] == 0
    assert load(tmp_path / "torus_3x3.cc").n_cells == 36
    assert run(capsys, "gen", "torus", "--m", 3, "--n", 4, "--aug", "4:0,1", "--out", tmp_path)[0] == 0
    assert load(tmp_path / "torus_3x4.cc").n_cells == 49
    assert run(capsys, "gen", "torus", "--aug", "4:0", "--out", tmp_path)[0] == 2
    assert run(capsys, "gen", "torus", "--m", 2, "--out", tmp_path)[0] == 2


def test_gen_corpus_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "gen", "blindspot-corpus", "--count", 50, "--seed", 7, "--out", a)[0] == 0
    run(capsys, "gen", "blindspot-corpus", "--count", 50, "--seed", 7, "--out", b)
    files = sorted(p.name for p in a.iterdir())
    assert len([f for f in files if f.endswith(".cc")]) == 100
    assert len((a / "manifest.csv").read_text().splitlines()) == 51
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_distinguish_pair(capsys, fig4):
    code, out, _ = run(capsys, "distinguish", *fig4)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["pair_id", "spectral_distance", "descriptor_distance", "verdict", "oracle_isomorphic"]
    assert rows[1][3] == "Distinguished" and rows[1][4] == "false"
    code, out, _ = run(capsys, "distinguish", *fig4, "--laplacian", "hodge:0")
    assert code == 1 and read_csv(out)[1][3] == "Indistinguishable"
    assert run(capsys, "distinguish", fig4[0], fig4[0])[0] == 0


def test_distinguish_input_errors(capsys, fig4, tmp_path):
    assert run(capsys, "distinguish", fig4[0])[0] == 2
    assert run(capsys, "distinguish", fig4[0], tmp_path / "nope.cc")[0] == 2
    assert run(capsys, "distinguish", "--manifest", tmp_path / "nope.csv")[0] == 2


def test_distinguish_manifest(capsys, tmp_path):
    run(capsys, "gen", "blindspot-corpus", "--count", 6, "--max-size", 3, "--out", tmp_path)
    code, out, err = run(capsys, "distinguish", "--manifest", tmp_path / "manifest.csv", "--oracle", "--threads", 2)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 7 and rows[0][-1] == "oracle_isomorphic"
    assert all(r[3] == "Distinguished" and r[4] == "false" for r in rows[1:])
    assert "accuracy=1.0000" in err and "baseline_hodge0=0.0000" in err
    code, _, _ = run(capsys, "distinguish", "--manifest", tmp_path / "manifest.csv", "--laplacian", "hodge:0")
    assert code == 1


def test_bench(capsys):
    assert run(capsys, "bench", "--reps", 0)[0] == 2
    assert run(capsys, "bench", "--sizes", "a,b")[0] == 2
    code, out, _ = run(capsys, "bench", "--sizes", "9,16", "--reps", 1)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["n_vertices", "n_cells", "build_ms", "eig_ms", "hks_ms", "repetitions"]
    assert [(r[0], r[1]) for r in rows[1:]] == [("9", "36"), ("16", "64")]
    code, out, _ = run(capsys, "bench", "--sizes", "9", "--reps", 1, "--kernels")
    assert code == 0
    kinds = {r[0] for r in read_csv(out)[1:]}
    assert kinds == {"signed_gram", "comember_laplacian", "pair_energy", "iso_search"}


@pytest.mark.skipif(shutil.which("ccspectra") is None, reason="console script not installed")
def test_console_script(fig4):
    res = subprocess.run(["ccspectra", "distinguish", *map(str, fig4)], capture_output=True, text=True)
    assert res.returncode == 0 and "Distinguished" in res.stdout
