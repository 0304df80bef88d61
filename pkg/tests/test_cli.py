from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np
import pytest

from rankstab import Diagram, MetricKind, pairwise_distances, parse_landscape, read_diagram
from rankstab.cli import EXPECTED_LABEL, main

DATA = Path(__file__).parent / "data"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


# -- compute ----------------------------------------------------------------------


def test_compute_hollow_triangle(tmp_path):
    code, out = run("compute", DATA / "triangle.cplx", "-o", tmp_path)
    assert code == 0
    assert (tmp_path / "triangle.H1.dgm").read_text() == "1 2 1\n"
    assert str(tmp_path / "triangle.H0.dgm") in out


def test_compute_single_vertex_and_options(tmp_path):
    assert run("compute", DATA / "vertex.cplx", "-o", tmp_path)[0] == 0
    assert (tmp_path / "vertex.H0.dgm").read_text() == "0 2 1\n"
    assert run("compute", DATA / "vertex.cplx", "-o", tmp_path, "--horizon", 1, "--stem", "h1")[0] == 0
    assert (tmp_path / "h1.H0.dgm").read_text() == "0 1 1\n"
    code, _ = run("compute", DATA / "witness.cplx", DATA / "witness.w", "--degree", 0, "-o", tmp_path)
    assert code == 0
    assert read_diagram(tmp_path / "witness.H0.dgm") == Diagram([(0, 2), (0, 1)])


def test_compute_errors(tmp_path, capsys):
    assert run("compute", tmp_path / "missing.cplx")[0] == 2
    assert "missing.cplx" in capsys.readouterr().err
    bad = tmp_path / "bad.cplx"
    bad.write_text("0 1\nu 0 0.5\nv 0 0\ne 1 0.2 u v\n")
    assert run("compute", bad, "-o", tmp_path)[0] == 3
    bad.write_text("0 1\nu zero 0\n")
    assert run("compute", bad, "-o", tmp_path)[0] == 2


# -- dist -------------------------------------------------------------------------


def test_dist_examples():
    assert run("dist", DATA / "two.dgm", DATA / "two.dgm") == (0, "0\n")
    assert run("dist", DATA / "one.dgm", DATA / "empty.dgm") == (0, "2\n")
    assert run("dist", DATA / "one.dgm", DATA / "shifted.dgm") == (0, "3\n")
    assert run("dist", DATA / "one.dgm", DATA / "shifted.dgm", "--metric", "dim") == (0, "2\n")
    assert run("dist", DATA / "one.dgm", DATA / "shifted.dgm", "--metric", "rank", "--metric-p", 2) == (0, f"{math.sqrt(3):.12g}\n")
    assert run("dist", DATA / "two.dgm", DATA / "one.dgm", "--wasserstein-p", "inf", "--metric", "linf") == (0, "1\n")


def test_dist_coupling():
    code, out = run("dist", DATA / "one.dgm", DATA / "shifted.dgm", "--coupling")
    assert code == 0 and out == "3\n0 2 -> 1 3\n"


def test_dist_signed():
    assert run("dist", DATA / "signed.dgm", DATA / "empty.dgm") == (0, "1.5\n")
    assert run("dist", DATA / "signed.dgm", DATA / "empty.dgm", "--wasserstein-p", 2)[0] == 4


def test_dist_usage_errors():
    assert run("dist", DATA / "one.dgm")[0] == 2
    assert run("dist", DATA / "one.dgm", DATA / "one.dgm", "--metric", "foo")[0] == 2
    assert run("dist", DATA / "one.dgm", DATA / "one.dgm", "--wasserstein-p", "0.5")[0] == 2
    assert run("dist", DATA / "one.dgm", DATA / "one.dgm", "--metric", "lp")[0] == 2


# -- landscape --------------------------------------------------------------------


def test_landscape_examples(tmp_path):
    assert run("landscape", DATA / "one.dgm") == (0, "0 0\n1 1\n2 0\n")
    assert run("landscape", DATA / "one.dgm", "--dist", DATA / "empty.dgm") == (0, "1\n")
    assert run("landscape", DATA / "empty.dgm") == (0, "")
    code, _ = run("landscape", DATA / "two.dgm", "-o", tmp_path / "two.pl")
    assert code == 0
    assert len(parse_landscape((tmp_path / "two.pl").read_text())) == 2
    assert run("landscape", DATA / "signed.dgm")[0] == 4


# -- verify -----------------------------------------------------------------------


def test_verify_landscape_suite():
    code, out = run("verify", "--suite", "landscape", "--seed", 7, "--trials", 100)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 100 and all(l.startswith("PASS") for l in lines)


def test_verify_is_deterministic():
    for suite in ("barcode", "graded", "coupling", "landscape", "wp"):
        a = run("verify", "--suite", suite, "--seed", 3, "--trials", 5)
        b = run("verify", "--suite", suite, "--seed", 3, "--trials", 5)
        assert a == b and a[1]


def test_verify_witness_at_small_horizon():
    code, out = run("verify", "--suite", "barcode", "--horizon", 1, DATA / "witness.cplx", DATA / "witness.w")
    assert code == 1
    failing = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert failing and all(l.endswith(EXPECTED_LABEL) for l in failing)
    code, out = run("verify", "--suite", "barcode", DATA / "witness.cplx", DATA / "witness.w")
    assert code == 0 and EXPECTED_LABEL not in out


def test_verify_trivial_and_errors():
    assert run("verify", "--suite", "coupling", "--trials", 0) == (0, "")
    assert run("verify", "--suite", "nope")[0] == 2
    assert run("verify", "--suite", "coupling", DATA / "one.dgm")[0] == 2
    assert run("verify", "--suite", "landscape", DATA / "two.dgm", DATA / "one.dgm")[0] == 0
    assert run("verify", "--suite", "graded", DATA / "two.dgm", DATA / "one.dgm")[0] == 0


# -- ball -------------------------------------------------------------------------


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0] == "y1,y2"
    return np.array([[float(x) for x in l.split(",")] for l in lines[1:]])


def test_ball_corners():
    code, out = run("ball", "--center", 0, 2, "--radius", 1, "--samples", 4)
    assert code == 0
    P = parse_csv(out)
    s, t = math.sqrt(6) - 2, 2 - math.sqrt(2)
    assert np.allclose(P, [(t, 2), (0, 2 + s), (-s, 2), (0, math.sqrt(2))], atol=1e-12, rtol=0)


@pytest.mark.parametrize("metric", ["rank", "dim", "linf"])
def test_ball_points_on_level_set(metric):
    code, out = run("ball", "--center", 0, 2, "--radius", 1, "--metric", metric, "--samples", 100)
    P = parse_csv(out)
    d = pairwise_distances(P, [(0, 2)], MetricKind.parse(metric))[:, 0]
    assert code == 0 and np.max(np.abs(d - 1)) <= 1e-6


def test_ball_diagonal_center_dim():
    code, out = run("ball", "--center", 1, 1, "--radius", 1, "--metric", "dim", "--samples", 64)
    P = parse_csv(out)
    assert code == 0 and np.allclose(P[:, 1] - P[:, 0], 1.0)


def test_ball_rejects_nonpositive_radius():
    assert run("ball", "--center", 0, 2, "--radius", 0)[0] == 4
    assert run("ball", "--center", 0, 2, "--radius", -1)[0] == 4
