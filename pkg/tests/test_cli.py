import json

import pytest

from alcove.cli import main


def _cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


A2_MACDONALD = {
    "root_system": {"label": "A", "rank": 2},
    "cfunctions": {"family": "macdonald", "g": 1.3, "q": 0.5},
    "weights": {"tops": [[1, 1]]},
    "seed": 1,
    "n_spectral_points": 3,
    "max_lambdas": 1,
}


def test_verify_appendix_a(tmp_path):
    cfg = _cfg(tmp_path, "a2.json", A2_MACDONALD)
    out = tmp_path / "rep.json"
    assert main(["verify", "--suite", "appendixA", "--config", cfg,
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] and rep["version"]
    assert all(c["pass"] for c in rep["checks"])
    assert rep["config"] == A2_MACDONALD  # provenance embedded


def test_verify_orthonormality_and_smatrix(tmp_path):
    cfg = _cfg(tmp_path, "a2.json", A2_MACDONALD)
    assert main(["verify", "--suite", "orthonormality", "--config", cfg,
                 "--out", str(tmp_path / "o.json")]) == 0
    assert main(["verify", "--suite", "smatrix", "--config", cfg,
                 "--out", str(tmp_path / "s.json")]) == 0


def test_verify_free_laplacian_bc1(tmp_path):
    cfg = _cfg(tmp_path, "bc1.json", {
        "root_system": {"label": "BC", "rank": 1},
        "cfunctions": {"family": "unit"},
        "weights": {"max_height": 6}})
    out = tmp_path / "f.json"
    assert main(["verify", "--suite", "free-laplacian", "--config", cfg,
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    names = [c["check"] for c in rep["checks"]]
    assert any("hard wall" in n for n in names)


def test_parameter_rejection_exit_code(tmp_path):
    cfg = _cfg(tmp_path, "bad.json", {
        "root_system": {"label": "A", "rank": 2},
        "cfunctions": {"family": "macdonald", "g": -1, "q": 0.5}})
    assert main(["verify", "--suite", "orthonormality", "--config", cfg]) == 2


def test_budget_exit_code(tmp_path):
    cfg = _cfg(tmp_path, "e7.json", {
        "root_system": {"label": "E", "rank": 7},
        "cfunctions": {"family": "unit"},
        "weights": {"tops": [[1, 0, 0, 0, 0, 0, 0]]}})
    assert main(["verify", "--suite", "orthonormality", "--config", cfg]) == 3


def test_scatter_ray_csv(tmp_path):
    cfg = _cfg(tmp_path, "ray.json", {
        "root_system": {"label": "A", "rank": 1},
        "cfunctions": {"family": "macdonald", "g": 2.0, "q": 0.5},
        "task": {"ray": {"direction": [1], "steps": 6}}})
    out = tmp_path / "ray.csv"
    assert main(["scatter", "--ray", "--config", cfg, "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "lambda,m,norm"
    norms = [float(r.split(",")[2]) for r in rows[1:]]
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_export_polynomials_deterministic(tmp_path):
    cfg = _cfg(tmp_path, "a2.json", A2_MACDONALD)
    for d in ("x1", "x2"):
        assert main(["export", "polynomials", "--config", cfg,
                     "--out", str(tmp_path / d)]) == 0
    a = (tmp_path / "x1" / "polynomials.json").read_bytes()
    b = (tmp_path / "x2" / "polynomials.json").read_bytes()
    assert a == b


def test_export_operator_and_smatrix(tmp_path):
    cfg = _cfg(tmp_path, "bc2.json", {
        "root_system": {"label": "BC", "rank": 2},
        "cfunctions": {"family": "koornwinder", "ghat": 1.1,
                       "g0123": [0.9, 0.7, 0.6, 0.8], "q": 0.45},
        "weights": {"tops": [[2, 1]]},
        "grid": {"M": 32}})
    assert main(["export", "operator", "--config", cfg,
                 "--out", str(tmp_path / "op")]) == 0
    text = (tmp_path / "op" / "operator.csv").read_text().splitlines()
    assert text[0] == "row_weight,col_weight,value_re,value_im"
    # symmetric CSV matrix: collect entries and check hermiticity
    entries = {}
    for line in text[1:]:
        r, c, re, im = line.split(",")
        entries[(r, c)] = complex(float(re), float(im))
    sites = {r for r, _ in entries}
    import numpy as np
    for (r, c), v in entries.items():
        assert abs(entries.get((c, r), 0) - np.conj(v)) < 1e-10
    assert main(["export", "smatrix", "--config", cfg,
                 "--out", str(tmp_path / "sm")]) == 0
    lines = (tmp_path / "sm" / "smatrix.csv").read_text().splitlines()
    for line in lines[1:10]:
        vals = [float(x) for x in line.split(",")]
        assert abs(vals[-2] ** 2 + vals[-1] ** 2 - 1.0) < 1e-12


def test_export_empty_weight_set(tmp_path):
    cfg = _cfg(tmp_path, "empty.json", {
        "root_system": {"label": "A", "rank": 2},
        "cfunctions": {"family": "unit"},
        "weights": {"tops": [[0, 0]]}})
    assert main(["export", "polynomials", "--config", cfg,
                 "--out", str(tmp_path / "e")]) == 0
    rep = json.loads((tmp_path / "e" / "polynomials.json").read_text())
    assert list(rep["coefficients"]) == ["0,0"]


def test_unknown_suite(tmp_path):
    # argparse rejects an unknown suite with the config-error exit code
    cfg = _cfg(tmp_path, "a2.json", A2_MACDONALD)
    with pytest.raises(SystemExit) as err:
        main(["verify", "--suite", "nope", "--config", cfg])
    assert err.value.code == 2
