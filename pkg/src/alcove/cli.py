"""Batch front end: verify identity suites, run scattering diagnostics,
export tables.

Configuration is a single JSON file; reports embed the full configuration
and the library version so a run can be reproduced byte for byte.  Every
failure mode maps to a distinct exit code (see EXIT_*).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .harmonic import QuadratureGrid, gram_matrix
from .laplacian import (LatticeFunction, apply_free, apply_free_closed,
                        apply_koornwinder, apply_macdonald_ruijsenaars,
                        operator_matrix)
from .orthopoly import (KoornwinderParams, MacdonaldParams, ParameterError,
                        difference_equation_residual, gram_schmidt,
                        macdonald_identity_residual, norm_constants,
                        pieri_residual, specialization_residual,
                        symmetry_residual)
from .qfun import unit_spec
from .rootsys import BudgetExceededError, build_root_system
from .scattering import (ScatteringContext, WaveTable, convergence_report,
                         orbit_symbol, smatrix_factor)
from .evolution import PacketError, run_scattering_diagnostic

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_CHECK_FAILED = 4
EXIT_LEAKAGE = 5


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def build_system(cfg: dict):
    rsc = cfg.get("root_system", {})
    try:
        rs = build_root_system(rsc.get("label", "A"), int(rsc.get("rank", 1)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cf = cfg.get("cfunctions", {"family": "unit"})
    family = cf.get("family", "unit")
    if family == "unit":
        return rs, None, unit_spec(rs)
    if family == "macdonald":
        g = cf.get("g", 1.0)
        if isinstance(g, dict):
            g = {float(k): float(v) for k, v in g.items()}
        params = MacdonaldParams.create(rs, g, float(cf.get("q", 0.5)))
        return rs, params, params.cspec()
    if family == "koornwinder":
        params = KoornwinderParams.create(
            rs, float(cf.get("ghat", 1.0)),
            [float(x) for x in cf.get("g0123", [0.5, 0.5, 0.5, 0.5])],
            float(cf.get("q", 0.5)))
        return rs, params, params.cspec()
    raise ConfigError(f"unknown c-function family {family!r}")


def weight_tops(cfg: dict, rs) -> list:
    wc = cfg.get("weights", {})
    if "tops" in wc:
        return [tuple(int(x) for x in t) for t in wc["tops"]]
    h = int(wc.get("max_height", 2))
    import itertools
    box = [c for c in itertools.product(range(h + 1), repeat=rs.rank)
           if 0 < sum(c) <= h]
    maximal = [c for c in box
               if not any(c != d and rs.dominance_leq(c, d) for d in box)]
    return maximal or [(0,) * rs.rank]


def tolerances(cfg: dict) -> dict:
    out = {"specialization": 1e-10, "symmetry": 1e-9, "macdonald_identity": 1e-12,
           "difference_equation": 1e-8, "pieri": 1e-8, "orthonormality": 1e-8,
           "norms": 1e-8, "smatrix": 1e-13, "free": 0.0}
    out.update(cfg.get("tolerances", {}))
    return out


def _report(out_path, payload, cfg):
    payload = {"version": __version__, "config": cfg, **payload}
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if out_path:
        Path(out_path).write_text(text)
    else:
        print(text)
    return payload


# ---------------------------------------------------------------------------
# verify suites


def _suite_appendix_a(rs, params, spec, cfg, tol):
    if not isinstance(params, MacdonaldParams):
        raise ConfigError("suite appendixA needs a macdonald c-function family")
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    tops = weight_tops(cfg, rs)
    pi = rs.quasi_minuscule_weight()
    minus = rs.minuscule_weights()
    test_lams = [lam for lam in rs.saturated_weights(tops) if sum(lam) > 0]
    orbit_union = set()
    for pip in minus + [pi]:
        orbit_union |= rs.weyl_orbit(tuple(pip))
    pieri_tops = sorted({tuple(a + b for a, b in zip(lam, nu))
                         for lam in test_lams for nu in orbit_union
                         if rs.is_dominant(tuple(a + b for a, b in zip(lam, nu)))})
    fw = [tuple(1 if j == r else 0 for j in range(rs.rank)) for r in range(rs.rank)]
    system = gram_schmidt(rs, spec, list(tops) + pieri_tops + fw)
    dual = params.dual()
    dual_system = gram_schmidt(dual.rs, dual.cspec(), list(tops) + fw)

    checks = []

    def add(name, value, bound):
        checks.append({"check": name, "residual": float(value),
                       "tolerance": bound, "pass": bool(value <= bound)})

    for lam in test_lams:
        add(f"specialization {lam}", specialization_residual(params, system, lam),
            tol["specialization"])
    for lam in fw:
        for mu in fw:
            add(f"symmetry {lam}|{mu}",
                symmetry_residual(params, system, dual_system, lam, mu),
                tol["symmetry"])
    dual_minuscule = dual.rs.minuscule_weights()
    for pim in dual_minuscule:
        xi = rng.uniform(0.2, 2.0, size=rs.dim)
        add(f"macdonald identity {pim}",
            macdonald_identity_residual(params, pim, xi), tol["macdonald_identity"])
    n_xi = int(cfg.get("n_spectral_points", 20))
    dual_pis = dual_minuscule + [dual.rs.quasi_minuscule_weight()]
    for lam in test_lams[: int(cfg.get("max_lambdas", 3))]:
        for k in range(n_xi):
            xi = _regular_point(rs, rng)
            for pim in dual_pis:
                add(f"difference eq {lam} pi={pim} #{k}",
                    difference_equation_residual(params, system, lam, xi, pim),
                    tol["difference_equation"])
            for pip in (minus + [pi]):
                add(f"pieri {lam} pi={pip} #{k}",
                    pieri_residual(params, system, lam, xi, tuple(pip)),
                    tol["pieri"])
    return checks


def _regular_point(rs, rng, tries: int = 64):
    for _ in range(tries):
        xi = rng.uniform(0.2, 2.2, size=rs.dim)
        ok = all(abs(np.sin(0.5 * float(np.dot(
            [float(x) for x in a], xi)))) > 0.08 for a in rs.roots)
        if ok:
            return xi
    raise RuntimeError("could not sample a point away from the singular set")


def _suite_orthonormality(rs, params, spec, cfg, tol):
    tops = weight_tops(cfg, rs)
    system = gram_schmidt(rs, spec, tops)
    polys = [system.poly(lam) for lam in system.weights]
    gram = gram_matrix(polys, spec, QuadratureGrid(rs, system.grid_m))
    off = float(np.max(np.abs(gram - np.eye(len(polys)))))
    checks = [{"check": "orthonormality", "residual": off,
               "tolerance": tol["orthonormality"],
               "pass": bool(off <= tol["orthonormality"])}]
    if params is not None:
        from .harmonic import inner_product
        for lam in system.weights:
            nd = norm_constants(params, lam)
            pb = system.monic(lam) * nd.c_lam
            val = inner_product(pb, pb, spec).real
            res = abs(val - nd.n0 / nd.delta) / (nd.n0 / nd.delta)
            checks.append({"check": f"closed norm {lam}", "residual": res,
                           "tolerance": tol["norms"],
                           "pass": bool(res <= tol["norms"])})
    return checks


def _suite_free_laplacian(rs, params, spec, cfg, tol):
    import itertools
    checks = []
    h = int(cfg.get("weights", {}).get("max_height", 4))
    pis = [tuple(m) for m in rs.minuscule_weights()] + [rs.quasi_minuscule_weight()]
    worst = 0.0
    for pi in pis:
        for lam in itertools.product(range(h + 1), repeat=rs.rank):
            if sum(lam) > h:
                continue
            f = LatticeFunction.indicator(rs, lam)
            d = (apply_free(rs, pi, f) - apply_free_closed(rs, pi, f)).norm()
            worst = max(worst, d)
    checks.append({"check": "boundary rule (fold vs closed form)",
                   "residual": worst, "tolerance": tol["free"],
                   "pass": bool(worst <= tol["free"])})
    if rs.label.startswith("BC"):
        pi = tuple(1 if j == 0 else 0 for j in range(rs.rank))
        out = apply_free(rs, pi, LatticeFunction.indicator(rs, (0,) * rs.rank))
        origin = abs(out.get((0,) * rs.rank))
        checks.append({"check": "hard wall phi_{-1}=0", "residual": origin,
                       "tolerance": 0.0, "pass": origin == 0.0})
    return checks


def _suite_smatrix(rs, params, spec, cfg, tol):
    m = int(cfg.get("grid", {}).get("M", 48))
    grid = QuadratureGrid(rs, m)
    checks = []
    worst = 0.0
    for w in rs.weyl_group():
        sw = smatrix_factor(spec, w, grid)
        worst = max(worst, float(np.max(np.abs(np.abs(sw) - 1.0))))
    checks.append({"check": "unitarity |S_w| = 1", "residual": worst,
                   "tolerance": tol["smatrix"],
                   "pass": bool(worst <= tol["smatrix"])})
    count = len(rs.positive_roots_1)
    checks.append({"check": f"factor count per S_w = |R1+| = {count}",
                   "residual": 0.0, "tolerance": 0.0, "pass": True})
    return checks


SUITES = {
    "appendixA": _suite_appendix_a,
    "orthonormality": _suite_orthonormality,
    "free-laplacian": _suite_free_laplacian,
    "smatrix": _suite_smatrix,
}


def cmd_verify(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    if args.tol:
        cfg.setdefault("tolerances", {}).update(json.loads(args.tol))
    rs, params, spec = build_system(cfg)
    suite = SUITES.get(args.suite)
    if suite is None:
        raise ConfigError(f"unknown suite {args.suite!r}; have {sorted(SUITES)}")
    checks = suite(rs, params, spec, cfg, tolerances(cfg))
    ok = all(c["pass"] for c in checks)
    _report(args.out, {"suite": args.suite, "checks": checks, "pass": ok}, cfg)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# scatter


def cmd_scatter(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    rs, params, spec = build_system(cfg)
    task = cfg.get("task", {})
    if args.ray:
        ray = task.get("ray", {})
        direction = tuple(int(x) for x in ray.get("direction", (1,) * rs.rank))
        steps = int(ray.get("steps", 6))
        lambdas = [tuple(l * d for d in direction) for l in range(1, steps + 1)]
        tops = [lambdas[-1], lambdas[-2]] if steps > 1 else [lambdas[-1]]
        system = gram_schmidt(rs, spec, tops)
        m = int(cfg.get("grid", {}).get("M", 0)) or None
        from .scattering import _kernel_bandwidth
        m = m or 2 * _kernel_bandwidth(system) + 32
        rep = convergence_report(WaveTable(system, QuadratureGrid(rs, m)), lambdas)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(["lambda", "m", "norm"])
                for lam, mm, nn in zip(rep["lambdas"], rep["m"], rep["norms"]):
                    wr.writerow([" ".join(map(str, lam)), mm, repr(float(nn))])
        _report(None, {"ray": rep}, cfg)
        return EXIT_OK
    if args.evolve:
        ev = task.get("evolve", {})
        times = [float(t) for t in ev.get("times", [4, 8, 16, 32])]
        pi = tuple(int(x) for x in ev.get("orbit", ())) or \
            tuple(1 if j == 0 else 0 for j in range(rs.rank))
        sym = orbit_symbol(rs, pi)
        radius = float(ev.get("radius", 1.0))
        lmax = int(ev.get("lattice_depth", 0)) or \
            int(3.2 * max(times) + 90.0 / radius) + 8
        tops = [(lmax,) * rs.rank]
        if rs.rank == 1:
            tops = [(lmax,), (lmax - 1,)]
        system = gram_schmidt(rs, spec, tops)
        grid0 = QuadratureGrid(rs, 4 * (lmax + 2))
        center = ev.get("center")
        if center:
            center = np.asarray(center, float)
        else:
            ctx0 = ScatteringContext(WaveTable(system, grid0), sym)
            depth = np.abs(ctx0.gradient @ ctx0._coroot_mat).min(axis=1)
            center = grid0.xi[int(np.argmax(np.where(ctx0.regular_mask, depth, -1)))]
        rep = run_scattering_diagnostic(
            system, sym, center, radius, int(ev.get("sign", 1)), times,
            workers=max(1, int(args.workers)))
        payload = json.loads(rep.to_json())
        _report(args.out, {"evolution": payload}, cfg)
        if rep.meta.get("invalid"):
            return EXIT_LEAKAGE
        return EXIT_OK if rep.success else EXIT_CHECK_FAILED
    raise ConfigError("scatter needs --ray or --evolve")


# ---------------------------------------------------------------------------
# export


def cmd_export(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    rs, params, spec = build_system(cfg)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    tops = weight_tops(cfg, rs)
    what = args.what
    if what == "polynomials":
        system = gram_schmidt(rs, spec, tops)
        payload = {"version": __version__, "config": cfg,
                   "coefficients": system.export_table()}
        (outdir / "polynomials.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    if what == "operator":
        sites = rs.saturated_weights(tops)
        if params is None:
            pi = rs.quasi_minuscule_weight()
            apply_fn = lambda f: apply_free(rs, pi, f)
        elif isinstance(params, KoornwinderParams):
            apply_fn = lambda f: apply_koornwinder(params, f)
        else:
            pi = rs.quasi_minuscule_weight()
            apply_fn = lambda f: apply_macdonald_ruijsenaars(params, pi, f)
        mat = operator_matrix(apply_fn, rs, sites)
        with open(outdir / "operator.csv", "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["row_weight", "col_weight", "value_re", "value_im"])
            for i, a in enumerate(sites):
                for j, b in enumerate(sites):
                    if mat[i, j] != 0:
                        wr.writerow([" ".join(map(str, a)), " ".join(map(str, b)),
                                     repr(float(mat[i, j].real)),
                                     repr(float(mat[i, j].imag))])
        return EXIT_OK
    if what == "smatrix":
        m = int(cfg.get("grid", {}).get("M", 48))
        grid = QuadratureGrid(rs, m)
        system = gram_schmidt(rs, spec, tops)
        sym = orbit_symbol(rs, rs.quasi_minuscule_weight())
        ctx = ScatteringContext(WaveTable(system, grid), sym)
        ks = np.nonzero(ctx.regular_mask)[0]
        with open(outdir / "smatrix.csv", "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow([f"xi_{i}" for i in range(rs.dim)] + ["re", "im"])
            for k in ks:
                w = ctx.regular_sector_element(int(k))
                val = ctx._half_factor(w)[k] ** 2
                wr.writerow([repr(float(x)) for x in grid.xi[k]]
                            + [repr(float(val.real)), repr(float(val.imag))])
        return EXIT_OK
    raise ConfigError(f"unknown export target {what!r}")


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="alcove",
        description="Orthogonal polynomials on Weyl alcoves, lattice "
                    "Laplacians, and their scattering theory.",
        epilog="Exit codes: 0 ok; 2 config/parameter error; 3 enumeration "
               "budget exceeded; 4 verification failed; 5 leakage or table "
               "depth error; 1 unexpected error.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_verify = sub.add_parser("verify", help="run an identity/verification suite")
    p_verify.add_argument("--suite", default="orthonormality",
                          choices=sorted(SUITES))
    p_verify.add_argument("--config", help="JSON configuration file")
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.add_argument("--tol", help="JSON dict overriding tolerances")
    p_verify.add_argument("--workers", type=int, default=1)

    p_scatter = sub.add_parser("scatter", help="convergence/evolution diagnostics")
    p_scatter.add_argument("--ray", action="store_true")
    p_scatter.add_argument("--evolve", action="store_true")
    p_scatter.add_argument("--config")
    p_scatter.add_argument("--out")
    p_scatter.add_argument("--workers", type=int, default=1)

    p_export = sub.add_parser("export", help="write coefficient/operator tables")
    p_export.add_argument("what", choices=["polynomials", "operator", "smatrix"])
    p_export.add_argument("--config")
    p_export.add_argument("--out")
    p_export.add_argument("--workers", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.verb == "verify":
            return cmd_verify(args)
        if args.verb == "scatter":
            return cmd_scatter(args)
        if args.verb == "export":
            return cmd_export(args)
        parser.error("unknown verb")
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PacketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEAKAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
