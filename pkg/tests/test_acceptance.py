"""Acceptance gate: ten numbered criteria, one pass/fail line each.

Criterion 9 is expected to fail: the inner dyadic cover of the unit
triangle leaves an uncovered strip along the hypotenuse of Lebesgue
area exactly 2^-(depth+1), so at depth 12 the gauge distance is about
1.4e-2 and cannot reach the 1e-3 target on this cover sequence.  The
test states the true numbers and fails honestly rather than loosening
the bound; every other claim inside that criterion passes.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from orliczval.cli import main
from orliczval.polytopes import Polytope, moment
from orliczval.suites import (
    suite_constraint_system,
    suite_continuity,
    suite_covariance,
    suite_divergence,
    suite_norm_agreement,
    suite_valuation,
    suite_young_limits,
)
from orliczval.young import PowerYoung


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(num, ok, detail):
        elapsed = time.perf_counter() - start
        verdict = "PASS" if ok else "FAIL"
        with capsys.disabled():
            print(f"\ncriterion {num:02d} {verdict} ({elapsed:.2f}s): {detail}")
        assert ok, f"criterion {num:02d} {verdict}: {detail}"

    return emit


def _simplex(n):
    return Polytope(np.vstack([np.zeros(n), np.eye(n)]))


def test_criterion_01_moment_exactness(report):
    start = time.perf_counter()
    worst = float(np.max(np.abs(moment(_simplex(2)) - 1.0 / 6.0)))
    for n in (3, 4, 5):
        target = 1.0 / math.factorial(n + 1)
        worst = max(worst, float(np.max(np.abs(moment(_simplex(n)) - target))))
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-12 and elapsed < 1.0,
           f"simplex moments n=2..5, max abs deviation {worst:.3e} "
           f"(tol 1e-12)")


def test_criterion_02_indicator_norm_crossvalidation(report):
    out = suite_norm_agreement(cases=50, seed=3, rel_max=1e-8)
    report(2, out["ok"],
           f"50 closed-form vs minimised indicator norms, max rel diff "
           f"{out['summary']['max_rel_diff']:.3e} (tol 1e-8)")


def test_criterion_03_conjugate_duality(report):
    worst_conj = 0.0
    worst_gap = 0.0
    ss = np.geomspace(0.1, 10.0, 100)
    for p in (1.5, 2.0, 3.0, 5.0):
        phi = PowerYoung(p)
        conj = phi.conjugate()
        for s in ss:
            # independent Legendre oracle: maximise s*t - phi(t) directly
            res = minimize_scalar(lambda t: -(s * t - float(phi.eval(t))),
                                  bounds=(0.0, 1e6), method="bounded",
                                  options={"xatol": 1e-10})
            numeric = -res.fun
            closed = float(conj.eval(s))
            worst_conj = max(worst_conj,
                             abs(numeric - closed) / max(1.0, closed))
            t_eq = float(conj.density(s))
            gap = float(phi.eval(t_eq)) + closed - s * t_eq
            worst_gap = max(worst_gap, abs(gap) / max(1.0, s * t_eq))
    ok = worst_conj <= 1e-8 and worst_gap <= 1e-8
    report(3, ok,
           f"power p in {{1.5,2,3,5}} on 100-point grids: Legendre oracle "
           f"diff {worst_conj:.3e}, equality gap {worst_gap:.3e} (tol 1e-8)")


def test_criterion_04_slope_limits(report):
    out = suite_young_limits()
    report(4, out["ok"],
           f"{out['summary']['families']} families: slope ratio exceeds 1e6 "
           f"and inverse ratio falls below 1e-6 on geometric grids")


def test_criterion_05_valuation_identity(report):
    out = suite_valuation(pairs=200, seed=7, residual_max=1e-9)
    report(5, out["ok"],
           f"200 refinable pairs per dim in {{2,3}}, max lattice residual "
           f"{out['summary']['max_residual']:.3e} (tol 1e-9)")


def test_criterion_06_covariance(report):
    out = suite_covariance(count=100, seed=13, residual_max=1e-9)
    report(6, out["ok"],
           f"100 shear-product maps per dim plus diagonal k in {{2,1/3}}, "
           f"max residual {out['summary']['max_residual']:.3e} (tol 1e-9)")


def test_criterion_07_constraint_reconstruction(report):
    out = suite_constraint_system()
    s = out["summary"]
    report(7, out["ok"],
           f"edge-coefficient system: rank {s['rank']}, unique zero solution "
           f"{s['unique_zero_solution']}, intermediate equations reproduced "
           f"{s['intermediate_equations_present']}")


def test_criterion_08_divergent_moment(report):
    out = suite_divergence(terms=50)
    s = out["summary"]
    ok = (out["ok"] and s["modular_final"] <= 1.0
          and s["lower_bound_final"] > 40.0)
    report(8, ok,
           f"50-ball construction: growth flagged {s['growth_flagged']}, "
           f"every modular prefix <= 1 (final {s['modular_final']:.4f}), "
           f"moment lower bound {s['lower_bound_final']:.2f} > 40")


def test_criterion_09_continuity_probe(report):
    out = suite_continuity(depth=12, probe_k=8)
    s = out["summary"]
    detail = (f"cube cover to depth 12: strict decrease "
              f"{s['strict_decrease']}, moment gap within radius-weighted "
              f"area bound {s['psi_gap_bounded']}, annular tail vanishes "
              f"{s['annular_probe_vanishes']}; final gauge distance "
              f"{s['final_norm_distance']:.4e} vs target 1e-3: the cover "
              f"misses a hypotenuse strip of area 2^-13, forcing distance "
              f"~sqrt(2*mu) ~ 1.4e-2, so the target is unreachable on this "
              f"sequence")
    report(9, out["ok"], detail)


def test_criterion_10_determinism(report, tmp_path, capsys):
    start = time.perf_counter()
    identical = True
    for suite, extra in (("valuation", ["--pairs", "40", "--seed", "7"]),
                         ("lemma15", ["--J", "20"]),
                         ("lemma8", [])):
        paths = [tmp_path / f"{suite}-{i}.csv" for i in (0, 1)]
        for path in paths:
            rc = main(["verify", suite, *extra, "--format", "csv",
                       "--out", str(path)])
            capsys.readouterr()
            assert rc == 0
        identical = identical and paths[0].read_bytes() == paths[1].read_bytes()
    elapsed = time.perf_counter() - start
    report(10, identical and elapsed < 60.0,
           f"three verify suites rerun with fixed seeds: CSV byte-identical "
           f"{identical} in {elapsed:.1f}s")
