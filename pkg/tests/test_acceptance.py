"""Acceptance gate: end-to-end budgeted criteria, one summary line each.

These are the slow, full-resolution runs (the inequality suite over the whole
norm family takes several minutes); the per-module test files cover the same
code at unit scale.
"""

import math
import time

import numpy as np
import pytest
from conftest import record_acceptance

import planemoduli as pm
from planemoduli import (
    ModulusKind,
    build_figure,
    lambda_point_batch,
    projection_bound_margin,
    quasi_normal_cone,
)

EPS_GRID = [round(0.05 * i, 2) for i in range(1, 20)]

CLOSED_FORM_KINDS = [
    ModulusKind(k)
    for k in (
        "lambda-minus",
        "lambda-plus",
        "phi-minus",
        "phi-plus",
        "zeta-minus",
        "zeta-plus",
        "gamma-minus",
        "gamma-plus",
        "d-minus",
        "d-plus",
    )
] + [pm.delta_t(t) for t in (0.25, 0.5, 0.75)]


def test_criterion_1_hilbert_closed_forms():
    euclid = pm.euclidean_norm()
    t0 = time.perf_counter()
    worst = 0.0
    for kind in CLOSED_FORM_KINDS:
        curve = pm.modulus_curve(euclid, kind, EPS_GRID, grid_n=1024, refine_rounds=6)
        for s in curve.samples:
            worst = max(worst, abs(s.value - pm.hilbert_reference(kind, s.eps)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-4 and elapsed <= 60.0
    record_acceptance(1, "hilbert-closed-forms", ok, f"max error {worst:.2e}, {elapsed:.1f}s")
    assert worst <= 1e-4
    assert elapsed <= 60.0


def test_criterion_2_inequality_suite():
    t0 = time.perf_counter()
    report = pm.run_suite(pm.default_suite())  # seven standard norms, slack 1e-3
    elapsed = time.perf_counter() - t0
    fails = [c.id for c in report.checks if c.status == "fail"]
    ids = [c.id for c in report.checks]
    ok = not fails and ids == sorted(pm.default_check_ids()) and elapsed <= 600.0
    record_acceptance(
        2, "inequality-suite", ok, f"{len(fails)} failures across {len(ids)} checks, {elapsed:.0f}s"
    )
    assert fails == []
    assert ids == sorted(pm.default_check_ids())
    assert elapsed <= 600.0


@pytest.fixture(scope="module")
def random_figures():
    """10^4 random descent figures per norm: x, quasi-normal y, eps, lambda,
    and the support-segment endpoints at x (for the annihilating functional)."""
    rng = np.random.default_rng(20240817)
    out = {}
    for norm in pm.standard_norms():
        n = 10_000
        X = norm.sphere_point(rng.uniform(0.0, 2.0 * math.pi, n))
        ang = np.empty(n)
        Pm = np.empty((n, 2))
        Pp = np.empty((n, 2))
        for i in range(n):
            seg = norm.support_set(X[i])
            cone = quasi_normal_cone(norm, X[i])
            ang[i] = cone.theta_lo + rng.uniform(0.05, 0.95) * (cone.theta_hi - cone.theta_lo)
            Pm[i] = seg.p_minus
            Pp[i] = seg.p_plus
        Y = norm.sphere_point(ang)
        e = rng.uniform(1e-4, 1.0, n)
        lam = lambda_point_batch(norm, X, Y, e)
        out[pm.norm_label(norm)] = (norm, X, Y, Pm, Pp, e, lam)
    return out


def test_criterion_3_projection_bound(random_figures):
    worst = math.inf
    total = 0
    for norm, X, Y, _, _, e, lam in random_figures.values():
        # margin = 2*||y1 - x|| - ||x - z|| with y1 - x = eps*y and x - z = lam*x - eps*y
        margins = 2.0 * e - np.asarray(norm(lam[:, None] * X - e[:, None] * Y))
        worst = min(worst, float(margins.min()))
        total += len(e)
    # the vectorized margin agrees with explicitly constructed figures
    norm, X, Y, _, _, e, lam = random_figures["polygon-8"]
    for i in range(25):
        fig = build_figure(norm, X[i], Y[i], float(e[i]))
        vectorized = 2.0 * float(e[i]) - float(norm(lam[i] * X[i] - e[i] * Y[i]))
        assert abs(projection_bound_margin(fig) - vectorized) <= 1e-10
    ok = worst >= -1e-9
    record_acceptance(3, "projection-bound", ok, f"min margin {worst:+.2e} over {total} figures")
    assert worst >= -1e-9


def test_criterion_4_cathetus_identity(random_figures):
    worst = 0.0
    for norm, X, Y, Pm, Pp, e, lam in random_figures.values():
        s1 = np.einsum("ij,ij->i", Pm, Y)
        s2 = np.einsum("ij,ij->i", Pp, Y)
        denom = s1 - s2
        w = np.where(np.abs(denom) > 1e-15, s1 / np.where(denom == 0.0, 1.0, denom), 0.0)
        P = Pm + np.clip(w, 0.0, 1.0)[:, None] * (Pp - Pm)
        Y1 = X + e[:, None] * Y
        Z = Y1 - lam[:, None] * X
        lhs = np.asarray(norm(Y1 - Z))
        rhs = np.einsum("ij,ij->i", P, X - Z)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    # agrees with the residual reported by explicitly constructed figures
    norm, X, Y, _, _, e, _ = random_figures["lp:1.5"]
    for i in range(25):
        fig = build_figure(norm, X[i], Y[i], float(e[i]))
        assert fig.residuals()["cathetus_identity"] <= 1e-8
    ok = worst <= 1e-8
    record_acceptance(4, "cathetus-identity", ok, f"max identity defect {worst:.2e}")
    assert worst <= 1e-8


def test_criterion_5_area_additivity():
    worst_ratio = 0.0
    euclid_a3_err = 0.0
    for norm in (pm.euclidean_norm(), pm.lp_norm(3)):
        for eps in (0.25, 0.5, 1.0):
            r = pm.area_additivity_check(norm, eps, samples=4096)
            worst_ratio = max(worst_ratio, abs(r.defect) / abs(r.a1))
            if norm.kind == "euclidean":
                target = (1.0 + eps * eps) * math.pi
                euclid_a3_err = max(euclid_a3_err, abs(r.a3 - target) / target)
    ok = worst_ratio <= 0.005 and euclid_a3_err <= 0.005
    record_acceptance(
        5, "area-additivity", ok, f"max |defect|/a1 {worst_ratio:.2e}, euclid a3 error {euclid_a3_err:.2e}"
    )
    assert worst_ratio <= 0.005
    assert euclid_a3_err <= 0.005


def test_criterion_6_exact_values():
    square = pm.lp_norm("inf")
    euclid = pm.euclidean_norm()
    opts = dict(grid_n=256, refine_rounds=4)
    worst = 0.0
    for eps in (0.25, 0.5, 0.75, 1.0):
        worst = max(worst, abs(pm.modulus(square, ModulusKind("lambda-minus"), eps, **opts).value))
        worst = max(worst, abs(pm.modulus(square, ModulusKind("zeta-minus"), eps, **opts).value - 1.0))
        worst = max(worst, abs(pm.modulus(square, ModulusKind("phi-minus"), eps, **opts).value))
    for eps in (0.5, 1.0, 1.5, 2.0):
        worst = max(worst, abs(pm.modulus(square, ModulusKind("delta"), eps, **opts).value))
    for eps in (0.3, 0.9, 1.5):
        d = pm.modulus(euclid, ModulusKind("delta"), eps, **opts).value
        b = pm.modulus(euclid, ModulusKind("banas"), eps, **opts).value
        worst = max(worst, abs(d - b))
    ok = worst <= 1e-6
    record_acceptance(6, "exact-values", ok, f"max deviation {worst:.2e}")
    assert worst <= 1e-6


def test_criterion_7_conjecture_probes():
    reports = {}
    identical = True
    for family, count in (("random-polygons", 50), ("random-lp", 10)):
        first = pm.probe_conjectures(family, count, seed=42)
        second = pm.probe_conjectures(family, count, seed=42)
        identical = identical and (
            pm.canonical_json(first.to_json_dict()) == pm.canonical_json(second.to_json_dict())
        )
        reports[family] = first
    hard_failures = [c.id for rep in reports.values() for c in rep.checks if c.status == "fail"]
    # observations, not assertions: the probes exist to report these margins
    for family, rep in reports.items():
        for c in rep.checks:
            w = c.witness["worst"]
            print(
                f"  [{family}] {c.id}: worst margin {c.worst_margin:+.3e} "
                f"at {w['norm']}, eps={w['eps']:.3g} ({w['relation']})"
            )
    ok = identical and not hard_failures
    record_acceptance(7, "conjecture-probes", ok, "byte-identical reports, observations report-only")
    assert identical
    assert hard_failures == []


def test_criterion_8_lambda_convexity():
    rng = np.random.default_rng(7)
    worst = -math.inf
    for norm in pm.standard_norms():
        n = 1000
        X = norm.sphere_point(rng.uniform(0.0, 2.0 * math.pi, n))
        ang = np.empty(n)
        for i in range(n):
            cone = quasi_normal_cone(norm, X[i])
            ang[i] = cone.theta_lo + rng.uniform(0.05, 0.95) * (cone.theta_hi - cone.theta_lo)
        Y = norm.sphere_point(ang)
        e1 = rng.uniform(1e-3, 1.0, n)
        e2 = rng.uniform(1e-3, 1.0, n)
        lam1 = lambda_point_batch(norm, X, Y, e1)
        lam2 = lambda_point_batch(norm, X, Y, e2)
        lam_mid = lambda_point_batch(norm, X, Y, 0.5 * (e1 + e2))
        violation = lam_mid - 0.5 * (lam1 + lam2)
        worst = max(worst, float(np.max(violation)))
    ok = worst <= 1e-8
    record_acceptance(8, "lambda-convexity", ok, f"max three-point violation {worst:.2e}")
    assert worst <= 1e-8
