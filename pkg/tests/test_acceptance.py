"""Acceptance criteria for the full build, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS line per
criterion.  Expensive optimizer runs are shared through the session-scoped
``shapes`` fixture.
"""

import math
import time

import numpy as np
import pytest

from eigenperim import cli, features as ff, functional as ef, geometry as eg
from eigenperim import norms as en, optimizer as eo, spectral as es

TWO_PI_SQ = 2.0 * math.pi ** 2


def report(criterion: str, detail: str):
    print(f"ACCEPTANCE {criterion}: PASS  ({detail})")


# ---------------------------------------------------------------------------
# 1. Eigenvalue oracle: separable rectangle eigenvalues within 0.5%
# ---------------------------------------------------------------------------

def test_criterion_01_eigenvalue_oracle(rect_lambda):
    worst = 0.0
    for n, a in [(1.0, 1.0), (3.0, 1.0), (3.0, 2.0)]:
        t0 = time.perf_counter()
        rect = eg.rectangle(n / a, a / n)
        lam, _ = es.eigenvalue_extrapolated(rect, levels=3)
        elapsed = time.perf_counter() - t0
        exact = rect_lambda(n, a)
        rel = abs(lam - exact) / exact
        worst = max(worst, rel)
        assert rel <= 0.005, f"(n={n}, a={a}): {lam} vs {exact}"
        assert elapsed <= 30.0
    assert_unit = abs(es.eigenvalue_extrapolated(
        eg.rectangle(1.0, 1.0, center=(0.5, 0.5)), levels=3)[0] - TWO_PI_SQ)
    assert assert_unit / TWO_PI_SQ <= 0.005
    report("1 eigenvalue oracle", f"worst rectangle error {worst:.2e}")


# ---------------------------------------------------------------------------
# 2. Disc oracle
# ---------------------------------------------------------------------------

def test_criterion_02_disc_oracle(bessel_j01):
    disc = eg.regular_polygon(256, 1.0)
    lam, _ = es.eigenvalue_extrapolated(disc, levels=3)
    rel = abs(lam - bessel_j01 ** 2) / bessel_j01 ** 2
    assert rel <= 0.005
    report("2 disc oracle", f"lambda {lam:.5f} vs {bessel_j01 ** 2:.5f}, rel {rel:.2e}")


# ---------------------------------------------------------------------------
# 3. Scaling relations
# ---------------------------------------------------------------------------

def test_criterion_03_scaling():
    rng = np.random.default_rng(31)
    norm = en.WeightedL1(1.0 / 3.0, 3.0)
    worst_lam = worst_per = 0.0
    for base in (eg.rectangle(1.0, 1.0, center=(0.5, 0.5)),
                 eg.random_convex_polygon(rng, n_points=9)):
        lam0, _ = es.eigenvalue_extrapolated(base, levels=2)
        per0 = eg.perimeter(base, norm)
        for t in (0.5, 2.0, 3.0):
            scaled = eg.scale_translate(base, t)
            lam_t, _ = es.eigenvalue_extrapolated(scaled, levels=2)
            rel_lam = abs(lam_t - lam0 / t ** 2) / (lam0 / t ** 2)
            rel_per = abs(eg.perimeter(scaled, norm) - t * per0) / (t * per0)
            worst_lam = max(worst_lam, rel_lam)
            worst_per = max(worst_per, rel_per)
            assert rel_lam <= 0.002
            assert rel_per <= 0.002
    report("3 scaling", f"lambda err {worst_lam:.2e}, perimeter err {worst_per:.2e}")


# ---------------------------------------------------------------------------
# 4. Special-case minimizers
# ---------------------------------------------------------------------------

def test_criterion_04_special_case_minimizers(shapes, bessel_j01):
    t0 = time.perf_counter()
    # Euclidean norm: ball of radius (j01^2 / pi)^(1/3)
    trace = shapes.minimizer("l2")
    r_opt = (bessel_j01 ** 2 / math.pi) ** (1.0 / 3.0)
    ideal = eg.regular_polygon(512, r_opt)
    shape = eg.center(eg.scale_translate(trace.final_shape, trace.final.t_star))
    d_disc = eg.hausdorff_distance(shape, ideal) / (2.0 * r_opt)
    f_disc = 3.0 * 2.0 ** (-2.0 / 3.0) * (bessel_j01 ** 2) ** (1 / 3) * (2 * math.pi) ** (2 / 3)
    assert d_disc <= 0.02
    assert abs(trace.final.f_star - f_disc) / f_disc <= 0.01
    assert abs(trace.final.f_star - 11.549) / 11.549 <= 0.01

    # taxicab norm: axis-aligned square of side pi^(2/3)
    trace = shapes.minimizer("l1")
    side = math.pi ** (2.0 / 3.0)
    ideal_sq = eg.rectangle(side, side)
    shape = eg.center(eg.scale_translate(trace.final_shape, trace.final.t_star))
    d_sq = eg.hausdorff_distance(shape, ideal_sq) / ideal_sq.diameter
    f_sq = 6.0 * math.pi ** (2.0 / 3.0)
    assert d_sq <= 0.03
    assert abs(trace.final.f_star - f_sq) / f_sq <= 0.01
    assert abs(trace.final.f_star - 12.870) / 12.870 <= 0.01

    # max norm: diamond orientation (corners on the axes)
    trace = shapes.minimizer("linf")
    s_star = 2.0 ** (1.0 / 6.0) * math.pi ** (2.0 / 3.0)
    v = s_star / math.sqrt(2.0)
    ideal_diamond = eg.ConvexPolygon([(v, 0), (0, v), (-v, 0), (0, -v)])
    shape = eg.center(eg.scale_translate(trace.final_shape, trace.final.t_star))
    d_dia = eg.hausdorff_distance(shape, ideal_diamond) / ideal_diamond.diameter
    assert d_dia <= 0.03
    corners = ff.detect_corners(shape)
    for c in corners:
        axis_dist = min(abs(c.point[0]), abs(c.point[1]))
        assert axis_dist <= 0.03 * ideal_diamond.diameter

    elapsed = time.perf_counter() - t0
    assert elapsed <= 900.0
    report("4 special-case minimizers",
           f"dist disc {d_disc:.4f}, square {d_sq:.4f}, diamond {d_dia:.4f} "
           f"of diameter; {elapsed:.0f}s total")


# ---------------------------------------------------------------------------
# 5. Rectangle family: minimum away from the isoperimetric aspect
# ---------------------------------------------------------------------------

def test_criterion_05_counterexample(rect_lambda):
    grid = [0.5 + 0.25 * i for i in range(15)]
    rep = ff.counterexample_rectangles(3.0, grid, solver_check=(1.0, 2.0), levels=3)
    rows = {round(r["a"], 6): r for r in rep.rows}
    for r in rep.rows:
        assert r["agreement"] <= 1e-9  # closed form reproduced exactly
    assert rows[1.0]["f_star"] == pytest.approx(21.33528, abs=1e-4)
    assert rows[2.0]["f_star"] == pytest.approx(16.49444, abs=1e-4)
    assert rows[2.0]["f_star"] < rows[1.0]["f_star"]
    assert rep.argmin_a != 1.0
    for chk in rep.solver_checks:
        assert chk["rel_error"] <= 0.005
    report("5 counterexample rectangles",
           f"argmin a = {rep.argmin_a:g}, f*(2) = {rows[2.0]['f_star']:.4f} "
           f"< f*(1) = {rows[1.0]['f_star']:.4f}")


# ---------------------------------------------------------------------------
# 6. Minkowski-combination property battery
# ---------------------------------------------------------------------------

def test_criterion_06_minkowski_battery():
    rep = ff.minkowski_suite(seed=2026, n_pairs=100)
    assert rep.n_passed == 100, rep.failures[:5]
    assert np.all(rep.perimeter_errors <= 1e-12)
    assert np.all(rep.strict_slacks > rep.solver_tols)
    assert np.all(rep.superadditivity_margins >= -0.01)
    report("6 minkowski battery",
           f"100/100 pairs; worst perimeter error {rep.perimeter_errors.max():.2e}, "
           f"min strict slack {rep.strict_slacks.min():.3f}")


# ---------------------------------------------------------------------------
# 7. Facet theorem on the norm battery
# ---------------------------------------------------------------------------

def test_criterion_07_facet_theorem(shapes, battery_norms):
    total = 0
    for name in ("l2", "l1", "linf", "p4", "wl1", "sum"):
        check = ff.verify_facet_theorem(battery_norms[name],
                                        shapes.minimizer(name).final_shape)
        assert check.violations == 0, (name, check.unmatched_facets,
                                       check.unmatched_degenerate)
        total += len(check.matches)
    report("7 facet theorem", f"0 violations over 6 norms, {total} matched facets")


# ---------------------------------------------------------------------------
# 8. Corner theorem on the norm battery
# ---------------------------------------------------------------------------

def test_criterion_08_corner_theorem(shapes, battery_norms):
    for name in ("l2", "l1", "linf", "p4", "wl1", "sum"):
        check = ff.verify_corner_theorem(battery_norms[name],
                                         shapes.minimizer(name).final_shape)
        assert check.violations == 0, (name, check.corners_without_additivity,
                                       check.cones_without_corner)
    for smooth in ("l2", "p4"):
        corners = ff.detect_corners(shapes.minimizer(smooth).final_shape)
        assert corners == []
    diamond_corners = ff.detect_corners(shapes.minimizer("linf").final_shape)
    assert len(diamond_corners) == 4
    for c in diamond_corners:
        assert en.additivity_on_pair(battery_norms["linf"], c.v_minus, c.v_plus,
                                     tol=1e-7)
    report("8 corner theorem",
           "0 violations; smooth minimizers corner-free; "
           "max-norm minimizer has exactly 4 additive corners")


# ---------------------------------------------------------------------------
# 9. Hadamard shape gradient vs finite differences
# ---------------------------------------------------------------------------

def test_criterion_09_gradient_check():
    rng = np.random.default_rng(7)
    ang = 2.0 * np.pi * np.arange(64) / 64
    sv = eg.SupportVector(np.ones(64) + 0.06 * np.cos(2 * ang) + 0.04 * np.sin(3 * ang))
    errors = {}
    for spec in ("p:2", "p:1"):
        idx = sorted(rng.choice(64, size=8, replace=False).tolist())
        rep = eo.gradient_check(en.parse_norm(spec), sv, idx, level=4)
        errors[spec] = rep.max_rel_error
        assert rep.max_rel_error <= 0.05
    report("9 hadamard gradient",
           f"max rel errors {errors['p:2']:.3f} (euclid), {errors['p:1']:.3f} (taxicab)")


# ---------------------------------------------------------------------------
# 10. Uniqueness probe: independent starts agree modulo translation
# ---------------------------------------------------------------------------

def test_criterion_10_uniqueness(shapes):
    results = {}
    for name in ("l2", "l1", "wl1"):
        rep = shapes.uniqueness(name)
        results[name] = rep.max_pairwise_rel
        assert rep.max_pairwise_rel <= 0.03, (name, rep.max_pairwise_rel)
    report("10 uniqueness probe",
           "max pairwise distances " +
           ", ".join(f"{k}: {v:.3%}" for k, v in results.items()))


# ---------------------------------------------------------------------------
# 11. Stability trend: gap grows with distance from the minimizer
# ---------------------------------------------------------------------------

def test_criterion_11_stability_trend(shapes):
    trace = shapes.minimizer("l2")
    rep = eo.stability_probe(en.PNorm(2.0), trace.final_shape,
                             trace.final.f_star, n=50, seed=11)
    assert rep.positive
    assert rep.nondecreasing
    report("11 stability trend",
           f"decile minima {rep.decile_mins[0]:.3f} .. {rep.decile_mins[-1]:.3f}, "
           "positive and nondecreasing")


# ---------------------------------------------------------------------------
# 12. One-sided perimeter derivative under facet bumps
# ---------------------------------------------------------------------------

def test_criterion_12_perimeter_derivative():
    cases = [
        (en.PNorm(1.0), eg.rectangle(1.0, 1.0), 2.0),
        (en.WeightedL1(1.0 / 3.0, 3.0), eg.rectangle(3.0, 1.0), 6.0),
    ]
    worst = 0.0
    for norm, poly, predicted in cases:
        facets = [f for f in ff.detect_facets(poly)
                  if abs(f.direction[1]) < 1e-9]
        rep = ff.perimeter_derivative_check(norm, poly, facets[0])
        assert rep.predicted == pytest.approx(predicted)
        assert rep.rel_error <= 0.05
        worst = max(worst, rep.rel_error)
    report("12 perimeter derivative", f"worst relative error {worst:.2e}")


# ---------------------------------------------------------------------------
# 13. Determinism: repeated verify runs byte-identical
# ---------------------------------------------------------------------------

def test_criterion_13_determinism(tmp_path):
    out1, out2 = tmp_path / "v1", tmp_path / "v2"
    assert cli.main(["verify", "--pairs", "4", "--out", str(out1)]) == 0
    assert cli.main(["verify", "--pairs", "4", "--out", str(out2)]) == 0
    b1 = (out1 / "manifest.json").read_bytes()
    b2 = (out2 / "manifest.json").read_bytes()
    assert b1 == b2
    report("13 determinism", f"verify manifests byte-identical ({len(b1)} bytes)")
