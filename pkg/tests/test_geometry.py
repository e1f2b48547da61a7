import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenperim import geometry as eg
from eigenperim import norms as en

L1 = en.PNorm(1.0)
L2 = en.PNorm(2.0)
LINF = en.PNorm(math.inf)
NORMS = {"l1": L1, "l2": L2, "linf": LINF, "wl1": en.WeightedL1(1.0 / 3.0, 3.0)}

UNIT_SQUARE = eg.rectangle(1.0, 1.0, center=(0.5, 0.5))
DIAMOND = eg.ConvexPolygon([(1, 0), (0, 1), (-1, 0), (0, -1)])


# ---------------------------------------------------------------------------
# Canonical form and hulls
# ---------------------------------------------------------------------------

def test_canonical_form_rules():
    # clockwise input, duplicate points and collinear triples all normalize
    p = eg.ConvexPolygon([(0, 1), (0.5, 1), (1, 1), (1, 0), (1, 0), (0, 0)])
    assert p.n == 4
    assert p.vertices[0].tolist() == [0.0, 0.0]
    assert p.area == pytest.approx(1.0)


def test_canonical_rejects_degenerate():
    with pytest.raises(eg.GeometryError):
        eg.ConvexPolygon([(0, 0), (1, 0)])
    with pytest.raises(eg.GeometryError):
        eg.ConvexPolygon([(0, 0), (1, 0), (2, 0)])


def test_hull_drops_interior_point():
    hull = eg.convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
    assert hull == UNIT_SQUARE


def test_hull_of_triangle_with_centroid():
    tri = [(0, 0), (3, 0), (0, 3)]
    hull = eg.convex_hull(tri + [(1, 1)])
    assert hull == eg.ConvexPolygon(tri)


def test_hull_collinear_rejected():
    with pytest.raises(eg.GeometryError, match="collinear"):
        eg.convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])


def test_hull_perimeter_never_exceeds_polyline():
    # taking the hull cannot increase boundary length in any norm
    rng = np.random.default_rng(42)
    pts = rng.normal(size=(1000, 2))
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) < 1.5]
    hull = eg.convex_hull(pts)
    for norm in NORMS.values():
        assert eg.perimeter(hull, norm) <= eg.polyline_perimeter(pts, norm) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
                min_size=4, max_size=40))
def test_hull_contains_inputs(points):
    pts = np.array(points)
    try:
        hull = eg.convex_hull(pts)
    except eg.GeometryError:
        return
    # every input point inside or on the boundary (tolerance-inflated)
    assert np.all(hull.contains(pts, margin=-1e-7))


# ---------------------------------------------------------------------------
# Minkowski sums
# ---------------------------------------------------------------------------

def test_minkowski_squares():
    s = eg.minkowski_sum(UNIT_SQUARE, UNIT_SQUARE)
    assert s == eg.rectangle(2.0, 2.0, center=(1.0, 1.0))


def test_minkowski_square_diamond_octagon():
    s = eg.minkowski_sum(UNIT_SQUARE, DIAMOND)
    assert s.n == 8


def test_minkowski_perimeter_additive():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = eg.random_convex_polygon(rng, aspect=rng.uniform(0.5, 2.0))
        q = eg.random_convex_polygon(rng, angle=rng.uniform(0, np.pi))
        s = eg.minkowski_sum(p, q)
        for norm in NORMS.values():
            total = eg.perimeter(s, norm)
            parts = eg.perimeter(p, norm) + eg.perimeter(q, norm)
            assert total == pytest.approx(parts, rel=1e-12)


def test_minkowski_vertex_budget():
    rng = np.random.default_rng(2)
    p = eg.random_convex_polygon(rng, n_points=20)
    q = eg.random_convex_polygon(rng, n_points=20)
    assert eg.minkowski_sum(p, q).n <= p.n + q.n


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def test_perimeter_examples():
    assert eg.perimeter(UNIT_SQUARE, L1) == pytest.approx(4.0)
    assert eg.perimeter(UNIT_SQUARE, L2) == pytest.approx(4.0)
    assert eg.perimeter(DIAMOND, L1) == pytest.approx(8.0)


def test_area_examples():
    assert UNIT_SQUARE.area == pytest.approx(1.0)
    assert DIAMOND.area == pytest.approx(2.0)
    disc = eg.regular_polygon(256, 1.0)
    assert disc.area == pytest.approx(math.pi, abs=1e-3)


def test_support_function_examples():
    sq = eg.rectangle(2.0, 2.0)
    assert eg.support_function(sq, (1.0, 0.0)) == pytest.approx(1.0)
    d = 1.0 / math.sqrt(2.0)
    assert eg.support_function(sq, (d, d)) == pytest.approx(math.sqrt(2.0))
    batch = eg.support_function(sq, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert batch == pytest.approx([1.0, 1.0])


def test_scaling_identities():
    rng = np.random.default_rng(7)
    p = eg.random_convex_polygon(rng)
    for t in (0.5, 2.0, 3.0):
        q = eg.scale_translate(p, t)
        assert q.area == pytest.approx(t * t * p.area, rel=1e-12)
        for norm in NORMS.values():
            assert eg.perimeter(q, norm) == pytest.approx(t * eg.perimeter(p, norm),
                                                          rel=1e-12)


def test_scale_rejects_nonpositive():
    with pytest.raises(eg.GeometryError):
        eg.scale_translate(UNIT_SQUARE, 0.0)


def test_identity_transform():
    assert eg.scale_translate(UNIT_SQUARE, 1.0, (0.0, 0.0)) == UNIT_SQUARE


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------

def test_hausdorff_examples():
    sq = UNIT_SQUARE
    assert eg.hausdorff_distance(sq, sq) == pytest.approx(0.0, abs=1e-15)
    shifted = eg.scale_translate(sq, 1.0, (0.3, 0.0))
    assert eg.hausdorff_distance(sq, shifted) == pytest.approx(0.3)
    # nested centered squares: farthest corner to nearest point
    assert eg.hausdorff_distance(eg.rectangle(2, 2), eg.rectangle(4, 4)) == (
        pytest.approx(math.sqrt(2.0)))


def test_hausdorff_metric_properties():
    rng = np.random.default_rng(11)
    for _ in range(15):
        a = eg.random_convex_polygon(rng)
        b = eg.random_convex_polygon(rng, aspect=1.4)
        c = eg.random_convex_polygon(rng, angle=0.9)
        dab = eg.hausdorff_distance(a, b)
        assert dab == pytest.approx(eg.hausdorff_distance(b, a), abs=1e-14)
        assert dab <= eg.hausdorff_distance(a, c) + eg.hausdorff_distance(c, b) + 1e-12


def test_hausdorff_catches_interior_maximum():
    # max support gap between rotated squares falls between event angles
    a = eg.rectangle(2.0, 2.0)
    b = eg.rotate(a, math.pi / 4)
    # corner of a at distance sqrt(2), support of b there is 1
    assert eg.hausdorff_distance(a, b) == pytest.approx(math.sqrt(2.0) - 1.0)


# ---------------------------------------------------------------------------
# Centering
# ---------------------------------------------------------------------------

def test_center_translates_centroid():
    p = eg.rectangle(2.0, 2.0, center=(1.0, 1.0))
    assert eg.center(p) == eg.rectangle(2.0, 2.0)


def test_symmetrize_defect():
    _, defect = eg.center(eg.rectangle(2.0, 2.0, center=(5.0, -3.0)), "symmetrize")
    assert defect == pytest.approx(0.0, abs=1e-12)
    tri = eg.ConvexPolygon([(0, 0), (1, 0), (0, 1)])
    _, defect = eg.center(tri, "symmetrize")
    # triangle is not centrally symmetric: defect computed via support gaps
    centered = eg.center(tri)
    oracle = eg.hausdorff_distance(centered, eg.ConvexPolygon(-centered.vertices))
    assert defect == pytest.approx(oracle)
    assert defect > 0.1


def test_center_bad_mode():
    with pytest.raises(ValueError):
        eg.center(UNIT_SQUARE, "bogus")


# ---------------------------------------------------------------------------
# Support vectors and half-plane intersections
# ---------------------------------------------------------------------------

def test_polygon_from_support_square():
    sv = eg.SupportVector(np.ones(4) if False else np.ones(8))
    # K = 4 is below the minimum; use the documented constructor instead
    with pytest.raises(eg.GeometryError):
        eg.SupportVector(np.ones(4))
    p = eg.halfplane_intersection(
        [[1, 0], [0, 1], [-1, 0], [0, -1]], [1.0, 1.0, 1.0, 1.0])
    assert p == eg.rectangle(2.0, 2.0)


def test_polygon_from_support_regular():
    sv = eg.SupportVector(np.ones(64))
    p = eg.polygon_from_support(sv)
    assert p.n == 64
    disc = eg.regular_polygon(256, 1.0)
    assert eg.hausdorff_distance(p, disc) < 2e-3


def test_support_vector_invariants():
    sv = eg.SupportVector.from_polygon(DIAMOND, 16)
    assert sv.is_feasible()
    # face length of face k is its cone slack over sin(2 pi / K)
    chain = sv.vertex_chain()
    lens = np.hypot(*(chain - np.roll(chain, 1, axis=0)).T)
    slacks = sv.cone_slacks()
    assert np.allclose(lens, slacks / math.sin(2.0 * math.pi / 16), atol=1e-12)


def test_cone_violation_roundtrip_mismatch():
    h = np.ones(8)
    h[3] = 1.5  # violates the convexity cone at index 3
    sv = eg.SupportVector(h)
    assert not sv.is_feasible()
    p = eg.polygon_from_support(sv)
    reconstructed = eg.support_function(p, sv.directions[3])
    assert reconstructed < h[3] - 1e-10  # non-binding line detected


def test_support_roundtrip_convergence():
    # sampled support lines straddling an edge normal bulge outward by up to
    # (edge length) * (angular step) / 4, so polygons converge linearly
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = eg.random_convex_polygon(rng, n_points=10)
        d512 = eg.hausdorff_distance(
            p, eg.polygon_from_support(eg.SupportVector.from_polygon(p, 512)))
        d1024 = eg.hausdorff_distance(
            p, eg.polygon_from_support(eg.SupportVector.from_polygon(p, 1024)))
        assert d512 < 0.5 * p.diameter * (math.pi / 512) + 1e-12
        assert d1024 < 0.8 * d512  # and it keeps shrinking


def test_support_roundtrip_quadratic_when_normals_sampled():
    # with every edge normal among the samples the error is corner-fan only
    p = eg.regular_polygon(64, 1.0)
    q = eg.polygon_from_support(eg.SupportVector.from_polygon(p, 512))
    assert eg.hausdorff_distance(p, q) < max(2.0 * p.diameter * (math.pi / 512) ** 2,
                                             1e-6)


def test_support_vector_requires_positive():
    sv = eg.SupportVector(np.concatenate([np.ones(7), [-0.1]]))
    with pytest.raises(eg.GeometryError):
        eg.polygon_from_support(sv)


def test_halfplane_intersection_unbounded():
    with pytest.raises(eg.GeometryError, match="unbounded"):
        eg.halfplane_intersection([[1, 0], [0, 1], [0.7, 0.7]], [1.0, 1.0, 1.0])


# ---------------------------------------------------------------------------
# Sandwich epsilon
# ---------------------------------------------------------------------------

def test_sandwich_pure_dilation():
    u = eg.regular_polygon(256, 1.0)
    v = eg.scale_translate(u, 1.1)
    assert eg.sandwich_epsilon(u, v) == pytest.approx(0.1, rel=1e-9)
    assert eg.sandwich_epsilon(u, u) == pytest.approx(0.0, abs=1e-12)


def test_sandwich_bound_by_hausdorff():
    # eps* <= dist_H(u, v) / dist(0, boundary of u) on random pairs
    rng = np.random.default_rng(23)
    for _ in range(100):
        u = eg.random_convex_polygon(rng, radius=rng.uniform(0.8, 1.3))
        v = eg.random_convex_polygon(rng, radius=rng.uniform(0.8, 1.3))
        eps = eg.sandwich_epsilon(u, v)
        bound = eg.hausdorff_distance(u, v) / eg.boundary_distance(u)
        assert eps <= bound + 1e-9


def test_sandwich_requires_interior_origin():
    off = eg.rectangle(1.0, 1.0, center=(5.0, 5.0))
    with pytest.raises(eg.GeometryError, match="origin"):
        eg.sandwich_epsilon(off, UNIT_SQUARE)


# ---------------------------------------------------------------------------
# Inradius and auxiliary measures
# ---------------------------------------------------------------------------

def test_inradius_square():
    assert eg.inradius(eg.rectangle(1.0, 1.0)) == pytest.approx(0.5, rel=1e-9)
    assert eg.inradius(eg.rectangle(3.0, 1.0 / 3.0)) == pytest.approx(1.0 / 6.0,
                                                                     rel=1e-9)


def test_boundary_distance():
    assert eg.boundary_distance(eg.rectangle(2.0, 4.0)) == pytest.approx(1.0)
    assert eg.boundary_distance(UNIT_SQUARE, (0.5, 0.5)) == pytest.approx(0.5)


def test_arclength_of_points():
    sq = eg.rectangle(1.0, 1.0, center=(0.5, 0.5))
    s = eg.arclength_of_points(sq, [(0.5, 0.0), (1.0, 0.5)])
    assert s == pytest.approx([0.5, 1.5])


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

def test_polygon_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    p = eg.random_convex_polygon(rng, n_points=9)
    path = tmp_path / "poly.csv"
    eg.write_polygon_csv(p, path)
    q = eg.read_polygon_csv(path)
    assert q == p


def test_polygon_csv_validates(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0\n1,0\n2,0\n")
    with pytest.raises(eg.GeometryError):
        eg.read_polygon_csv(path)
    path.write_text("0,0,0\n")
    with pytest.raises(eg.GeometryError, match="expected"):
        eg.read_polygon_csv(path)
