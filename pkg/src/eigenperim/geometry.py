"""Convex-polygon primitives: hulls, Minkowski sums, anisotropic perimeter,
support functions, Hausdorff distance, scaling and centering.

Polygons are stored in a canonical form: counterclockwise vertex order, no
duplicate or collinear-triple vertices, lexicographically smallest vertex
first.  Collinearity tolerances are scale-aware (1e-12 * diameter**2 on cross
products), so the primitives behave identically on tiny and huge inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "ConvexPolygon",
    "SupportVector",
    "GeometryError",
    "convex_hull",
    "minkowski_sum",
    "perimeter",
    "polyline_perimeter",
    "area",
    "support_function",
    "hausdorff_distance",
    "scale_translate",
    "rotate",
    "reflect",
    "center",
    "polygon_from_support",
    "halfplane_intersection",
    "sandwich_epsilon",
    "inradius",
    "chebyshev_center",
    "boundary_distance",
    "regular_polygon",
    "rectangle",
    "random_convex_polygon",
    "read_polygon_csv",
    "write_polygon_csv",
]

# Relative cross-product threshold used for convexity / collinearity tests.
CROSS_TOL = 1e-12


class GeometryError(ValueError):
    """Raised for degenerate or invalid geometric input."""


def _cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (
        a[..., 1] - o[..., 1]
    ) * (b[..., 0] - o[..., 0])


def _rot90(v):
    """Rotate vector(s) by +90 degrees."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def _scale_of(points) -> float:
    pts = np.asarray(points, dtype=float)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(max(np.hypot(span[0], span[1]), 1e-300))


def _canonical_vertices(points) -> np.ndarray:
    """Reduce a ccw-oriented vertex loop to canonical form."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    scale = _scale_of(pts)
    # Orientation: make signed area positive.
    x, y = pts[:, 0], pts[:, 1]
    signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    if signed < 0:
        pts = pts[::-1]
    # Drop duplicates first, then collinear triples, until stable.  Reflex
    # vertices are rejected rather than silently removed: deleting them
    # could cascade into dropping true vertices of a garbled loop.
    tol = CROSS_TOL * scale * scale
    dup_tol = 1e-12 * scale
    for _ in range(len(pts) + 2):
        n = len(pts)
        if n < 3:
            raise GeometryError("polygon degenerates to fewer than 3 vertices")
        dup = np.hypot(*(pts - np.roll(pts, -1, axis=0)).T) <= dup_tol
        if dup.any():
            pts = pts[~dup]
            continue
        prev = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        cross = _cross(prev, pts, nxt)
        if np.any(cross < -tol):
            raise GeometryError("vertices are not in convex position")
        collinear = cross <= tol
        if not collinear.any():
            break
        pts = pts[~collinear]
    else:  # pragma: no cover - loop always stabilizes
        raise GeometryError("canonicalization did not stabilize")
    if len(pts) < 3:
        raise GeometryError("polygon degenerates to fewer than 3 vertices")
    # Validate strict convexity.
    prev = np.roll(pts, 1, axis=0)
    nxt = np.roll(pts, -1, axis=0)
    if np.any(_cross(prev, pts, nxt) <= tol):
        raise GeometryError("vertices are not in strictly convex position")
    # Rotate so the lexicographically smallest vertex comes first.
    start = np.lexsort((pts[:, 1], pts[:, 0]))[0]
    return np.roll(pts, -start, axis=0)


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon in canonical ccw form."""

    vertices: np.ndarray

    def __post_init__(self):
        verts = _canonical_vertices(self.vertices)
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    # -- basic measures ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        """Edge vectors v[i+1] - v[i], cyclic."""
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        e.setflags(write=False)
        return e

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @cached_property
    def edge_normals(self) -> np.ndarray:
        """Outward unit normals, one per edge."""
        n = -_rot90(self.edges)
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        n.setflags(write=False)
        return n

    @cached_property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @cached_property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        c = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        out = ((v + w) * c[:, None]).sum(axis=0) / (6.0 * self.area)
        out.setflags(write=False)
        return out

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=-1)
        return float(np.sqrt(d2.max()))

    @cached_property
    def euclidean_perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @cached_property
    def arclengths(self) -> np.ndarray:
        """Cumulative Euclidean arclength at each vertex (starts at 0)."""
        s = np.concatenate([[0.0], np.cumsum(self.edge_lengths)])[:-1]
        s.setflags(write=False)
        return s

    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    # -- predicates ---------------------------------------------------------

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        """Strict interior test; ``margin`` is an absolute clearance."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        inside = np.ones(len(pts), dtype=bool)
        for a, e, ln in zip(self.vertices, self.edges, self.edge_lengths):
            cr = e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])
            inside &= cr > margin * ln
        return inside if np.asarray(points).ndim == 2 else bool(inside[0])

    def approx_equal(self, other: "ConvexPolygon", tol: float = 1e-9) -> bool:
        if self.n != other.n:
            return False
        return bool(np.allclose(self.vertices, other.vertices, atol=tol * self.diameter))

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices)
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def convex_hull(points) -> ConvexPolygon:
    """Convex hull in canonical form.

    Vertex selection is delegated to qhull (exact-arithmetic orientation
    tests; a tolerance-based monotone chain can evict true vertices on
    inputs with ulp-level ties); the canonical form on top is ours.
    Raises GeometryError if the input is degenerate (all points collinear).
    """
    from scipy.spatial import ConvexHull as _QHull
    from scipy.spatial import QhullError

    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        raise GeometryError("need at least 3 distinct points")
    try:
        hull = _QHull(pts)
    except QhullError as exc:
        raise GeometryError("degenerate input: points are collinear") from exc
    return ConvexPolygon(pts[hull.vertices])  # qhull returns ccw order in 2-D


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> ConvexPolygon:
    ang = phase + 2.0 * np.pi * np.arange(n) / n
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=1) * radius + np.asarray(center, dtype=float)
    return ConvexPolygon(pts)


def rectangle(width: float, height: float, center=(0.0, 0.0)) -> ConvexPolygon:
    cx, cy = center
    w, h = width / 2.0, height / 2.0
    return ConvexPolygon(
        [[cx - w, cy - h], [cx + w, cy - h], [cx + w, cy + h], [cx - w, cy + h]]
    )


def random_convex_polygon(rng: np.random.Generator, n_points: int = 12,
                          radius: float = 1.0, aspect: float = 1.0,
                          angle: float = 0.0) -> ConvexPolygon:
    """Random convex polygon with centroid at the origin."""
    theta = np.sort(rng.uniform(0.0, 2.0 * np.pi, n_points))
    r = rng.uniform(0.5, 1.0, n_points) * radius
    pts = np.stack([r * np.cos(theta) * aspect, r * np.sin(theta)], axis=1)
    if angle:
        c, s = np.cos(angle), np.sin(angle)
        pts = pts @ np.array([[c, s], [-s, c]])
    hull = convex_hull(pts)
    return scale_translate(hull, 1.0, -hull.centroid)


# ---------------------------------------------------------------------------
# Measures with respect to a norm
# ---------------------------------------------------------------------------

def perimeter(p: ConvexPolygon, norm) -> float:
    """Boundary length measured by ``norm`` (any callable on 2-vectors)."""
    return float(np.sum(norm(p.edges)))


def polyline_perimeter(points, norm) -> float:
    """Norm-length of the closed polyline through ``points`` in order."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return float(np.sum(norm(np.roll(pts, -1, axis=0) - pts)))


def area(p: ConvexPolygon) -> float:
    return p.area


def support_function(p: ConvexPolygon, u) -> float | np.ndarray:
    """h(u) = max over vertices of x . u."""
    u_arr = np.asarray(u, dtype=float)
    vals = p.vertices @ np.atleast_2d(u_arr).T
    out = vals.max(axis=0)
    return float(out[0]) if u_arr.ndim == 1 else out


# ---------------------------------------------------------------------------
# Hausdorff distance
# ---------------------------------------------------------------------------

def _normal_angles(p: ConvexPolygon) -> np.ndarray:
    n = p.edge_normals
    return np.arctan2(n[:, 1], n[:, 0])


def hausdorff_distance(p: ConvexPolygon, q: ConvexPolygon) -> float:
    """Hausdorff distance between convex polygons.

    Uses the support-function identity dist_H = max_u |h_p(u) - h_q(u)|,
    maximized exactly over the merged edge-normal event angles plus the
    analytic interior maximum on each angular interval.
    """
    events = np.unique(np.concatenate([_normal_angles(p), _normal_angles(q)]))
    best = 0.0
    m = len(events)
    for i in range(m):
        a = events[i]
        b = events[(i + 1) % m] + (0.0 if i + 1 < m else 2.0 * np.pi)
        mid = 0.5 * (a + b)
        vp = p.vertices[np.argmax(p.vertices @ [np.cos(mid), np.sin(mid)])]
        vq = q.vertices[np.argmax(q.vertices @ [np.cos(mid), np.sin(mid)])]
        d = vp - vq
        cand = [a, b]
        phi = np.arctan2(d[1], d[0])
        for t in (phi, phi + np.pi, phi - np.pi, phi + 2.0 * np.pi):
            if a <= t <= b:
                cand.append(t)
        for t in cand:
            val = abs(d @ [np.cos(t), np.sin(t)])
            if val > best:
                best = val
    return best


# ---------------------------------------------------------------------------
# Affine maps and centering
# ---------------------------------------------------------------------------

def scale_translate(p: ConvexPolygon, t: float = 1.0, shift=(0.0, 0.0)) -> ConvexPolygon:
    if t <= 0:
        raise GeometryError("scale factor must be positive")
    return ConvexPolygon(p.vertices * t + np.asarray(shift, dtype=float))


def rotate(p: ConvexPolygon, angle: float) -> ConvexPolygon:
    c, s = np.cos(angle), np.sin(angle)
    return ConvexPolygon(p.vertices @ np.array([[c, s], [-s, c]]))


def reflect(p: ConvexPolygon, axis_angle: float = 0.0) -> ConvexPolygon:
    """Reflect across the line through the origin at ``axis_angle``."""
    c, s = np.cos(2.0 * axis_angle), np.sin(2.0 * axis_angle)
    return ConvexPolygon(p.vertices @ np.array([[c, s], [s, -c]]))


def center(p: ConvexPolygon, mode: str = "centroid"):
    """Translate the centroid to the origin.

    mode="centroid" returns the centered polygon; mode="symmetrize" returns
    (centered polygon, asymmetry defect dist_H(q, -q)).
    """
    q = scale_translate(p, 1.0, -p.centroid)
    if mode == "centroid":
        return q
    if mode == "symmetrize":
        defect = hausdorff_distance(q, ConvexPolygon(-q.vertices))
        return q, defect
    raise ValueError(f"unknown centering mode: {mode!r}")


# ---------------------------------------------------------------------------
# Minkowski sum via edge merge
# ---------------------------------------------------------------------------

def _bottom_roll(p: ConvexPolygon) -> np.ndarray:
    """Vertices rolled so the bottom-most (then left-most) vertex is first."""
    v = p.vertices
    start = np.lexsort((v[:, 0], v[:, 1]))[0]
    return np.roll(v, -start, axis=0)


def _unwrapped_edge_angles(verts: np.ndarray) -> np.ndarray:
    e = np.roll(verts, -1, axis=0) - verts
    raw = np.arctan2(e[:, 1], e[:, 0])
    ang = np.empty(len(raw))
    ang[0] = raw[0]
    for i in range(1, len(raw)):
        turn = raw[i] - raw[i - 1]
        while turn <= -1e-15:
            turn += 2.0 * np.pi
        ang[i] = ang[i - 1] + turn
    return ang


def minkowski_sum(p: ConvexPolygon, q: ConvexPolygon) -> ConvexPolygon:
    """Minkowski sum by merging the edge sequences of p and q by angle.

    The edge multiset of the sum is the union of both edge multisets, which
    makes the norm-perimeter exactly additive.
    """
    vp, vq = _bottom_roll(p), _bottom_roll(q)
    ep = np.roll(vp, -1, axis=0) - vp
    eq = np.roll(vq, -1, axis=0) - vq
    ap, aq = _unwrapped_edge_angles(vp), _unwrapped_edge_angles(vq)
    edges = []
    i = j = 0
    while i < len(ep) or j < len(eq):
        if j >= len(eq) or (i < len(ep) and ap[i] <= aq[j]):
            edges.append(ep[i])
            i += 1
        else:
            edges.append(eq[j])
            j += 1
    start = vp[0] + vq[0]
    verts = start + np.concatenate([[(0.0, 0.0)], np.cumsum(edges, axis=0)[:-1]])
    return ConvexPolygon(verts)


# ---------------------------------------------------------------------------
# Half-plane intersections and support vectors
# ---------------------------------------------------------------------------

def halfplane_intersection(directions, offsets) -> ConvexPolygon:
    """Intersection of half-planes {x : x . u_k <= c_k} with all c_k > 0.

    Computed by polar duality: the intersection is the polar of the convex
    hull of the dual points u_k / c_k, which keeps the construction exact for
    polygonal data.
    """
    u = np.asarray(directions, dtype=float).reshape(-1, 2)
    c = np.asarray(offsets, dtype=float).reshape(-1)
    if np.any(c <= 0):
        raise GeometryError("half-plane offsets must be positive (origin inside)")
    dual = u / c[:, None]
    hull = convex_hull(dual)
    w = hull.vertices
    if not hull.contains([0.0, 0.0]):
        raise GeometryError("unbounded half-plane intersection")
    wn = np.roll(w, -1, axis=0)
    det = w[:, 0] * wn[:, 1] - w[:, 1] * wn[:, 0]
    verts = np.stack([(wn[:, 1] - w[:, 1]) / det, (w[:, 0] - wn[:, 0]) / det], axis=1)
    return ConvexPolygon(verts)


@dataclass(frozen=True)
class SupportVector:
    """Support-function samples h_k > 0 at K uniform angles 2*pi*k/K.

    Feasibility cone: h_{k-1} + h_{k+1} >= 2 cos(2 pi / K) h_k (cyclic), which
    is exactly the condition that every sampled support line is binding.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        if vals.ndim != 1 or len(vals) < 8:
            raise GeometryError("support vector needs at least 8 angles")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values)

    @cached_property
    def angles(self) -> np.ndarray:
        a = 2.0 * np.pi * np.arange(self.k) / self.k
        a.setflags(write=False)
        return a

    @cached_property
    def directions(self) -> np.ndarray:
        d = np.stack([np.cos(self.angles), np.sin(self.angles)], axis=1)
        d.setflags(write=False)
        return d

    def cone_slacks(self) -> np.ndarray:
        h = self.values
        return np.roll(h, 1) + np.roll(h, -1) - 2.0 * np.cos(2.0 * np.pi / self.k) * h

    def is_feasible(self, tol: float = 1e-9) -> bool:
        scale = float(np.max(np.abs(self.values)))
        return bool(np.all(self.values > 0) and np.all(self.cone_slacks() >= -tol * scale))

    @classmethod
    def from_polygon(cls, p: ConvexPolygon, k: int) -> "SupportVector":
        ang = 2.0 * np.pi * np.arange(k) / k
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return cls((p.vertices @ dirs.T).max(axis=0))

    def vertex_chain(self) -> np.ndarray:
        """Raw vertex chain w_k = intersection of support lines k and k+1.

        Zero-length edges (non-binding interior constraints) are kept, which
        preserves the h_k -> vertex dependence needed for gradients.
        """
        u = self.directions
        un = np.roll(u, -1, axis=0)
        h = self.values
        hn = np.roll(h, -1)
        det = u[:, 0] * un[:, 1] - u[:, 1] * un[:, 0]
        x = (h * un[:, 1] - hn * u[:, 1]) / det
        y = (hn * u[:, 0] - h * un[:, 0]) / det
        return np.stack([x, y], axis=1)


def polygon_from_support(s: SupportVector) -> ConvexPolygon:
    """Intersection of the sampled support half-planes."""
    if np.any(s.values <= 0):
        raise GeometryError("support values must be positive (origin inside)")
    return halfplane_intersection(s.directions, s.values)


# ---------------------------------------------------------------------------
# Radial gauges and the sandwich epsilon
# ---------------------------------------------------------------------------

def _gauge_rows(p: ConvexPolygon) -> np.ndarray:
    """Rows a_i with gauge(x) = max_i a_i . x, valid when 0 is interior."""
    verts = p.vertices
    edges = p.edges
    denom = edges[:, 0] * verts[:, 1] - edges[:, 1] * verts[:, 0]
    if np.any(denom >= 0):
        # cross(edge, -v) must be negative for origin strictly inside
        raise GeometryError("origin is not strictly interior")
    return np.stack([edges[:, 1] / denom, -edges[:, 0] / denom], axis=1)


def gauge(p: ConvexPolygon, x) -> float | np.ndarray:
    """Minkowski gauge of the polygon: inf{t > 0 : x / t in p}."""
    rows = _gauge_rows(p)
    x_arr = np.asarray(x, dtype=float)
    vals = np.atleast_2d(x_arr) @ rows.T
    out = vals.max(axis=1)
    return float(out[0]) if x_arr.ndim == 1 else out


def sandwich_epsilon(u: ConvexPolygon, v: ConvexPolygon) -> float:
    """Smallest eps >= 0 with (1-eps) u <= v <= (1+eps) u.

    Both polygons must contain the origin strictly.  Radial gauge ratios are
    piecewise monotone between vertex directions of u and v, so the extrema
    are attained at the merged vertex directions.
    """
    ru, rv = _gauge_rows(u), _gauge_rows(v)
    dirs = np.concatenate([u.vertices, v.vertices], axis=0)
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    gu = (dirs @ ru.T).max(axis=1)
    gv = (dirs @ rv.T).max(axis=1)
    ratio = gu / gv  # = r_v(d) / r_u(d)
    return float(max(1.0 - ratio.min(), ratio.max() - 1.0, 0.0))


# ---------------------------------------------------------------------------
# Inradius and boundary helpers
# ---------------------------------------------------------------------------

def chebyshev_center(p: ConvexPolygon):
    """Deepest interior point and its boundary clearance, via an LP."""
    from scipy.optimize import linprog

    n = p.edge_normals
    b = np.sum(n * p.vertices, axis=1)
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=np.column_stack([n, np.ones(len(b))]),
        b_ub=b,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:  # pragma: no cover - bounded feasible by construction
        raise GeometryError(f"chebyshev center LP failed: {res.message}")
    return res.x[:2].copy(), float(res.x[2])


def inradius(p: ConvexPolygon) -> float:
    return chebyshev_center(p)[1]


def boundary_distance(p: ConvexPolygon, point=(0.0, 0.0)) -> float:
    """Euclidean distance from ``point`` to the boundary of ``p``."""
    x = np.asarray(point, dtype=float)
    a = p.vertices
    e = p.edges
    t = np.clip(((x - a) * e).sum(axis=1) / (e * e).sum(axis=1), 0.0, 1.0)
    feet = a + t[:, None] * e
    return float(np.hypot(*(feet - x).T).min())


def arclength_of_points(p: ConvexPolygon, points) -> np.ndarray:
    """Arclength positions of boundary points (nearest-edge projection)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = p.vertices
    e = p.edges
    ee = (e * e).sum(axis=1)
    out = np.empty(len(pts))
    for i, x in enumerate(pts):
        t = np.clip(((x - a) * e).sum(axis=1) / ee, 0.0, 1.0)
        feet = a + t[:, None] * e
        d = np.hypot(*(feet - x).T)
        j = int(np.argmin(d))
        out[i] = p.arclengths[j] + t[j] * p.edge_lengths[j]
    return out


# ---------------------------------------------------------------------------
# Polygon CSV interchange
# ---------------------------------------------------------------------------

def write_polygon_csv(p: ConvexPolygon, path) -> None:
    lines = [f"{x:.17g},{y:.17g}" for x, y in p.vertices]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_polygon_csv(path) -> ConvexPolygon:
    pts = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise GeometryError(f"{path}:{ln}: expected 'x,y', got {line!r}")
            pts.append((float(parts[0]), float(parts[1])))
    return ConvexPolygon(np.array(pts))
