"""Norms on the plane: evaluation, one-sided smoothness probes, degenerate
directions, additivity tests, and Wulff shapes.

Supported variants: p-norms (1 <= p <= inf), weighted l1, polygonal gauges,
weighted sums, and rotations.  All variants are even (rho(-x) = rho(x)) by
construction.  One-sided directional derivatives are computed analytically
for every variant; a difference-quotient probe with Richardson extrapolation
is provided as an independent cross-check.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import ConvexPolygon, GeometryError, halfplane_intersection, _rot90

__all__ = [
    "Norm",
    "PNorm",
    "WeightedL1",
    "Polygonal",
    "SumNorm",
    "Rotated",
    "DirectionalProbe",
    "NormSpecError",
    "build_norm",
    "parse_norm",
    "one_sided_derivatives",
    "numeric_one_sided",
    "is_degenerate",
    "additivity_on_pair",
    "degenerate_directions",
    "wulff_shape",
    "surface_energy",
]

_ACTIVE_TOL = 1e-12


class NormSpecError(ValueError):
    """Raised when a norm description violates an invariant."""


@dataclass(frozen=True)
class DirectionalProbe:
    """One-sided derivatives of s -> rho(e + s * e_perp) at s = 0.

    e_perp is e rotated by +90 degrees.  Always d_minus <= d_plus, and both
    are bounded by rho(e_perp) in absolute value.
    """

    e: np.ndarray
    e_perp: np.ndarray
    d_minus: float
    d_plus: float

    @property
    def gap(self) -> float:
        return self.d_plus - self.d_minus


class Norm:
    """Base class; subclasses implement _eval and _one_sided."""

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        vals = self._eval(np.atleast_2d(x_arr))
        return float(vals[0]) if x_arr.ndim == 1 else vals

    def one_sided(self, e) -> tuple[float, float]:
        """Analytic (d_minus, d_plus) at unit vector e, e_perp = rot90(e)."""
        e = np.asarray(e, dtype=float)
        e = e / np.hypot(e[0], e[1])
        return self._one_sided(e)

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def _one_sided(self, e: np.ndarray) -> tuple[float, float]:  # pragma: no cover
        raise NotImplementedError


def _abs_term_one_sided(c: float, d: float) -> tuple[float, float]:
    """One-sided derivatives of s -> |c + s d| at s = 0."""
    if c > 0:
        return d, d
    if c < 0:
        return -d, -d
    return -abs(d), abs(d)


@dataclass(frozen=True)
class PNorm(Norm):
    """(|x1|^p + |x2|^p)^(1/p); p = inf gives the max norm."""

    p: float

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise NormSpecError(f"p-norm exponent must be >= 1, got {self.p}")

    def _eval(self, x):
        ax = np.abs(x)
        if self.p == 1.0:
            return ax.sum(axis=-1)
        if math.isinf(self.p):
            return ax.max(axis=-1)
        if self.p == 2.0:
            return np.hypot(ax[..., 0], ax[..., 1])
        m = ax.max(axis=-1)
        safe = np.where(m > 0, m, 1.0)
        out = safe * ((ax / safe[..., None]) ** self.p).sum(axis=-1) ** (1.0 / self.p)
        return np.where(m > 0, out, 0.0)

    def _one_sided(self, e):
        ep = _rot90(e)
        if self.p == 1.0:
            m1, p1 = _abs_term_one_sided(e[0], ep[0])
            m2, p2 = _abs_term_one_sided(e[1], ep[1])
            return m1 + m2, p1 + p2
        if math.isinf(self.p):
            f = np.abs(e)
            sides = [_abs_term_one_sided(e[i], ep[i]) for i in range(2)]
            if f[0] > f[1]:
                return sides[0]
            if f[1] > f[0]:
                return sides[1]
            # both coordinates active: derivative of a max
            return min(sides[0][0], sides[1][0]), max(sides[0][1], sides[1][1])
        # smooth for 1 < p < inf: grad = sign(x) |x|^(p-1) / rho^(p-1)
        r = self((e[0], e[1]))
        g = np.sign(e) * np.abs(e) ** (self.p - 1.0) / r ** (self.p - 1.0)
        d = float(g @ ep)
        return d, d


@dataclass(frozen=True)
class WeightedL1(Norm):
    """w1 |x1| + w2 |x2|."""

    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 <= 0 or self.w2 <= 0:
            raise NormSpecError("weighted-l1 weights must be positive")

    def _eval(self, x):
        return self.w1 * np.abs(x[..., 0]) + self.w2 * np.abs(x[..., 1])

    def _one_sided(self, e):
        ep = _rot90(e)
        m1, p1 = _abs_term_one_sided(e[0], ep[0])
        m2, p2 = _abs_term_one_sided(e[1], ep[1])
        return self.w1 * m1 + self.w2 * m2, self.w1 * p1 + self.w2 * p2


@dataclass(frozen=True)
class Polygonal(Norm):
    """Gauge (Minkowski functional) of a centrally symmetric convex polygon.

    Evaluation is exact per edge: rho(x) = max_k a_k . x with one linear
    functional a_k per ball edge.
    """

    ball: ConvexPolygon

    def __post_init__(self):
        b = self.ball
        if b.n < 4:
            raise NormSpecError("polygonal ball needs at least 4 vertices")
        if not b.contains([0.0, 0.0]):
            raise NormSpecError("origin must be strictly inside the polygonal ball")
        # central symmetry: every vertex must have its negative among the vertices
        v = b.vertices
        tol = 1e-9 * b.diameter
        for x in v:
            if np.min(np.hypot(*(v + x).T)) > tol:
                raise NormSpecError("polygonal ball must be centrally symmetric")

    @cached_property
    def _rows(self) -> np.ndarray:
        from .geometry import _gauge_rows

        return _gauge_rows(self.ball)

    def _eval(self, x):
        return (x @ self._rows.T).max(axis=-1)

    def _one_sided(self, e):
        vals = self._rows @ e
        m = vals.max()
        active = self._rows[vals >= m - _ACTIVE_TOL * max(abs(m), 1.0)]
        ep = _rot90(e)
        d = active @ ep
        return float(d.min()), float(d.max())


@dataclass(frozen=True)
class SumNorm(Norm):
    """Positive combination sum_i w_i rho_i."""

    terms: tuple[tuple[float, Norm], ...]

    def __post_init__(self):
        if not self.terms:
            raise NormSpecError("sum norm needs at least one term")
        if any(w <= 0 for w, _ in self.terms):
            raise NormSpecError("sum-norm weights must be positive")
        object.__setattr__(self, "terms", tuple((float(w), n) for w, n in self.terms))

    def _eval(self, x):
        return sum(w * n._eval(x) for w, n in self.terms)

    def _one_sided(self, e):
        lo = hi = 0.0
        for w, n in self.terms:
            m, p = n._one_sided(e)
            lo += w * m
            hi += w * p
        return lo, hi


@dataclass(frozen=True)
class Rotated(Norm):
    """rho(x) = inner(R(-angle) x): the unit ball rotated by +angle."""

    angle: float
    inner: Norm

    @cached_property
    def _rinv(self) -> np.ndarray:
        c, s = np.cos(self.angle), np.sin(self.angle)
        return np.array([[c, s], [-s, c]])  # applied as x @ _rinv.T == R^{-1} x

    def _eval(self, x):
        return self.inner._eval(x @ self._rinv.T)

    def _one_sided(self, e):
        # rotation preserves orientation, so rot90 commutes with R^{-1}
        return self.inner._one_sided(self._rinv @ e)


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def one_sided_derivatives(norm: Norm, e) -> DirectionalProbe:
    """Directional probe at unit vector e with e_perp = rot90(e)."""
    e = np.asarray(e, dtype=float)
    e = e / np.hypot(e[0], e[1])
    ep = _rot90(e)
    lo, hi = norm._one_sided(e)
    return DirectionalProbe(e=e, e_perp=ep, d_minus=lo, d_plus=hi)


def numeric_one_sided(norm: Norm, e, steps=(1e-3, 1e-4, 1e-5)) -> tuple[float, float]:
    """Difference-quotient probe with Richardson extrapolation.

    Quotients of a convex function converge monotonically in the step, so a
    linear extrapolation from the two smallest steps is safe.
    """
    e = np.asarray(e, dtype=float)
    e = e / np.hypot(e[0], e[1])
    ep = _rot90(e)
    r0 = norm(e)

    def quotient(s):
        return (norm(e + s * ep) - r0) / s

    s = sorted(steps, reverse=True)
    qp = [quotient(t) for t in s]
    qm = [quotient(-t) for t in s]
    # linear fit q(s) = theta + a s through the two smallest steps
    s1, s2 = s[-2], s[-1]
    hi = (s1 * qp[-1] - s2 * qp[-2]) / (s1 - s2)
    lo = (s1 * qm[-1] - s2 * qm[-2]) / (s1 - s2)
    return lo, hi


def is_degenerate(norm: Norm, e, tol: float = 1e-6) -> bool:
    """True when the one-sided derivative gap at e exceeds tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return one_sided_derivatives(norm, e).gap > tol


def additivity_on_pair(norm: Norm, v_minus, v_plus, tol: float = 1e-9) -> bool:
    """True when rho(v- + v+) = rho(v-) + rho(v+) within tol (relative).

    By homogeneity and the triangle inequality, additivity at a = b = 1 is
    equivalent to additivity for all nonnegative combinations of the pair.
    """
    a = np.asarray(v_minus, dtype=float)
    b = np.asarray(v_plus, dtype=float)
    lhs = norm(a + b)
    rhs = norm(a) + norm(b)
    return bool(abs(lhs - rhs) <= tol * max(rhs, 1e-300))


def _angle_rep(theta: float) -> float:
    """Fold an angle into [0, pi) for sign-deduplication."""
    t = theta % np.pi
    return 0.0 if np.pi - t < 1e-9 else t


def degenerate_directions(norm: Norm, n_angles: int = 64, tol: float = 1e-6,
                          resolution: float = 1e-8):
    """All unit directions where the norm has a one-sided derivative kink.

    Scans a uniform angular grid over [0, pi) (gaps are symmetric under sign
    flips), then bisects intervals whose endpoint-derivative difference
    indicates an interior kink, down to ``resolution`` radians.

    Kinks are atoms of the nonnegative measure nu whose interval mass is
    (derivative jump across the interval) + integral of the norm; the smooth
    density splits evenly between sibling half-intervals while an isolated
    atom stays on one side, which prunes kink-free branches after two
    levels.  Kinks closer together than a quarter grid spacing cannot be
    separated; raise ``n_angles`` for norms built from nearby rotations.
    Returns a list of (unit vector, gap) sorted by angle, deduplicated
    modulo sign.
    """
    if n_angles < 64:
        raise ValueError("n_angles must be at least 64")

    def probe(theta):
        return norm._one_sided(np.array([np.cos(theta), np.sin(theta)]))

    def norm_at(theta):
        return norm(np.array([np.cos(theta), np.sin(theta)]))

    found: list[tuple[float, float]] = []

    def record(theta, gap):
        t = _angle_rep(theta)
        for i, (t0, g0) in enumerate(found):
            if abs(t - t0) < 10 * resolution or abs(abs(t - t0) - np.pi) < 10 * resolution:
                if gap > g0:
                    found[i] = (t0, gap)
                return
        found.append((t, gap))

    def mass(a, b, pa, pb):
        # interval mass of nu, always >= total kink gap strictly inside (a, b)
        return (pb[0] - pa[1]) + (b - a) * norm_at(0.5 * (a + b))

    def scan(a, b, pa, pb, depth):
        jump = pb[0] - pa[1]
        width = b - a
        if jump <= tol and mass(a, b, pa, pb) <= tol:
            return
        if width <= resolution:
            if jump > tol:
                record(0.5 * (a + b), jump)
            return
        m = 0.5 * (a + b)
        pm = probe(m)
        gap_m = pm[1] - pm[0]
        if gap_m > tol:
            record(m, gap_m)
        m1 = max(mass(a, m, pa, pm), 0.0)
        m2 = max(mass(m, b, pm, pb), 0.0)
        if depth >= 2 and mass(a, b, pa, pb) - 2.0 * min(m1, m2) - gap_m <= tol:
            return
        scan(a, m, pa, pm, depth + 1)
        scan(m, b, pm, pb, depth + 1)

    grid = np.linspace(0.0, np.pi, n_angles, endpoint=False)
    probes = [probe(t) for t in grid]
    for t, p in zip(grid, probes):
        if p[1] - p[0] > tol:
            record(t, p[1] - p[0])
    for i in range(n_angles):
        a, b = grid[i], grid[i] + np.pi / n_angles
        pb = probes[(i + 1) % n_angles] if i + 1 < n_angles else probe(np.pi)
        scan(a, b, probes[i], pb, 0)

    found.sort()
    return [(np.array([np.cos(t), np.sin(t)]), g) for t, g in found]


# ---------------------------------------------------------------------------
# Wulff shapes
# ---------------------------------------------------------------------------

def surface_energy(norm: Norm, u) -> float | np.ndarray:
    """Boundary energy density as a function of the outward normal.

    The perimeter integrates the norm of the tangent, so the energy of a
    boundary piece with unit normal u is rho(rot90(u)).
    """
    return norm(_rot90(np.asarray(u, dtype=float)))


def _kink_direction_hints(norm: Norm) -> list[float]:
    """Angles worth sampling exactly when building Wulff shapes."""
    if isinstance(norm, Polygonal):
        v = norm.ball.vertices
        ang = np.arctan2(v[:, 1], v[:, 0])
        return list(ang) + list(ang + 0.5 * np.pi)
    if isinstance(norm, (WeightedL1,)) or (isinstance(norm, PNorm) and (norm.p == 1.0 or math.isinf(norm.p))):
        base = [0.0, 0.5 * np.pi, 0.25 * np.pi, 0.75 * np.pi]
        return base
    if isinstance(norm, SumNorm):
        out = []
        for _, n in norm.terms:
            out.extend(_kink_direction_hints(n))
        return out
    if isinstance(norm, Rotated):
        return [a + norm.angle for a in _kink_direction_hints(norm.inner)]
    return []


def wulff_shape(norm: Norm, n_directions: int = 256) -> ConvexPolygon:
    """Isoperimetric optimum for the norm-perimeter, as a polygon.

    Intersection of supporting half-planes {x : x . u <= rho(rot90 u)} over
    n_directions uniform normals, augmented with the exact kink normals of
    polygonal-type norms so those Wulff shapes come out exact.
    """
    if n_directions < 16:
        raise ValueError("n_directions must be at least 16")
    ang = list(2.0 * np.pi * np.arange(n_directions) / n_directions)
    for a in _kink_direction_hints(norm):
        ang.append(float(a % (2.0 * np.pi)))
        ang.append(float((a + np.pi) % (2.0 * np.pi)))
    ang = np.unique(np.round(np.asarray(ang), 14))
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    offs = surface_energy(norm, dirs)
    return halfplane_intersection(dirs, offs)


# ---------------------------------------------------------------------------
# Norm mini-language
# ---------------------------------------------------------------------------

_PI_RE = re.compile(r"^(-?\d*\.?\d*)\s*pi(?:/(\d+\.?\d*))?$")


def _parse_real(text: str) -> float:
    """Real literal; accepts fractions like 1/3 and pi forms like pi/4."""
    t = text.strip().lower()
    m = _PI_RE.match(t)
    if m:
        coef = float(m.group(1)) if m.group(1) not in ("", "-") else (-1.0 if m.group(1) == "-" else 1.0)
        div = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / div
    if t == "inf":
        return math.inf
    if "/" in t:
        num, den = t.split("/", 1)
        return float(num) / float(den)
    return float(t)


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_norm(spec: str) -> Norm:
    """Parse the norm mini-language.

    Grammar (one expression):
      p:<real> | wl1:<w1>,<w2> | poly:(x1,y1);(x2,y2);... |
      rot:<radians>:(<expr>) | sum:<w>*(<expr>)+<w>*(<expr>)+...
    """
    text = spec.strip()
    if not text:
        raise NormSpecError("empty norm spec")
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    if head == "p":
        return PNorm(_parse_real(rest))
    if head == "wl1":
        parts = _split_top(rest, ",")
        if len(parts) != 2:
            raise NormSpecError(f"wl1 needs two weights, got {rest!r}")
        return WeightedL1(_parse_real(parts[0]), _parse_real(parts[1]))
    if head == "poly":
        pts = []
        for chunk in rest.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise NormSpecError(f"bad polygonal vertex {chunk!r}")
            xy = chunk[1:-1].split(",")
            if len(xy) != 2:
                raise NormSpecError(f"bad polygonal vertex {chunk!r}")
            pts.append((_parse_real(xy[0]), _parse_real(xy[1])))
        try:
            ball = ConvexPolygon(np.array(pts, dtype=float))
        except (GeometryError, ValueError) as exc:
            raise NormSpecError(f"polygonal ball invalid: {exc}") from exc
        return Polygonal(ball)
    if head == "rot":
        angle_text, _, inner = rest.partition(":")
        inner = inner.strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise NormSpecError("rot inner expression must be parenthesized")
        return Rotated(_parse_real(angle_text), parse_norm(inner[1:-1]))
    if head == "sum":
        terms = []
        for chunk in _split_top(rest, "+"):
            chunk = chunk.strip()
            w_text, _, expr = chunk.partition("*")
            expr = expr.strip()
            if not (expr.startswith("(") and expr.endswith(")")):
                raise NormSpecError(f"sum term must be w*(expr), got {chunk!r}")
            terms.append((_parse_real(w_text), parse_norm(expr[1:-1])))
        return SumNorm(tuple(terms))
    raise NormSpecError(f"unknown norm spec {spec!r}")


def build_norm(spec) -> Norm:
    """Build a norm from a spec string or pass through an existing Norm."""
    if isinstance(spec, Norm):
        return spec
    return parse_norm(str(spec))
