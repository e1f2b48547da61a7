"""Shape optimization: projected gradient descent on support-function
coordinates for the eigenvalue-plus-perimeter functional.

The decision variable is a vector of support values at K uniform angles,
constrained to the discrete convexity cone (every sampled support line
binding), so the search never leaves the convex class.  Each iterate is
rebalanced to its optimal dilation, which removes the scale direction from
the search.  The eigenvalue gradient comes from boundary-flux quadrature
restricted to each face; the perimeter gradient is assembled analytically
from edge-vector derivatives, using the average of the one-sided norm
derivatives as a subgradient where the norm is kinked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import functional, geometry, spectral
from .geometry import ConvexPolygon, SupportVector
from .norms import Norm, surface_energy, wulff_shape

__all__ = [
    "OptimizerConfig",
    "OptimizationTrace",
    "UniquenessReport",
    "StabilityReport",
    "ProjectionError",
    "project_to_cone",
    "recenter_support",
    "minimize_shape",
    "minimize_all_starts",
    "shape_gradient",
    "perimeter_gradient",
    "gradient_check",
    "uniqueness_probe",
    "stability_probe",
]

_LEVEL_DIVISOR = 5.0        # level-l grid spacing is inradius / (5 * 2**l)
_TINY_FACE_REL = 1e-3       # faces below this fraction of diameter: perimeter-only gradient


class ProjectionError(RuntimeError):
    """Cone projection failed to reach feasibility."""


@dataclass(frozen=True)
class OptimizerConfig:
    k_angles: int = 64
    grid_levels: int = 3
    max_iters: int = 400
    step0: float = 0.1
    tol_f: float = 1e-5
    n_starts: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.k_angles < 16 or self.k_angles % 4 != 0:
            raise ValueError("k_angles must be >= 16 and divisible by 4")
        for name in ("grid_levels", "max_iters", "step0", "tol_f", "n_starts"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class OptimizationTrace:
    """One descent run: per-iterate values plus the final shape."""

    start_index: int
    start_label: str
    iterates: list = field(default_factory=list)   # (SupportVector, FunctionalValue)
    levels: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    accepted_steps: list = field(default_factory=list)
    status: str = "running"
    final_shape: ConvexPolygon | None = None
    final: functional.FunctionalValue | None = None
    n_eigensolves: int = 0

    @property
    def f_star_history(self) -> np.ndarray:
        return np.array([fv.f_star for _, fv in self.iterates])


# ---------------------------------------------------------------------------
# Cone projection and recentering
# ---------------------------------------------------------------------------

def _cone_rows(k: int) -> np.ndarray:
    c2 = 2.0 * np.cos(2.0 * np.pi / k)
    rows = np.zeros((k, k))
    idx = np.arange(k)
    rows[idx, (idx - 1) % k] = 1.0
    rows[idx, idx] = -c2
    rows[idx, (idx + 1) % k] = 1.0
    return rows


def project_to_cone(values: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Euclidean projection onto the discrete convexity cone.

    Uses the Moreau decomposition: the residual h0 - proj(h0) lies in the
    cone spanned by the cyclic second-difference rows, so its coefficients
    solve a nonnegative least-squares problem (exact active set, so repeated
    projection is idempotent and feasibility is machine-exact).
    """
    from scipy.optimize import nnls

    h = np.asarray(values, dtype=float).copy()
    k = len(h)
    rows = _cone_rows(k)
    slack = rows @ h
    scale = float(np.max(np.abs(h))) or 1.0
    if slack.min() < -1e-14 * scale:
        mu, _ = nnls(rows.T, -h)
        h = h + rows.T @ mu
        slack = rows @ h
        if slack.min() < -tol * scale:
            raise ProjectionError(
                f"cone projection infeasible; worst slack {slack.min():.3e}, "
                f"values {np.array2string(h, precision=6)}"
            )
    # keep the origin safely interior; adding a constant only increases slacks
    floor = 1e-3 * float(np.median(np.abs(h)))
    if h.min() < floor:
        h += floor - h.min()
    return h


def recenter_support(values: np.ndarray) -> np.ndarray:
    """Shift support values so the polygon centroid sits at the origin.

    A translation changes support values by -c . u_k, which has exactly zero
    cone slack, so recentering preserves feasibility.
    """
    sv = SupportVector(values)
    c = geometry.polygon_from_support(sv).centroid
    return values - sv.directions @ c


# ---------------------------------------------------------------------------
# Level evaluation and the shape gradient
# ---------------------------------------------------------------------------

def _level_spacing(poly: ConvexPolygon, level: int) -> float:
    return geometry.inradius(poly) / (_LEVEL_DIVISOR * 2.0 ** level)


def _solve_at_level(poly: ConvexPolygon, level: int):
    grid = spectral.discretize(poly, _level_spacing(poly, level))
    eig = spectral.principal_eigenpair(grid)
    return grid, eig


def _rescale_flux(flux: spectral.BoundaryFlux, t: float) -> spectral.BoundaryFlux:
    """Flux data of the dilated shape t * U from the flux of U."""
    return spectral.BoundaryFlux(
        points=flux.points * t, grad=flux.grad / (t * t),
        weights=flux.weights * t, normals=flux.normals,
        edges=flux.edges, arclength=flux.arclength * t,
    )


def perimeter_gradient(norm: Norm, k: int) -> np.ndarray:
    """Gradient of the polygon perimeter with respect to support values.

    The length of face j equals (cone slack at j) / sin(2 pi / K), so the
    perimeter is the linear form sum_j sigma_j * slack_j / sin(2 pi / K)
    with sigma_j the norm of the face tangent.  The gradient is therefore a
    constant vector, exact on the whole cone including its boundary (faces
    collapsed to corners), where edge-chain differentiation breaks down.
    """
    ang = 2.0 * np.pi * np.arange(k) / k
    u = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sigma = np.atleast_1d(surface_energy(norm, u))
    delta = 2.0 * np.pi / k
    return (np.roll(sigma, 1) + np.roll(sigma, -1)
            - 2.0 * np.cos(delta) * sigma) / np.sin(delta)


def shape_gradient(norm: Norm, sv: SupportVector, poly: ConvexPolygon,
                   flux: spectral.BoundaryFlux) -> np.ndarray:
    """Gradient of lambda + perimeter with respect to the support values.

    The eigenvalue part is -(flux integral over the face with outward normal
    u_k): raising h_k moves that face outward at unit normal speed.  Faces
    shorter than 1e-3 * diameter keep only the perimeter part.
    """
    k = sv.k
    grad = perimeter_gradient(norm, k).copy()
    diam = poly.diameter
    integrals = spectral.edge_flux_integrals(flux, poly)
    nrm = poly.edge_normals
    angles = np.arctan2(nrm[:, 1], nrm[:, 0]) % (2.0 * np.pi)
    step = 2.0 * np.pi / k
    for i in range(poly.n):
        if poly.edge_lengths[i] <= _TINY_FACE_REL * diam:
            continue
        j = int(np.round(angles[i] / step)) % k
        off = abs(angles[i] - step * j)
        off = min(off, abs(off - 2.0 * np.pi))
        if off < 1e-6:
            grad[j] -= integrals[i]
    return grad


# ---------------------------------------------------------------------------
# Starts
# ---------------------------------------------------------------------------

def _snap_corner_runs(values: np.ndarray, gp: np.ndarray,
                      target: np.ndarray) -> np.ndarray:
    """Collapse residual micro-faces on true corner fans to exact points.

    Support directions with zero target slack (zero perimeter gradient, so
    the norm is additive across them) belong to a corner of the minimizer.
    Damped iterations shrink those faces geometrically but a corner split
    by any nonzero face still reads as two tangent jumps; instead, each
    maximal zero-target run is replaced by the support of the single point
    where its two anchor lines meet, which is exact and keeps feasibility.
    """
    k = len(values)
    ang = 2.0 * np.pi * np.arange(k) / k
    u = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    sv = SupportVector(values)
    small = sv.cone_slacks() <= 0.05 * float(sv.cone_slacks().max())
    snap = (gp <= 1e-12 * float(np.abs(gp).max())) & (target <= 0.0) & small
    if not snap.any() or snap.all():
        return values
    h = values.copy()
    idx = 0
    visited = np.zeros(k, dtype=bool)
    for idx in range(k):
        if not snap[idx] or visited[idx]:
            continue
        run = [idx]
        visited[idx] = True
        j = (idx + 1) % k
        while snap[j] and not visited[j]:
            run.append(j)
            visited[j] = True
            j = (j + 1) % k
        j = (idx - 1) % k
        while snap[j] and not visited[j]:
            run.insert(0, j)
            visited[j] = True
            j = (j - 1) % k
        a, b = (run[0] - 1) % k, (run[-1] + 1) % k
        det = u[a, 0] * u[b, 1] - u[a, 1] * u[b, 0]
        if abs(det) < 1e-12:
            continue
        corner = np.array([
            (h[a] * u[b, 1] - h[b] * u[a, 1]) / det,
            (h[b] * u[a, 0] - h[a] * u[b, 0]) / det,
        ])
        for m in run:
            h[m] = corner @ u[m]
    slack = SupportVector(h).cone_slacks()
    if slack.min() < -1e-9 * float(np.abs(h).max()):
        return values
    return h


def _equilibrium_polish(norm: Norm, h: np.ndarray, level: int,
                        rounds: int = 12, damping: float = 0.5) -> tuple[np.ndarray, int]:
    """Drive every face toward its first-order equilibrium length.

    Stationarity in each support value balances the constant perimeter
    gradient against the face's flux integral, giving a target cone slack
    gP_k sin(delta) / |grad h|^2 per face (exactly zero on additive cones,
    so true corners come out sharp).  The slack map is circulant in the
    support values, so each damped fixed-point round is one FFT
    deconvolution; the translation modes are kept from the current iterate.
    Near-degenerate faces carry gains far below any practical descent
    tolerance, which is why plain gradient steps cannot open them; the
    undamped map overshoots when far from equilibrium, hence the damping.

    Returns the best support values seen (by f_star at this level) and the
    number of eigensolves spent.
    """
    k = len(h)
    delta = 2.0 * np.pi / k
    gp = perimeter_gradient(norm, k)
    symbol = 2.0 * np.cos(2.0 * np.pi * np.arange(k) / k) - 2.0 * np.cos(delta)
    keep = np.abs(symbol) > 1e-12
    solves = 0

    def measure(values):
        sv = SupportVector(values)
        poly = geometry.polygon_from_support(sv)
        grid, eig = _solve_at_level(poly, level)
        return sv, poly, grid, eig, geometry.perimeter(poly, norm)

    sv, poly, grid, eig, perim = measure(h)
    solves += 1
    fv = _fv(eig.lam, perim)
    best_f, best_h = fv.f_star, h
    for _ in range(rounds):
        flux = spectral.boundary_gradient(grid, eig)
        chain = sv.vertex_chain()
        mids = 0.5 * (chain + np.roll(chain, 1, axis=0))
        s_mid = geometry.arclength_of_points(poly, mids)
        length = poly.euclidean_perimeter
        # exclude the zero anchors at sharp vertices: a spuriously collapsed
        # fan would otherwise zero the measured gradient and blow the target
        real = flux.grad > 0.0
        s_r, g_r = flux.arclength[real], flux.grad[real]
        s_ext = np.concatenate([s_r - length, s_r, s_r + length])
        g2_ext = np.concatenate([g_r ** 2] * 3)
        g2 = np.interp(s_mid, s_ext, g2_ext)
        floor = 1e-3 * float(np.median(g2))
        target = np.where(gp <= 1e-12 * np.abs(gp).max(),
                          0.0, gp * np.sin(delta) / np.maximum(g2, floor))
        target = np.minimum(target, 1.5 * poly.diameter * np.sin(delta))
        blended = (1.0 - damping) * sv.cone_slacks() + damping * target
        if float(np.max(np.abs(blended - sv.cone_slacks()))) < 1e-10 * float(sv.values.max()):
            break
        # circulant solve: keep the translation modes (|m| = 1) of h
        new_hat = np.fft.fft(sv.values).copy()
        new_hat[keep] = np.fft.fft(blended)[keep] / symbol[keep]
        trial = np.real(np.fft.ifft(new_hat))
        trial = recenter_support(project_to_cone(trial))
        trial = _snap_corner_runs(trial, gp, target)
        sv, poly, grid, eig, perim = measure(trial)
        solves += 1
        fv = _fv(eig.lam, perim)
        if not np.isfinite(fv.f_star):
            break
        # rebalance to the optimal dilation for the next flux pass
        t = fv.t_star
        h = trial * t
        if fv.f_star < best_f:
            best_f, best_h = fv.f_star, h
        sv = SupportVector(h)
        poly = geometry.scale_translate(poly, t)
        if abs(t - 1.0) > 1e-9:
            grid, eig = _solve_at_level(poly, level)
            solves += 1
    return best_h, solves


def _starts(norm: Norm, cfg: OptimizerConfig):
    out = []
    w = wulff_shape(norm, max(cfg.k_angles, 64))
    out.append(("wulff", SupportVector.from_polygon(geometry.center(w), cfg.k_angles).values))
    out.append(("disc", np.ones(cfg.k_angles)))
    ang = 2.0 * np.pi * np.arange(cfg.k_angles) / cfg.k_angles
    for i in range(max(0, cfg.n_starts - 2)):
        rng = np.random.default_rng([cfg.seed, i])
        r = np.ones(cfg.k_angles)
        for m in range(2, 6):
            amp = rng.uniform(0.0, 0.12)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            r += amp * np.cos(m * ang + phase)
        out.append((f"random{i}", r))
    return out[: cfg.n_starts]


# ---------------------------------------------------------------------------
# Descent
# ---------------------------------------------------------------------------

def _fv(lam: float, perim: float, err: float = 0.0) -> functional.FunctionalValue:
    t_star, f_star = functional.optimal_scale(lam, perim)
    return functional.FunctionalValue(lam=lam, perim=perim, f=lam + perim,
                                      t_star=t_star, f_star=f_star,
                                      solver_error=err)


def _run_start(norm: Norm, cfg: OptimizerConfig, start_index: int,
               label: str, h0: np.ndarray) -> OptimizationTrace:
    trace = OptimizationTrace(start_index=start_index, start_label=label)
    h = recenter_support(project_to_cone(h0))
    level = 0
    max_level = cfg.grid_levels - 1

    def evaluate(values):
        sv = SupportVector(values)
        poly = geometry.polygon_from_support(sv)
        grid, eig = _solve_at_level(poly, level)
        trace.n_eigensolves += 1
        perim = geometry.perimeter(poly, norm)
        return sv, poly, grid, eig, perim

    sv, poly, grid, eig, perim = evaluate(h)
    fv = _fv(eig.lam, perim)
    trace.iterates.append((sv, fv))
    trace.levels.append(level)
    flux = spectral.boundary_gradient(grid, eig)
    # rebalance to the optimal dilation
    t = fv.t_star
    h = h * t
    lam, perim = fv.lam / (t * t), perim * t
    flux = _rescale_flux(flux, t)
    sv = SupportVector(h)
    poly = geometry.polygon_from_support(sv)

    def rebase(new_level):
        nonlocal level, sv, poly, perim, flux, h, lam
        level = new_level
        sv, poly, grid_b, eig_b, perim_b = evaluate(h)
        fv_b = _fv(eig_b.lam, perim_b)
        trace.iterates.append((sv, fv_b))
        trace.levels.append(level)
        flux_b = spectral.boundary_gradient(grid_b, eig_b)
        t_b = fv_b.t_star
        h = h * t_b
        lam, perim = fv_b.lam / (t_b * t_b), perim_b * t_b
        flux = _rescale_flux(flux_b, t_b)
        sv = SupportVector(h)
        poly = geometry.polygon_from_support(sv)

    step = None
    slow_accepts = 0
    while len(trace.iterates) - 1 < cfg.max_iters:
        f_star = _fv(lam, perim).f_star
        g = shape_gradient(norm, sv, poly, flux)
        gmax = float(np.max(np.abs(g)))
        trace.grad_norms.append(float(np.linalg.norm(g)))
        if step is None:
            step = cfg.step0 * float(np.mean(h)) / max(gmax, 1e-300)
        accepted = False
        rel_drop = 0.0
        for _ in range(10):
            trial = recenter_support(project_to_cone(h - step * g))
            sv_t, poly_t, grid_t, eig_t, perim_t = evaluate(trial)
            fv_t = _fv(eig_t.lam, perim_t)
            if fv_t.f_star < f_star * (1.0 - 1e-13):
                accepted = True
                rel_drop = (f_star - fv_t.f_star) / f_star
                break
            step *= 0.5
            if step * gmax < 1e-13 * float(np.mean(h)):
                break
        if accepted:
            trace.iterates.append((sv_t, fv_t))
            trace.levels.append(level)
            trace.accepted_steps.append(step)
            flux_t = spectral.boundary_gradient(grid_t, eig_t)
            t = fv_t.t_star
            h = trial * t
            lam, perim = fv_t.lam / (t * t), perim_t * t
            flux = _rescale_flux(flux_t, t)
            sv = SupportVector(h)
            poly = geometry.polygon_from_support(sv)
            step *= 1.5

        at_finest = level >= max_level
        if not accepted:
            if at_finest:
                trace.status = "converged"
                break
            step = None
            slow_accepts = 0
            rebase(level + 1)
            continue
        threshold = cfg.tol_f if at_finest else 10.0 * cfg.tol_f
        slow_accepts = slow_accepts + 1 if rel_drop < threshold else 0
        if slow_accepts >= 2:
            if at_finest:
                trace.status = "converged"
                break
            step = None
            slow_accepts = 0
            rebase(level + 1)
    else:
        trace.status = "max_iters"

    h, extra = _equilibrium_polish(norm, h, level)
    trace.n_eigensolves += extra
    trace.final_shape = geometry.center(geometry.polygon_from_support(SupportVector(h)))
    trace.final = functional.evaluate(trace.final_shape, norm, levels=cfg.grid_levels)
    return trace


def minimize_all_starts(norm: Norm, cfg: OptimizerConfig | None = None) -> list[OptimizationTrace]:
    """Run every start to convergence; deterministic order and substreams."""
    cfg = cfg or OptimizerConfig()
    return [_run_start(norm, cfg, i, label, h0)
            for i, (label, h0) in enumerate(_starts(norm, cfg))]


def minimize_shape(norm: Norm, cfg: OptimizerConfig | None = None) -> OptimizationTrace:
    """Best start by (f_star, start index), so the outcome is schedule-free."""
    traces = minimize_all_starts(norm, cfg)
    return min(traces, key=lambda t: (t.final.f_star, t.start_index))


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradientCheckReport:
    indices: tuple
    assembled: np.ndarray
    finite_diff: np.ndarray
    rel_errors: np.ndarray

    @property
    def max_rel_error(self) -> float:
        return float(self.rel_errors.max())


def gradient_check(norm: Norm, sv: SupportVector, indices, level: int = 3,
                   fd_rel: float = 2e-3) -> GradientCheckReport:
    """Assembled gradient of F = lambda + perimeter vs central differences.

    The default step is 2e-3 * h_k: smaller steps make the difference
    quotient noise-limited by discrete node-set changes, larger ones leave
    the linear regime.
    """

    def f_of(values):
        poly = geometry.polygon_from_support(SupportVector(values))
        _, eig = _solve_at_level(poly, level)
        return eig.lam + geometry.perimeter(poly, norm)

    poly = geometry.polygon_from_support(sv)
    grid, eig = _solve_at_level(poly, level)
    flux = spectral.boundary_gradient(grid, eig)
    g = shape_gradient(norm, sv, poly, flux)

    fd = np.empty(len(indices))
    for j, k in enumerate(indices):
        delta = fd_rel * sv.values[k]
        hp = sv.values.copy()
        hp[k] += delta
        hm = sv.values.copy()
        hm[k] -= delta
        fd[j] = (f_of(hp) - f_of(hm)) / (2.0 * delta)
    assembled = g[list(indices)]
    denom = np.maximum(np.abs(fd), 1e-9 * max(abs(fd).max(), 1.0))
    rel = np.abs(assembled - fd) / denom
    return GradientCheckReport(indices=tuple(indices), assembled=assembled,
                               finite_diff=fd, rel_errors=rel)


def _normalized_shape(poly: ConvexPolygon, fv: functional.FunctionalValue) -> ConvexPolygon:
    return geometry.center(geometry.scale_translate(poly, fv.t_star))


@dataclass(frozen=True)
class UniquenessReport:
    traces: tuple
    shapes: tuple
    max_pairwise: float          # Hausdorff distance between centered results
    max_pairwise_rel: float      # relative to the mean diameter

    @property
    def best(self) -> OptimizationTrace:
        return min(self.traces, key=lambda t: (t.final.f_star, t.start_index))


def uniqueness_probe(norm: Norm, cfg: OptimizerConfig | None = None) -> UniquenessReport:
    """Convergence of independent starts to one shape modulo translation."""
    cfg = cfg or OptimizerConfig()
    if cfg.n_starts < 2:
        raise ValueError("uniqueness probe needs at least 2 starts")
    traces = minimize_all_starts(norm, cfg)
    shapes = [_normalized_shape(t.final_shape, t.final) for t in traces]
    worst = 0.0
    for i in range(len(shapes)):
        for j in range(i + 1, len(shapes)):
            worst = max(worst, geometry.hausdorff_distance(shapes[i], shapes[j]))
    mean_diam = float(np.mean([s.diameter for s in shapes]))
    return UniquenessReport(traces=tuple(traces), shapes=tuple(shapes),
                            max_pairwise=worst, max_pairwise_rel=worst / mean_diam)


@dataclass(frozen=True)
class StabilityReport:
    distances: np.ndarray
    gaps: np.ndarray
    decile_mins: np.ndarray

    @property
    def positive(self) -> bool:
        return bool(np.all(self.decile_mins > 0))

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.decile_mins) >= -1e-12))


def stability_probe(norm: Norm, minimizer: ConvexPolygon, f_star_min: float,
                    n: int = 50, rel_range=(0.05, 0.3), seed: int = 0,
                    k_angles: int = 64, levels: int = 2) -> StabilityReport:
    """Functional gap versus Hausdorff distance for random feasible
    perturbations of the minimizer, grouped into distance deciles.

    Perturbations are projected to the cone, recentered, and rebalanced to
    their optimal dilation, so translation and scale directions (which carry
    no gap) are quotiented out before measuring distance.
    """
    base = geometry.center(minimizer)
    h0 = SupportVector.from_polygon(base, k_angles).values
    diam = base.diameter
    ang = 2.0 * np.pi * np.arange(k_angles) / k_angles
    lo, hi = rel_range
    n_dirs = 5
    n_rungs = n // n_dirs
    directions = []
    for j in range(n_dirs):
        rng = np.random.default_rng([seed, j])
        eta = np.zeros(k_angles)
        for m in range(2, 7):
            eta += rng.normal() * np.cos(m * ang) + rng.normal() * np.sin(m * ang)
        directions.append(eta / np.max(np.abs(eta)))
    # fixed perturbation directions sampled at growing distance rungs: each
    # decile then compares the same directions at one distance, so the
    # minimum gap inherits monotone growth along rays from the minimizer
    dists, gaps = [], []
    for r in range(n_rungs):
        target = diam * (lo + (hi - lo) * (r + 0.5) / n_rungs)
        for eta in directions:
            amp = 0.65 * target
            d = None
            for _ in range(4):
                h = recenter_support(project_to_cone(h0 + amp * eta))
                poly = geometry.polygon_from_support(SupportVector(h))
                fv = functional.evaluate(poly, norm, levels=levels)
                shape = _normalized_shape(poly, fv)
                d = geometry.hausdorff_distance(shape, base)
                if 0.98 * target <= d <= 1.02 * target:
                    break
                amp *= np.clip(target / max(d, 1e-12), 0.25, 4.0)
            dists.append(d)
            gaps.append(fv.f_star - f_star_min)
    dists = np.asarray(dists)
    gaps = np.asarray(gaps)
    order = np.argsort(dists, kind="stable")
    chunks = np.array_split(order, 10)
    decile_mins = np.array([gaps[c].min() for c in chunks if len(c)])
    return StabilityReport(distances=dists, gaps=gaps, decile_mins=decile_mins)
