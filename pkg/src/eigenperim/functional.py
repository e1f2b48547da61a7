"""The shape functional: eigenvalue plus norm-perimeter, with the closed-form
optimal dilation and scale-invariant scores.

Under dilation, F(tU) = t**-2 lam + t P is strictly convex in t with minimum
at t* = (2 lam / P)**(1/3) and value 3 * 2**(-2/3) * lam**(1/3) * P**(2/3),
so the dilation dimension can be removed from any shape search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, spectral
from .geometry import ConvexPolygon

__all__ = [
    "FunctionalValue",
    "optimal_scale",
    "evaluate",
    "isoperimetric_score",
    "a_priori_window",
]


@dataclass(frozen=True)
class FunctionalValue:
    """Eigenvalue, perimeter, their sum, and the optimal-dilation summary."""

    lam: float
    perim: float
    f: float
    t_star: float
    f_star: float
    solver_error: float

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "perim": self.perim,
            "f": self.f,
            "t_star": self.t_star,
            "f_star": self.f_star,
            "solver_error": self.solver_error,
        }


def optimal_scale(lam: float, perim: float) -> tuple[float, float]:
    """Optimal dilation t* and the dilation-minimal value of the functional."""
    if lam <= 0 or perim <= 0:
        raise ValueError("eigenvalue and perimeter must be positive")
    t_star = (2.0 * lam / perim) ** (1.0 / 3.0)
    f_star = 3.0 * 2.0 ** (-2.0 / 3.0) * lam ** (1.0 / 3.0) * perim ** (2.0 / 3.0)
    return t_star, f_star


def evaluate(p: ConvexPolygon, norm, levels: int = 3) -> FunctionalValue:
    """Assemble the functional for one shape with an extrapolated eigenvalue."""
    lam, err = spectral.eigenvalue_extrapolated(p, levels=levels)
    perim = geometry.perimeter(p, norm)
    t_star, f_star = optimal_scale(lam, perim)
    return FunctionalValue(lam=lam, perim=perim, f=lam + perim,
                           t_star=t_star, f_star=f_star, solver_error=err)


def isoperimetric_score(p: ConvexPolygon, norm) -> float:
    """Scale-invariant ratio perimeter / sqrt(area); minimized by the Wulff shape."""
    return geometry.perimeter(p, norm) / np.sqrt(p.area)


def a_priori_window(norm, bound: float, n_samples: int = 3600):
    """Area and Euclidean-perimeter window implied by F(U) <= bound.

    Faber-Krahn bounds the area from below, the isoperimetric inequality and
    the norm's min/max on the unit circle bound everything else.  Returns
    (c1, c2, c3, c4) with c1 <= |U| <= c2 and c3 <= |dU| <= c4.
    """
    from scipy.special import jn_zeros

    if bound <= 0:
        raise ValueError("bound must be positive")
    ang = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
    vals = norm(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    rho_min, rho_max = float(vals.min()), float(vals.max())
    j0 = float(jn_zeros(0, 1)[0])
    c1 = np.pi * j0 ** 2 / bound        # lam >= pi j0^2 / |U|
    c4 = bound / rho_min                # P_rho >= rho_min |dU|
    c2 = c4 ** 2 / (4.0 * np.pi)        # |dU| >= 2 sqrt(pi |U|)
    c3 = 2.0 * np.sqrt(np.pi * c1)
    return c1, c2, c3, c4
