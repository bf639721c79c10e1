"""Algebraic and resolvent-growth indices of regular pencils.

The algebraic (nilpotency) index comes from Wong-sequence stabilization.
The resolvent indices come from sampling ||(lambda E - A)^{-1}|| along a ray
and fitting the log-log growth: a slope near p-1 certifies index p.  Real
and complex variants differ only in where the ray lives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .errors import NotInResolventSet, NotRegular
from .pencil import Pencil, ResolventSample, require_regular

REAL_RAY = "real_ray"
VERTICAL_LINE = "vertical_line"

#: default asymptotic fitting window for the real ray, matching the regime
#: where nilpotent growth dominates for moderate-norm pencils.
DEFAULT_WINDOW = (1e2, 1e6)
DEFAULT_COUNT = 12


@dataclass(frozen=True)
class IndexReport:
    """Result of a resolvent-growth fit along one ray."""

    ray: str
    omega: float
    window: tuple[float, float]
    count: int
    samples: tuple[ResolventSample, ...]
    fitted_exponent: float
    fitted_index: int
    growth_constant: float
    algebraic_index: int | None = None

    def to_dict(self):
        return {
            "ray": self.ray,
            "omega": self.omega,
            "window": list(self.window),
            "count": self.count,
            "fitted_exponent": self.fitted_exponent,
            "fitted_index": self.fitted_index,
            "growth_constant": self.growth_constant,
            "algebraic_index": self.algebraic_index,
            "samples": [
                {"lambda": [s.lam.real, s.lam.imag], "norm": s.norm, "condition": s.condition}
                for s in self.samples
            ],
        }


def algebraic_index(p: Pencil) -> int:
    """Nilpotency index of the infinite part: Wong stabilization depth.

    Zero iff E is invertible (the first iterate already reproduces the full
    space); raises NotRegular for singular pencils.
    """
    from .subspaces import wong_sequence

    return wong_sequence(p).stabilized_at


def spectral_abscissa_estimate(p: Pencil, shots: int = 32, rng=None) -> float:
    """Largest real part of generalized Rayleigh quotients <x,Ax>/<x,Ex>.

    A cheap randomized stand-in for the spectral abscissa, used only to pick
    a default half-plane offset omega; fits verify membership per sample
    anyway and report the offending lambda on failure.
    """
    if rng is None:
        rng = np.random.default_rng(0x5DEECE66D)
    n = p.shape[1]
    best = 0.0
    found = False
    for _ in range(shots):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        denom = np.vdot(x, p.E @ x)
        if abs(denom) < 1e-12 * np.vdot(x, x).real * max(1.0, np.linalg.norm(p.E, 2)):
            continue
        mu = np.vdot(x, p.A @ x) / denom
        best = max(best, mu.real) if found else mu.real
        found = True
    return best if found else 0.0


def default_omega(p: Pencil) -> float:
    return 1.0 + max(0.0, spectral_abscissa_estimate(p))


def fit_resolvent_index(
    p: Pencil,
    ray: str = REAL_RAY,
    omega: float | None = None,
    window: tuple[float, float] = DEFAULT_WINDOW,
    count: int = DEFAULT_COUNT,
    with_algebraic: bool = False,
) -> IndexReport:
    """Fit log ||(lambda E - A)^{-1}|| against log |lambda| along a ray.

    Samples lambda = omega + r (real ray) or omega + i r (vertical line) for
    r log-spaced in the window, in the pencil's weighted operator norm.  The
    fitted index is max(0, round(slope) + 1); the growth constant is the
    smallest C with norm <= C |lambda|^(index-1) over all samples.
    """
    require_regular(p)
    r_min, r_max = float(window[0]), float(window[1])
    if not (1.0 <= r_min < r_max):
        raise ValueError(f"window must satisfy 1 <= r_min < r_max, got {window}")
    if count < 8:
        raise ValueError(f"count must be >= 8, got {count}")
    if ray not in (REAL_RAY, VERTICAL_LINE):
        raise ValueError(f"unknown ray {ray!r}")
    if omega is None:
        omega = default_omega(p)
    omega = float(omega)

    radii = np.geomspace(r_min, r_max, count)
    lams = omega + radii if ray == REAL_RAY else omega + 1j * radii

    def sample(lam):
        try:
            return p.resolvent_sample(lam, cond_limit=None)
        except NotInResolventSet as exc:
            raise NotInResolventSet(lam, exc.condition) from None

    samples = tuple(pmap(sample, lams))

    logs_lam = np.log(np.abs(lams))
    logs_norm = np.log([s.norm for s in samples])
    slope = float(np.polyfit(logs_lam, logs_norm, 1)[0])
    fitted_index = max(0, int(round(slope)) + 1)
    growth_constant = float(max(s.norm / abs(s.lam) ** (fitted_index - 1) for s in samples))

    return IndexReport(
        ray=ray,
        omega=omega,
        window=(r_min, r_max),
        count=count,
        samples=samples,
        fitted_exponent=slope,
        fitted_index=fitted_index,
        growth_constant=growth_constant,
        algebraic_index=algebraic_index(p) if with_algebraic else None,
    )


def check_index_bound(report: IndexReport, bound: int) -> bool:
    """True iff the fitted (and, when present, algebraic) index is <= bound."""
    if report.fitted_index > bound:
        return False
    if report.algebraic_index is not None and report.algebraic_index > bound:
        return False
    return True
