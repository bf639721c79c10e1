"""Staggered finite-difference discretization of the 1-d two-field example.

The continuous system on [0, 1] is

    d/dt [eps1 x1; eps2 x2] = [[0, d/dz], [d/dz, -r]] [x1; x2],
    x1(0) = x2(1) = 0,

a wave / diffusion / elliptic / index-2 family depending on which
coefficients vanish.  The discretization staggers the two fields so that the
off-diagonal difference blocks are exact negative adjoints of each other:
with D the x2-to-x1 difference matrix, A_h = [[0, D], [-D^T, -diag(r)]]
gives Re <x, A_h x> = -<x2, r x2> exactly, mirroring the vanishing boundary
term of the continuous integration by parts.  Grid weights h*I make the
discrete norms approximate L2(0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, NotRegular
from .indices import IndexReport, fit_resolvent_index, REAL_RAY, VERTICAL_LINE
from .pencil import Pencil, ResolventSample, weighted_vector_norm

REGIMES = ("wave", "diffusion", "elliptic", "index2", "custom")

#: real-ray fits probe the asymptotic growth; the pre-asymptotic frequency
#: window applies to the vertical line, where the discretization mimics the
#: PDE only below the resolvable frequency (about 0.2 * n).
WITNESS_WINDOW = (1e2, 1e4)
REAL_RAY_WINDOW = (1e2, 1e6)
FREQUENCY_WINDOW_FACTOR = 0.2


def x1_nodes(n: int) -> np.ndarray:
    """Nodes zeta = j*h for j = 1..n (left boundary value eliminated)."""
    h = 1.0 / n
    return np.arange(1, n + 1) * h


def x2_nodes(n: int) -> np.ndarray:
    """Nodes zeta = j*h for j = 0..n-1 (right boundary value eliminated)."""
    h = 1.0 / n
    return np.arange(0, n) * h


@dataclass(frozen=True)
class PDEConfig:
    """Grid size plus coefficient samples at the owning nodes of each field."""

    n: int
    eps1: np.ndarray   # sampled at x1 nodes
    eps2: np.ndarray   # sampled at x2 nodes
    r: np.ndarray      # sampled at x2 nodes
    regime: str = "custom"

    def __post_init__(self):
        if self.n < 8:
            raise InvalidConfig(f"need n >= 8 grid cells, got {self.n}")
        if self.regime not in REGIMES:
            raise InvalidConfig(f"unknown regime {self.regime!r}")
        fields = {}
        for name in ("eps1", "eps2", "r"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (self.n,):
                raise InvalidConfig(f"{name} must have {self.n} samples, got shape {v.shape}")
            if np.any(v < 0):
                raise InvalidConfig(f"{name} must be nonnegative")
            v.setflags(write=False)
            fields[name] = v
            object.__setattr__(self, name, v)
        self._check_regime(fields)

    def _check_regime(self, f):
        def positive(v):
            return np.min(v) > 0

        if self.regime == "wave" and not (positive(f["eps1"]) and positive(f["eps2"])):
            raise InvalidConfig("wave regime needs eps1, eps2 >= c > 0")
        if self.regime == "diffusion" and not (
            positive(f["eps1"]) and positive(f["r"]) and not np.any(f["eps2"])
        ):
            raise InvalidConfig("diffusion regime needs eps1, r >= c > 0 and eps2 = 0")
        if self.regime == "elliptic" and not (
            not np.any(f["eps1"]) and not np.any(f["eps2"]) and positive(f["r"])
        ):
            raise InvalidConfig("elliptic regime needs eps1 = eps2 = 0 and r >= c > 0")
        if self.regime == "index2" and not (not np.any(f["eps1"]) and positive(f["eps2"])):
            raise InvalidConfig("index2 regime needs eps1 = 0 and eps2 >= c > 0")

    @property
    def h(self) -> float:
        return 1.0 / self.n


def preset(regime: str, n: int) -> PDEConfig:
    """Canonical unit-coefficient configuration for a named regime."""
    ones = np.ones(n)
    zeros = np.zeros(n)
    table = {
        "wave": (ones, ones, zeros),
        "diffusion": (ones, zeros, ones),
        "elliptic": (zeros, zeros, ones),
        "index2": (zeros, ones, ones),
    }
    if regime not in table:
        raise InvalidConfig(f"no preset for regime {regime!r}")
    eps1, eps2, r = table[regime]
    return PDEConfig(n=n, eps1=eps1, eps2=eps2, r=r, regime=regime)


def from_functions(n: int, eps1, eps2, r, regime: str = "custom") -> PDEConfig:
    """Sample coefficient callables at the owning nodes of each unknown."""
    return PDEConfig(
        n=n,
        eps1=np.asarray([eps1(z) for z in x1_nodes(n)], dtype=float),
        eps2=np.asarray([eps2(z) for z in x2_nodes(n)], dtype=float),
        r=np.asarray([r(z) for z in x2_nodes(n)], dtype=float),
        regime=regime,
    )


def difference_matrix(n: int) -> np.ndarray:
    """Bidiagonal d/dz of x2 evaluated at the x1 nodes, with x2(1) = 0 built in."""
    h = 1.0 / n
    D = np.zeros((n, n))
    np.fill_diagonal(D, -1.0 / h)
    np.fill_diagonal(D[:, 1:], 1.0 / h)
    return D


def discretize(cfg: PDEConfig) -> Pencil:
    """Discrete pencil (E_h, A_h) with grid weights h*I on state and codomain.

    -D^T is simultaneously the consistent forward difference of x1 at the x2
    nodes (with x1(0) = 0 built in) and the exact negative adjoint of D, so
    discrete dissipativity Re <x, A_h x> = -<x2, r x2> <= 0 holds exactly
    rather than up to O(h).
    """
    n = cfg.n
    D = difference_matrix(n)
    A = np.block([[np.zeros((n, n)), D], [-D.T, -np.diag(cfg.r)]])
    E = np.diag(np.concatenate([cfg.eps1, cfg.eps2])).astype(complex)
    W = cfg.h * np.eye(2 * n)
    return Pencil(E=E, A=A.astype(complex), state_weight=W, codomain_weight=W)


def _tail_integrals(y1: np.ndarray, h: float) -> np.ndarray:
    """int_{z}^{1} y1 at the x2 nodes, by trapezoid with one-sided end panels.

    y1 lives at z = h..1; for the first x2 node (z = 0) the panel [0, h] has
    no left sample and uses the right-endpoint rectangle rule.  Exact for
    constants, first order overall.
    """
    n = len(y1)
    out = np.zeros(n, dtype=y1.dtype)
    # trapezoid over [i*h, 1] using samples y1[i-1:] (nodes i*h .. 1)
    for i in range(1, n):
        seg = y1[i - 1 :]
        out[i] = h * (0.5 * seg[0] + seg[1:-1].sum() + 0.5 * seg[-1]) if len(seg) > 1 else 0.0
    seg = y1
    trap = h * (0.5 * seg[0] + seg[1:-1].sum() + 0.5 * seg[-1]) if len(seg) > 1 else 0.0
    out[0] = h * y1[0] + trap
    return out


def _head_integrals(g: np.ndarray, h: float) -> np.ndarray:
    """int_0^{j*h} g at the x1 nodes for j = 1..n, g sampled at the x2 nodes.

    Composite trapezoid; the last panel [(n-1)h, 1] has no right sample and
    uses the left-endpoint rectangle rule.  Exact for constants.
    """
    n = len(g)
    out = np.zeros(n, dtype=g.dtype)
    panels = 0.5 * h * (g[1:] + g[:-1])
    acc = np.concatenate([[0.0], np.cumsum(panels)])  # integral up to node j*h, j = 0..n-1
    out[: n - 1] = acc[1:]
    out[n - 1] = acc[n - 1] + h * g[n - 1]
    return out


def apply_A_inverse_exact(cfg: PDEConfig, y1, y2):
    """Quadrature realization of the closed-form inverse of the spatial operator.

    x2(z) = -int_z^1 y1 and x1(z) = int_0^z y2 - int_0^z r(s) (int_s^1 y1) ds,
    evaluated on the staggered grid by composite trapezoid sums.  Independent
    of the difference matrices, so it serves as the oracle side of the
    inverse-agreement check.
    """
    y1 = np.asarray(y1, dtype=complex).reshape(-1)
    y2 = np.asarray(y2, dtype=complex).reshape(-1)
    if y1.shape != (cfg.n,) or y2.shape != (cfg.n,):
        raise InvalidConfig(f"y1 and y2 must each have {cfg.n} samples")
    h = cfg.h
    tails = _tail_integrals(y1, h)
    x2 = -tails
    x1 = _head_integrals(y2 - cfg.r * tails, h)
    return x1, x2


DEFAULT_TEST_FUNCTIONS = (
    (np.sin, np.cos),
    (lambda z: z, lambda z: z**2),
    (lambda z: np.exp(z), lambda z: np.cos(3.0 * z)),
)


def inverse_agreement(cfg: PDEConfig, test_functions=DEFAULT_TEST_FUNCTIONS) -> float:
    """Max weighted distance between A_h^{-1} y and the quadrature inverse.

    Evaluated over a fixed family of smooth test functions; first order in h
    since both sides are O(h)-consistent but structurally different schemes.
    """
    pencil = discretize(cfg)
    A = np.asarray(pencil.A)
    if not np.isfinite(np.linalg.cond(A)) or np.linalg.cond(A) > 1e12:
        raise NotRegular("A_h is numerically singular")
    z1, z2 = x1_nodes(cfg.n), x2_nodes(cfg.n)
    worst = 0.0
    for f1, f2 in test_functions:
        y1 = np.asarray([f1(z) for z in z1], dtype=complex)
        y2 = np.asarray([f2(z) for z in z2], dtype=complex)
        direct = np.linalg.solve(A, np.concatenate([y1, y2]))
        x1, x2 = apply_A_inverse_exact(cfg, y1, y2)
        err = weighted_vector_norm(direct - np.concatenate([x1, x2]), pencil.state_weight)
        worst = max(worst, err)
    return worst


@dataclass(frozen=True)
class RegimeExperiment:
    regime: str
    n: int
    real_report: IndexReport
    vertical_report: IndexReport

    def to_dict(self):
        return {
            "regime": self.regime,
            "n": self.n,
            "real": self.real_report.to_dict(),
            "vertical": self.vertical_report.to_dict(),
        }


def regime_index_experiment(cfg: PDEConfig, window=None, count: int = 24) -> RegimeExperiment:
    """Real and complex index fits for a discretized configuration.

    The vertical-line fit sweeps frequencies in `window`, defaulting to
    [1, 0.2*n] where the discrete resolvent still mimics the PDE; omega = 1
    keeps every sample safely inside the discrete resolvent half-plane.  The
    real-ray fit probes the asymptotic growth on [1e2, 1e6], which is what
    the regime classifications refer to.
    """
    pencil = discretize(cfg)
    if window is None:
        window = (1.0, FREQUENCY_WINDOW_FACTOR * cfg.n)
    real_report = fit_resolvent_index(pencil, ray=REAL_RAY, omega=0.0, window=REAL_RAY_WINDOW, count=count)
    vertical_report = fit_resolvent_index(pencil, ray=VERTICAL_LINE, omega=1.0, window=window, count=count)
    return RegimeExperiment(regime=cfg.regime, n=cfg.n, real_report=real_report, vertical_report=vertical_report)


def lower_bound_witness(cfg: PDEConfig, window=WITNESS_WINDOW, count: int = 12):
    """Norms of (lambda E_h - A_h)^{-1} y for the witness y = (0, r/||r||_inf).

    In the diffusion regime the solution tends to the constant x2 = 1/||r||_inf
    away from a boundary layer at zeta = 1, so the weighted norms flatten out
    over the (asymptotic) window and bound the resolvent norm from below
    lambda-independently.  Returns one ResolventSample per lambda with the
    witness norm in the norm field.
    """
    if cfg.regime != "diffusion":
        raise InvalidConfig("the lower-bound witness is defined for the diffusion preset")
    pencil = discretize(cfg)
    rmax = float(np.max(cfg.r))
    y = np.concatenate([np.zeros(cfg.n), cfg.r / rmax]).astype(complex)
    samples = []
    for lam in np.geomspace(window[0], window[1], count):
        M = lam * np.asarray(pencil.E) - np.asarray(pencil.A)
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e12:
            raise NotRegular(f"witness sample lambda = {lam} is numerically singular")
        x = np.linalg.solve(M, y)
        samples.append(
            ResolventSample(
                lam=complex(lam),
                norm=weighted_vector_norm(x, pencil.state_weight),
                condition=float(max(cond, 1.0)),
            )
        )
    return samples
