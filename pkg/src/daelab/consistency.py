"""Consistent initialization: chain certificates and membership checks.

An initial value x0 together with an inhomogeneity jet f(0), f'(0), ... is
consistent when the ladder

    E x_{j+1} = A x_j + f^(j)(0),    j = 0, ..., p-1

admits a solution chain x_1, ..., x_p; p defaults to the algebraic index
plus one.  Chains are underdetermined up to ker E, so each level takes the
minimum-norm completion to keep certificates reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InconsistentInitialValue
from .pencil import Pencil
from .subspaces import augmented_wong_sequence, membership_defect

FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class InputJet:
    """Values f(0), f'(0), ..., f^(order-1)(0) of an inhomogeneity at t=0."""

    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        vals = tuple(np.asarray(v, dtype=complex).reshape(-1) for v in self.values)
        if vals and any(v.shape != vals[0].shape for v in vals):
            raise DimensionMismatch("all jet values must have the same dimension")
        object.__setattr__(self, "values", vals)

    @property
    def order(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.values[0].shape[0] if self.values else 0

    @staticmethod
    def zero(order: int, dim: int) -> "InputJet":
        return InputJet(values=tuple(np.zeros(dim, dtype=complex) for _ in range(order)))

    def mapped(self, M) -> "InputJet":
        """The jet of M f, e.g. turning an input jet into B u-jets."""
        M = np.asarray(M, dtype=complex)
        return InputJet(values=tuple(M @ v for v in self.values))

    def padded(self, order: int) -> "InputJet":
        if order <= self.order:
            return self
        dim = self.dim
        extra = tuple(np.zeros(dim, dtype=complex) for _ in range(order - self.order))
        return InputJet(values=self.values + extra)


@dataclass(frozen=True)
class ChainCertificate:
    chain: tuple[np.ndarray, ...]            # x_0, x_1, ..., x_p
    residuals: tuple[float, ...]             # per-level defects after least squares
    scales: tuple[float, ...]                # 1 + ||A x_j + f_j|| per level
    feasible: bool
    first_infeasible_level: int | None

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "first_infeasible_level": self.first_infeasible_level,
            "residuals": list(self.residuals),
            "scales": list(self.scales),
            "chain": [[[z.real, z.imag] for z in x] for x in self.chain],
        }


def _prepare(E, A, x0, jet: InputJet, p: int):
    E = np.asarray(E, dtype=complex)
    A = np.asarray(A, dtype=complex)
    if E.shape != A.shape:
        raise DimensionMismatch(f"E has shape {E.shape} but A has shape {A.shape}")
    m, n = E.shape
    x0 = np.asarray(x0, dtype=complex).reshape(-1)
    if x0.shape[0] != n:
        raise DimensionMismatch(f"x0 has length {x0.shape[0]}, state dimension is {n}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if jet.order < p:
        raise DimensionMismatch(f"jet order {jet.order} is below the requested chain length {p}")
    if jet.order and jet.dim != m:
        raise DimensionMismatch(f"jet values have dimension {jet.dim}, codomain dimension is {m}")
    return E, A, x0, m, n


def solve_chain(E, A, x0, jet: InputJet, p: int) -> ChainCertificate:
    """Solve the consistency ladder for x_1, ..., x_p given x_0.

    All p levels are solved jointly as one stacked least-squares system and
    the minimum-norm joint solution is returned, so certificates stay
    deterministic.  (Solving level by level with per-level minimum-norm
    completions would be incomplete: the completion at level j can destroy
    solvability at level j+1 even when a valid chain exists.)  Feasible iff
    every level's residual stays below FEASIBILITY_TOL * (1 + ||A x_j + f_j||);
    the first level exceeding its tolerance is recorded for diagnosis.
    """
    E, A, x0, m, n = _prepare(E, A, x0, jet, p)
    M = np.zeros((p * m, p * n), dtype=complex)
    F = np.zeros(p * m, dtype=complex)
    for j in range(p):
        M[j * m : (j + 1) * m, j * n : (j + 1) * n] = E
        if j > 0:
            M[j * m : (j + 1) * m, (j - 1) * n : j * n] = -A
        F[j * m : (j + 1) * m] = jet.values[j]
    F[:m] += A @ x0
    xi, *_ = np.linalg.lstsq(M, F, rcond=None)
    chain = [x0] + [xi[j * n : (j + 1) * n] for j in range(p)]
    residuals = []
    scales = []
    feasible = True
    first_bad = None
    for j in range(p):
        rhs = A @ chain[j] + jet.values[j]
        res = float(np.linalg.norm(E @ chain[j + 1] - rhs))
        scale = 1.0 + float(np.linalg.norm(rhs))
        residuals.append(res)
        scales.append(scale)
        if res > FEASIBILITY_TOL * scale and first_bad is None:
            feasible = False
            first_bad = j
    return ChainCertificate(
        chain=tuple(chain),
        residuals=tuple(residuals),
        scales=tuple(scales),
        feasible=feasible,
        first_infeasible_level=first_bad,
    )


def default_chain_length(E, A) -> int:
    """algebraic_index + 1, the chain length needed for membership."""
    from .indices import algebraic_index

    return algebraic_index(Pencil(E=E, A=A)) + 1


def consistent_membership(E, A, x0, jet: InputJet, p: int | None = None):
    """Decide membership of (x0, jet) in the consistent set.

    Returns (feasible, certificate).  Requires a regular pencil when p is
    left at its default, since the default chain length is index + 1.
    """
    if p is None:
        p = default_chain_length(E, A)
    cert = solve_chain(E, A, x0, jet.padded(p), p)
    return cert.feasible, cert


def consistent_projection(E, A, x0, jet: InputJet, p: int | None = None) -> np.ndarray:
    """Minimum-norm correction of x0 onto the consistent set.

    Solves the stacked ladder for (x0', x_1, ..., x_p) as one least-squares
    system and then moves along its solution manifold to minimize
    ||x0' - x0||.  Raises InconsistentInitialValue if no chain exists at all
    (possible only for singular pencils).
    """
    if p is None:
        p = default_chain_length(E, A)
    jet = jet.padded(p)
    E, A, x0, m, n = _prepare(E, A, x0, jet, p)
    cols = (p + 1) * n
    M = np.zeros((p * m, cols), dtype=complex)
    F = np.zeros(p * m, dtype=complex)
    for j in range(p):
        M[j * m : (j + 1) * m, j * n : (j + 1) * n] = -A
        M[j * m : (j + 1) * m, (j + 1) * n : (j + 2) * n] = E
        F[j * m : (j + 1) * m] = jet.values[j]
    xi, *_ = np.linalg.lstsq(M, F, rcond=None)
    stacked_res = np.linalg.norm(M @ xi - F)
    if stacked_res > FEASIBILITY_TOL * (1.0 + np.linalg.norm(F)):
        raise InconsistentInitialValue(
            "no consistent initialization exists for the supplied jet "
            f"(stacked residual {stacked_res:.3e})"
        )
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    cut = 32.0 * max(M.shape) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    rank = int(np.sum(s > cut))
    K0 = Vh[rank:].conj().T[:n, :]
    if K0.shape[1]:
        # K0 stacks the x0-rows of orthonormal kernel vectors, so its
        # singular values sit in [0, 1]; when the consistent x0 is (nearly)
        # unique they are pure noise, which a relative cutoff would keep.
        c = scipy.linalg.pinv(K0, atol=1e-10, rtol=0.0) @ (x0 - xi[:n])
        return xi[:n] + K0 @ c
    return xi[:n]


def necessary_projection_check(E, A, trajectory_samples) -> float:
    """Max defect of (x(t), f(t)) pairs against the augmented Wong limit.

    Certified trajectories of d/dt E x = A x + f stay inside the limit
    subspace; the returned value is the largest normalized distance over the
    supplied samples.
    """
    limit = augmented_wong_sequence(E, A).limit
    worst = 0.0
    for x, f in trajectory_samples:
        v = np.concatenate([np.asarray(x, dtype=complex).reshape(-1), np.asarray(f, dtype=complex).reshape(-1)])
        worst = max(worst, membership_defect(limit, v))
    return worst
