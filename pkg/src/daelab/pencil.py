"""Matrix pencils (E, A): resolvents, regularity, and weighted norms.

A pencil is the family lambda*E - A.  All other modules build on the three
primitives here: evaluating (lambda*E - A)^{-1}, deciding regularity by
random sampling, and measuring operators in the weighted inner products that
the PDE discretization uses to mimic L2 norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._precision import lu_solve_extended
from .errors import DimensionMismatch, NotInResolventSet, NotRegular

#: condition number beyond which lambda is treated as outside the resolvent
#: set when deciding membership (double precision headroom).
SINGULAR_CONDITION = 1e12

#: backward-residual contract for resolvent solves:
#: ||(lambda E - A) M - I|| <= RESIDUAL_CONTRACT * ||lambda E - A|| * ||M||.
RESIDUAL_CONTRACT = 1e-10


def _as_complex_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {M.shape}")
    return M


def _check_weight(W, dim, name):
    W = _as_complex_matrix(W, name)
    if W.shape != (dim, dim):
        raise DimensionMismatch(f"{name} must be {dim}x{dim}, got {W.shape}")
    if np.linalg.norm(W - W.conj().T, 2) > 1e-12 * max(1.0, np.linalg.norm(W, 2)):
        raise DimensionMismatch(f"{name} must be Hermitian")
    if np.min(np.linalg.eigvalsh(W)) <= 0:
        raise DimensionMismatch(f"{name} must be positive definite")
    return W


@dataclass(frozen=True)
class ResolventSample:
    """Evidence that lambda belongs to the sampled resolvent set."""

    lam: complex
    norm: float
    condition: float

    def __post_init__(self):
        if self.norm < 0:
            raise ValueError("norm must be nonnegative")
        if self.condition < 1:
            raise ValueError("condition must be >= 1")


@dataclass(frozen=True)
class RegularityWitness:
    regular: bool
    witness: complex | None
    condition: float


@dataclass(frozen=True)
class Pencil:
    """Ordered pair of complex matrices (E, A) of equal shape.

    Optional Hermitian positive-definite weights define the inner products of
    the state space (columns) and the codomain (rows); they default to the
    identity.  Instances are immutable; analysis results are cached and safe
    to share between threads.
    """

    E: np.ndarray
    A: np.ndarray
    state_weight: np.ndarray | None = None
    codomain_weight: np.ndarray | None = None

    def __post_init__(self):
        E = _as_complex_matrix(self.E, "E")
        A = _as_complex_matrix(self.A, "A")
        if E.shape != A.shape:
            raise DimensionMismatch(f"E has shape {E.shape} but A has shape {A.shape}")
        E.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        m, n = E.shape
        if self.state_weight is not None:
            object.__setattr__(self, "state_weight", _check_weight(self.state_weight, n, "state_weight"))
        if self.codomain_weight is not None:
            object.__setattr__(self, "codomain_weight", _check_weight(self.codomain_weight, m, "codomain_weight"))

    @property
    def shape(self):
        return self.E.shape

    @property
    def is_square(self) -> bool:
        m, n = self.E.shape
        return m == n

    @cached_property
    def scale(self) -> float:
        return max(np.linalg.norm(self.E, 2), np.linalg.norm(self.A, 2), 1e-300)

    @cached_property
    def regularity(self) -> RegularityWitness:
        return _decide_regularity(self)

    def resolvent(self, lam, cond_limit=SINGULAR_CONDITION):
        return resolvent(self, lam, cond_limit=cond_limit)

    def right_resolvent(self, lam, cond_limit=SINGULAR_CONDITION):
        """(lambda E - A)^{-1} E, the right resolvent factor."""
        return self.resolvent(lam, cond_limit=cond_limit) @ self.E

    def left_resolvent(self, lam, cond_limit=SINGULAR_CONDITION):
        """E (lambda E - A)^{-1}, the left resolvent factor."""
        return self.E @ self.resolvent(lam, cond_limit=cond_limit)

    def state_norm(self, v) -> float:
        return weighted_vector_norm(v, self.state_weight)

    def codomain_norm(self, v) -> float:
        return weighted_vector_norm(v, self.codomain_weight)

    def resolvent_sample(self, lam, cond_limit=None) -> ResolventSample:
        """Weighted resolvent norm plus conditioning evidence at lambda."""
        R, cond = _solve_resolvent(self, lam, cond_limit)
        norm = operator_norm(R, in_weight=self.codomain_weight, out_weight=self.state_weight)
        return ResolventSample(lam=complex(lam), norm=float(norm), condition=float(max(cond, 1.0)))


def weighted_vector_norm(v, weight=None) -> float:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if weight is None:
        return float(np.linalg.norm(v))
    return float(np.sqrt(np.real(np.vdot(v, weight @ v))))


def _weight_sqrt(W, dim, inverse=False):
    if W is None:
        return None
    vals, vecs = np.linalg.eigh(W)
    if inverse:
        vals = 1.0 / vals
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def operator_norm(M, in_weight=None, out_weight=None) -> float:
    """Largest singular value of W_out^{1/2} M W_in^{-1/2}.

    This is the operator norm of M mapping the W_in inner-product space into
    the W_out one; identity weights give the plain spectral norm.
    """
    M = _as_complex_matrix(M, "M")
    m, n = M.shape
    if in_weight is not None:
        Win = _check_weight(in_weight, n, "in_weight")
        M = M @ _weight_sqrt(Win, n, inverse=True)
    if out_weight is not None:
        Wout = _check_weight(out_weight, m, "out_weight")
        M = _weight_sqrt(Wout, m) @ M
    return float(np.linalg.norm(M, 2))


def _solve_resolvent(p: Pencil, lam, cond_limit):
    """Invert lambda*E - A, returning (inverse, condition estimate).

    cond_limit=None keeps ill-conditioned but regular samples (high-index
    growth) by escalating to extended precision; a finite limit enforces the
    membership threshold and raises NotInResolventSet beyond it.
    """
    if not p.is_square:
        raise DimensionMismatch(
            "resolvent evaluation requires a square pencil; "
            f"got shape {p.shape} (the resolvent set of a rectangular pencil is empty)"
        )
    lam = complex(lam)
    M = lam * p.E - p.A
    n = M.shape[0]
    Mnorm = np.linalg.norm(M, 2)
    if Mnorm == 0:
        raise NotInResolventSet(lam, condition=np.inf)
    identity = np.eye(n, dtype=complex)
    X = None
    try:
        X = np.linalg.solve(M, identity)
    except np.linalg.LinAlgError:
        pass
    if X is not None:
        Xnorm = np.linalg.norm(X, 2)
        cond = Mnorm * Xnorm
        residual = np.linalg.norm(M @ X - identity, 2)
        if residual <= RESIDUAL_CONTRACT * Mnorm * Xnorm and (cond_limit is None or cond <= cond_limit):
            return X, cond
        if cond_limit is not None:
            raise NotInResolventSet(lam, condition=cond)
    elif cond_limit is not None:
        raise NotInResolventSet(lam, condition=np.inf)
    # extended-precision retry for legitimate high-index growth
    try:
        X = lu_solve_extended(M, identity)
    except NotInResolventSet:
        raise NotInResolventSet(lam, condition=np.inf) from None
    Xnorm = np.linalg.norm(X, 2)
    cond = Mnorm * Xnorm
    return X, cond


def resolvent(p: Pencil, lam, cond_limit=SINGULAR_CONDITION) -> np.ndarray:
    """(lambda E - A)^{-1} as a dense matrix.

    Raises NotInResolventSet when lambda*E - A is singular beyond the
    condition threshold (default 1e12).  Passing cond_limit=None admits
    ill-conditioned but regular samples, which index fitting needs.
    """
    X, _ = _solve_resolvent(p, lam, cond_limit)
    return X


def _decide_regularity(p: Pencil, rng=None) -> RegularityWitness:
    """Sample n+1 points on a circle of radius 1 + ||E|| + ||A||.

    det(lambda*E - A) is a polynomial of degree <= n, so a regular pencil can
    be singular at no more than n of the samples; all n+1 failing means the
    determinant vanishes identically up to the sampling tolerance.  Failure
    probability is zero for exact arithmetic and random angles.
    """
    if not p.is_square:
        raise DimensionMismatch("regularity is defined for square pencils only")
    n = p.shape[0]
    if rng is None:
        rng = np.random.default_rng(0x9E3779B9)
    radius = 1.0 + np.linalg.norm(p.E, 2) + np.linalg.norm(p.A, 2)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n + 1)
    best_lam = None
    best_cond = np.inf
    for theta in angles:
        lam = radius * np.exp(1j * theta)
        try:
            _, cond = _solve_resolvent(p, lam, SINGULAR_CONDITION)
        except NotInResolventSet:
            continue
        if cond < best_cond:
            best_cond = cond
            best_lam = lam
    return RegularityWitness(regular=best_lam is not None, witness=best_lam, condition=best_cond)


def is_regular(p: Pencil) -> RegularityWitness:
    """Decide regularity (det(lambda E - A) not identically zero) with a witness."""
    return p.regularity


def require_regular(p: Pencil) -> RegularityWitness:
    w = p.regularity
    if not w.regular:
        raise NotRegular("pencil is singular: det(lambda E - A) vanishes at all sampled points")
    return w
