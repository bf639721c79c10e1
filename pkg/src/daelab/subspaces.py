"""Orthonormal subspace arithmetic and the Wong sequence iterations.

Subspaces are stored as matrices with orthonormal columns; rank decisions
use singular-value thresholding at max(m, n) * eps * sigma_max unless the
caller overrides the tolerance.  Closures appearing in the theory are the
spaces themselves here, since everything is finite dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotRegular
from .pencil import Pencil, require_regular

ORTHONORMALITY_TOL = 1e-10
STABILIZATION_ANGLE = 1e-8


def _default_rank_tol(s, shape):
    if len(s) == 0:
        return 0.0
    return max(shape) * np.finfo(float).eps * float(s[0])


def _operator_rank_tol(M) -> float:
    """Rank tolerance pinned to the operator's own scale.

    Derived quantities like (I - P_S) M consist purely of round-off when the
    true value is zero; thresholding them against their own largest singular
    value would promote that noise to full rank, so image and preimage
    computations measure rank relative to sigma_max(M) instead.  The factor
    32 covers the rounding chain of forming the projector defect.
    """
    if not np.any(M):
        return 0.0
    return 32.0 * max(M.shape) * np.finfo(float).eps * float(np.linalg.norm(M, 2))


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^d given by an orthonormal basis matrix (d x k)."""

    basis: np.ndarray
    tol: float = 0.0

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=complex)
        if B.ndim != 2:
            raise DimensionMismatch("basis must be a 2-d array")
        d, k = B.shape
        if k > d:
            raise DimensionMismatch(f"basis has more columns ({k}) than ambient dimension ({d})")
        if k and np.linalg.norm(B.conj().T @ B - np.eye(k), 2) > ORTHONORMALITY_TOL:
            raise DimensionMismatch("basis columns are not orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ v)


def from_columns(cols, tol=None) -> Subspace:
    """Column space of an arbitrary matrix, orthonormalized by SVD."""
    cols = np.asarray(cols, dtype=complex)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.shape[1] == 0:
        return Subspace(basis=np.zeros((cols.shape[0], 0), dtype=complex), tol=0.0)
    U, s, _ = np.linalg.svd(cols, full_matrices=False)
    cut = _default_rank_tol(s, cols.shape) if tol is None else tol
    rank = int(np.sum(s > cut))
    return Subspace(basis=U[:, :rank], tol=cut)


def full_space(d: int) -> Subspace:
    return Subspace(basis=np.eye(d, dtype=complex), tol=0.0)


def zero_space(d: int) -> Subspace:
    return Subspace(basis=np.zeros((d, 0), dtype=complex), tol=0.0)


def kernel(M, tol=None) -> Subspace:
    """Right null space of M."""
    M = np.asarray(M, dtype=complex)
    m, n = M.shape
    if m == 0 or not np.any(M):
        return full_space(n)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    cut = _default_rank_tol(s, M.shape) if tol is None else tol
    rank = int(np.sum(s > cut))
    return Subspace(basis=Vh[rank:].conj().T, tol=cut)


def image(M, S: Subspace | None = None, tol=None) -> Subspace:
    """Range of M, or of M restricted to the subspace S.

    Rank decisions are relative to sigma_max(M), so directions that M maps
    to round-off noise are not kept alive.
    """
    M = np.asarray(M, dtype=complex)
    cols = M if S is None else M @ S.basis
    return from_columns(cols, tol=_operator_rank_tol(M) if tol is None else tol)


def preimage(M, S: Subspace, tol=None) -> Subspace:
    """The subspace {v : M v in S}, computed as ker((I - P_S) M).

    The kernel cut is relative to sigma_max(M): when M maps everything into
    S the defect matrix is pure round-off and must count as zero.
    """
    M = np.asarray(M, dtype=complex)
    if M.shape[0] != S.ambient_dim:
        raise DimensionMismatch(
            f"M maps into dimension {M.shape[0]} but S lives in dimension {S.ambient_dim}"
        )
    defect = M - S.project(M)
    return kernel(defect, tol=_operator_rank_tol(M) if tol is None else tol)


def sum_spaces(S1: Subspace, S2: Subspace, tol=None) -> Subspace:
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatch("subspace sum requires equal ambient dimensions")
    return from_columns(np.hstack([S1.basis, S2.basis]), tol=tol)


def intersect(S1: Subspace, S2: Subspace, tol=None) -> Subspace:
    """Intersection as the joint kernel of the two complementary projectors."""
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatch("subspace intersection requires equal ambient dimensions")
    d = S1.ambient_dim
    stacked = np.vstack([np.eye(d) - S1.projector(), np.eye(d) - S2.projector()])
    return kernel(stacked, tol=tol)


def contains(S: Subspace, v, tol=1e-8) -> bool:
    """Membership of a vector up to tol * max(1, ||v||)."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != S.ambient_dim:
        raise DimensionMismatch(f"vector has length {v.shape[0]}, ambient dimension is {S.ambient_dim}")
    defect = np.linalg.norm(v - S.project(v))
    return defect <= tol * max(1.0, np.linalg.norm(v))


def membership_defect(S: Subspace, v) -> float:
    """||(I - P_S) v|| / max(1, ||v||), the quantity behind contains()."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != S.ambient_dim:
        raise DimensionMismatch(f"vector has length {v.shape[0]}, ambient dimension is {S.ambient_dim}")
    return float(np.linalg.norm(v - S.project(v)) / max(1.0, np.linalg.norm(v)))


def angle_into(inner: Subspace, outer: Subspace) -> float:
    """Sine of the largest principal angle from `inner` into `outer`.

    Zero (numerically) iff inner is contained in outer.
    """
    if inner.ambient_dim != outer.ambient_dim:
        raise DimensionMismatch("principal angles require equal ambient dimensions")
    if inner.dim == 0:
        return 0.0
    defect = inner.basis - outer.project(inner.basis)
    return float(np.linalg.norm(defect, 2))


def spaces_equal(S1: Subspace, S2: Subspace, angle_tol=STABILIZATION_ANGLE) -> bool:
    return (
        S1.dim == S2.dim
        and angle_into(S1, S2) < angle_tol
        and angle_into(S2, S1) < angle_tol
    )


@dataclass(frozen=True)
class WongChain:
    """A stabilized nested chain V_0 >= V_1 >= ... of subspaces.

    spaces[stabilized_at] equals spaces[stabilized_at + 1]; the limit is the
    first repeated space.
    """

    spaces: tuple[Subspace, ...]
    stabilized_at: int

    @property
    def limit(self) -> Subspace:
        return self.spaces[self.stabilized_at]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(S.dim for S in self.spaces)


def _iterate_chain(start: Subspace, step, max_steps: int) -> WongChain:
    spaces = [start]
    for _ in range(max_steps):
        nxt = step(spaces[-1])
        spaces.append(nxt)
        prev = spaces[-2]
        if nxt.dim == prev.dim and spaces_equal(nxt, prev):
            return WongChain(spaces=tuple(spaces), stabilized_at=len(spaces) - 2)
    raise NotRegular(f"chain failed to stabilize within {max_steps} steps")


def wong_sequence(p: Pencil, tol=None) -> WongChain:
    """Classical Wong iteration V_{i+1} = A^{-1}(E V_i) from the full space.

    The stabilization step count equals the nilpotency index of the infinite
    part of a regular pencil; the limit carries all solution trajectories.
    """
    require_regular(p)
    n = p.shape[1]

    def step(V: Subspace) -> Subspace:
        return preimage(p.A, image(p.E, V, tol=tol), tol=tol)

    return _iterate_chain(full_space(n), step, max_steps=n + 1)


def augmented_wong_sequence(E, A, tol=None) -> WongChain:
    """Wong iteration for the inhomogeneity-augmented pair ([E 0], [A I]).

    Operates on C^n x C^m pairs (x, z); the limit characterizes which
    (state, inhomogeneity) values can occur along classical solutions of
    d/dt E x = A x + f.  Regularity is not required.
    """
    E = np.asarray(E, dtype=complex)
    A = np.asarray(A, dtype=complex)
    if E.shape != A.shape:
        raise DimensionMismatch(f"E has shape {E.shape} but A has shape {A.shape}")
    m, n = E.shape
    E_aug = np.hstack([E, np.zeros((m, m), dtype=complex)])
    A_aug = np.hstack([A, np.eye(m, dtype=complex)])

    def step(V: Subspace) -> Subspace:
        return preimage(A_aug, image(E_aug, V, tol=tol), tol=tol)

    return _iterate_chain(full_space(n + m), step, max_steps=n + m + 1)
