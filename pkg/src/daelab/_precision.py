"""Extended-precision linear solves for ill-conditioned resolvent samples.

Resolvent norms of high-index pencils legitimately reach condition numbers
around 1e16..1e24 at the top of the fitting windows, where float64 LU either
aborts with an exact zero pivot or returns noise.  An 80-bit pivoted LU
(numpy's clongdouble on x86) buys enough headroom for the log-log fits, which
only need one or two significant digits per sample.  This is fixed hardware
precision, not arbitrary-precision arithmetic.
"""

from __future__ import annotations

import numpy as np

from .errors import NotInResolventSet


def lu_solve_extended(M: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve M X = B with partial pivoting in complex longdouble.

    Intended for small dense systems only; cost is O(n^3) Python-level row
    operations, which is fine for the n <= a-few-hundred matrices we meet.
    """
    A = np.array(M, dtype=np.clongdouble)
    X = np.array(B, dtype=np.clongdouble)
    if X.ndim == 1:
        X = X[:, None]
    n = A.shape[0]
    if A.shape[1] != n or X.shape[0] != n:
        raise ValueError("lu_solve_extended expects a square system")
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0:
            raise NotInResolventSet(None, message="exactly singular matrix in extended-precision solve")
        if p != k:
            A[[k, p]] = A[[p, k]]
            X[[k, p]] = X[[p, k]]
        factors = A[k + 1 :, k] / A[k, k]
        A[k + 1 :, k + 1 :] -= np.outer(factors, A[k, k + 1 :])
        X[k + 1 :] -= np.outer(factors, X[k])
    for i in range(n - 1, -1, -1):
        X[i] = (X[i] - A[i, i + 1 :] @ X[i + 1 :]) / A[i, i]
    out = np.asarray(X, dtype=complex)
    return out if np.ndim(B) > 1 else out[:, 0]
