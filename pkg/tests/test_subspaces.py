"""Subspace arithmetic, Wong chains, and the rational-arithmetic oracle."""

import numpy as np
import pytest

from daelab import (
    DimensionMismatch,
    Pencil,
    Subspace,
    augmented_wong_sequence,
    contains,
    from_columns,
    image,
    intersect,
    kernel,
    preimage,
    sum_spaces,
    wong_sequence,
)
from daelab.subspaces import angle_into, full_space, membership_defect, zero_space

from exact_oracle import augmented_wong_dims_exact, is_regular_exact, wong_dims_exact
from support import weierstrass_pencil

E1 = np.array([[1.0], [0.0]])


def test_subspace_rejects_non_orthonormal():
    with pytest.raises(DimensionMismatch):
        Subspace(basis=np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_from_columns_rank_detection():
    S = from_columns(np.array([[1.0, 2.0], [0.0, 0.0]]))
    assert S.dim == 1
    assert S.ambient_dim == 2


def test_preimage_identity():
    S = preimage(np.eye(2), from_columns(E1))
    assert S.dim == 1
    assert contains(S, np.array([1.0, 0.0]), 1e-10)


def test_preimage_into_zero_is_kernel():
    M = np.array([[0.0, 1.0], [0.0, 0.0]])
    S = preimage(M, zero_space(2))
    # kernel oracle: null space of M is span{e1}
    assert S.dim == 1
    assert contains(S, np.array([1.0, 0.0]), 1e-10)


def test_preimage_zero_map_full():
    S = preimage(np.zeros((2, 2)), zero_space(2))
    assert S.dim == 2


def test_kernel_image_sum_intersect():
    M = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert kernel(M).dim == 2
    assert image(M).dim == 1
    S1 = from_columns(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    S2 = from_columns(np.array([[0.0], [1.0], [1.0]]))
    assert sum_spaces(S1, S2).dim == 3
    inter = intersect(S1, S2)
    assert inter.dim == 0
    S3 = from_columns(np.array([[0.0], [1.0], [0.0]]))
    assert intersect(S1, S3).dim == 1


def test_contains_examples():
    S = from_columns(E1)
    assert contains(S, np.array([1.0, 0.0]), 1e-8)
    assert not contains(S, np.array([0.0, 1.0]), 1e-8)
    # {(x, z) : x2 + z2 = 0} = kernel of the row [0 1 0 1]
    S = kernel(np.array([[0.0, 1.0, 0.0, 1.0]]))
    assert contains(S, np.array([1.0, 1.0, 0.0, -1.0]), 1e-10)
    assert not contains(S, np.array([0.0, 1.0, 0.0, 1.0]), 1e-6)


def test_wong_invertible_e():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(2, 2))
    chain = wong_sequence(Pencil(E=np.eye(2), A=A))
    assert chain.dims == (2, 2)
    assert chain.stabilized_at == 0
    assert chain.limit.dim == 2


def test_wong_nilpotent():
    chain = wong_sequence(Pencil(E=np.array([[0.0, 1.0], [0.0, 0.0]]), A=np.eye(2)))
    assert chain.dims[:3] == (2, 1, 0)
    assert chain.stabilized_at == 2
    assert chain.limit.dim == 0


def test_wong_index_one():
    chain = wong_sequence(Pencil(E=np.diag([1.0, 0.0]), A=np.eye(2)))
    assert chain.dims == (2, 1, 1)
    assert chain.stabilized_at == 1
    assert contains(chain.limit, np.array([1.0, 0.0]), 1e-10)
    assert not contains(chain.limit, np.array([0.0, 1.0]), 1e-6)


def test_wong_limit_matches_resolvent_range():
    # limit = ran((lambda E - A)^{-1} E)^k for any resolvent-set lambda
    rng = np.random.default_rng(7)
    for _ in range(15):
        n = int(rng.integers(2, 6))
        p = weierstrass_pencil(rng, n, int(rng.integers(0, min(n, 3) + 1)))
        chain = wong_sequence(p)
        lam = p.regularity.witness
        k = max(chain.stabilized_at, 1)
        RE = p.right_resolvent(lam)
        Rr = np.linalg.matrix_power(RE, k)
        # powering the resolvent compounds rounding; the noise floor scales
        # with the product of the factor norms, not with sigma_max(Rr)
        # (which is itself pure noise for nilpotent limits)
        range_space = from_columns(Rr, tol=1e-9 * max(np.linalg.norm(RE, 2), 1.0) ** k)
        assert chain.limit.dim == range_space.dim
        assert angle_into(chain.limit, range_space) < 1e-7
        assert angle_into(range_space, chain.limit) < 1e-7


def test_augmented_surjective_e():
    chain = augmented_wong_sequence(np.eye(2), np.array([[0.0, 3.0], [1.0, 0.0]]))
    assert chain.dims == (4, 4)
    assert chain.stabilized_at == 0


def test_augmented_rank_one_e():
    chain = augmented_wong_sequence(np.diag([1.0, 0.0]), np.eye(2))
    assert chain.dims == (4, 3, 3)
    assert chain.stabilized_at == 1
    # V_1 = {(x, z) : x2 + z2 = 0}
    assert contains(chain.limit, np.array([1.0, 1.0, 0.0, -1.0]), 1e-10)
    assert membership_defect(chain.limit, np.array([0.0, 1.0, 0.0, 1.0])) > 0.5


def test_augmented_zero_e():
    # computed exactly: V_1 = {(x, z) : x + z = 0} and V_2 = V_1
    chain = augmented_wong_sequence(np.zeros((2, 2)), np.eye(2))
    assert chain.dims == (4, 2, 2)
    assert chain.stabilized_at == 1
    assert contains(chain.limit, np.array([1.0, 2.0, -1.0, -2.0]), 1e-10)
    assert augmented_wong_dims_exact(np.zeros((2, 2), dtype=int), np.eye(2, dtype=int)) == [4, 2, 2]


def test_augmented_chain_nested_and_stabilizes():
    rng = np.random.default_rng(29)
    for _ in range(40):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        E = rng.normal(size=(m, n))
        A = rng.normal(size=(m, n))
        chain = augmented_wong_sequence(E, A)
        assert chain.stabilized_at <= m + n
        dims = chain.dims
        assert all(dims[i + 1] <= dims[i] for i in range(len(dims) - 1))
        for i in range(len(chain.spaces) - 1):
            assert angle_into(chain.spaces[i + 1], chain.spaces[i]) < 1e-8


def test_wong_chain_nested():
    rng = np.random.default_rng(31)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        p = weierstrass_pencil(rng, n, int(rng.integers(0, min(n, 3) + 1)))
        chain = wong_sequence(p)
        for i in range(len(chain.spaces) - 1):
            assert angle_into(chain.spaces[i + 1], chain.spaces[i]) < 1e-8
        assert chain.stabilized_at <= p.shape[0]


def test_wong_dims_match_rational_oracle():
    # small pencils with entries in {-1, 0, 1}: float chain == exact chain
    rng = np.random.default_rng(37)
    checked = 0
    while checked < 60:
        n = int(rng.integers(2, 5))
        E = rng.integers(-1, 2, size=(n, n))
        A = rng.integers(-1, 2, size=(n, n))
        if not is_regular_exact(E, A):
            continue
        p = Pencil(E=E.astype(float), A=A.astype(float))
        if not p.regularity.regular:
            continue
        exact_dims = wong_dims_exact(E, A)
        got = wong_sequence(p)
        assert list(got.dims) == exact_dims
        assert got.limit.dim == exact_dims[-1]
        checked += 1
