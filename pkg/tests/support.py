"""Shared random generators for the test suite.

Everything is driven by explicit numpy Generators so failures reproduce.
"""

from __future__ import annotations

import numpy as np

from daelab import InputJet, PHForm, Pencil, SystemNode, validate_ph
from daelab.pencil import is_regular


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def weierstrass_pencil(rng, n, index, e_scale=1.0, eig_radius=0.5):
    """Regular pencil with prescribed nilpotency index via T diag(I, N) S.

    The slow block carries a random J with spectrum inside eig_radius; the
    fast block is a single nilpotent Jordan block of the requested size.
    e_scale multiplies E, which shifts resolvent-norm constants without
    changing slopes or indices.
    """
    if index > n:
        raise ValueError("index cannot exceed the dimension")
    s = n - index
    Ew = np.zeros((n, n), dtype=complex)
    Aw = np.zeros((n, n), dtype=complex)
    if s:
        J = rng.normal(size=(s, s)) + 1j * rng.normal(size=(s, s))
        J = eig_radius * J / max(1.0, np.linalg.norm(J, 2))
        Ew[:s, :s] = np.eye(s)
        Aw[:s, :s] = J
    if index:
        Ew[s:, s:] = np.diag(np.ones(index - 1), 1) if index > 1 else np.zeros((1, 1))
        Aw[s:, s:] = np.eye(index)
    T = rand_unitary(rng, n)
    S = rand_unitary(rng, n)
    return Pencil(E=e_scale * (T @ Ew @ S), A=T @ Aw @ S)


def random_invertible_e_pencil(rng, n):
    E = np.eye(n) + 0.3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    A = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    return Pencil(E=E, A=A)


def random_node(rng, n, u_dim=1, y_dim=1):
    """Well-scaled node with E near the identity, so |lambda| >= 3 is safe."""
    E = np.eye(n) + 0.3 * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    A = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)
    B = (rng.normal(size=(n, u_dim)) + 1j * rng.normal(size=(n, u_dim))) / np.sqrt(n)
    C = (rng.normal(size=(y_dim, n)) + 1j * rng.normal(size=(y_dim, n))) / np.sqrt(n)
    D = (rng.normal(size=(y_dim, u_dim)) + 1j * rng.normal(size=(y_dim, u_dim)))
    return SystemNode(E=E, A=A, B=B, C=C, D=D)


def resolvent_point(rng, node_or_pencil, radius_factor=3.0):
    E = node_or_pencil.E
    A = node_or_pencil.A
    radius = radius_factor * (1.0 + np.linalg.norm(E, 2) + np.linalg.norm(A, 2))
    return radius * np.exp(1j * rng.uniform(0, 2 * np.pi))


def random_ph_form(rng, n, u_dim=1, singular_e=False, lossless=False, max_tries=20):
    """Validated pH form with Q invertible and optionally singular E.

    E is built as Q^{-H} G for a PSD G, so E^H Q = G holds by construction;
    the dissipation block comes from an explicit Gram factor.
    """
    for _ in range(max_tries):
        K = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        J = 0.5 * (K - K.conj().T)
        if lossless:
            R = np.zeros((n, n), dtype=complex)
            P = np.zeros((n, u_dim), dtype=complex)
            S = np.zeros((u_dim, u_dim), dtype=complex)
        else:
            M = (rng.normal(size=(n + u_dim, n + u_dim)) + 1j * rng.normal(size=(n + u_dim, n + u_dim))) / np.sqrt(n + u_dim)
            W = 0.5 * (M @ M.conj().T)
            R, P, S = W[:n, :n], W[:n, n:], W[n:, n:]
        Kn = rng.normal(size=(u_dim, u_dim)) + 1j * rng.normal(size=(u_dim, u_dim))
        N = 0.5 * (Kn - Kn.conj().T)
        U = rand_unitary(rng, n)
        V = rand_unitary(rng, n)
        Q = U @ np.diag(rng.uniform(0.5, 1.5, size=n)) @ V.conj().T
        rank = rng.integers(1, n) if singular_e else n
        L = (rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))) / np.sqrt(n)
        G = L @ L.conj().T
        E = np.linalg.inv(Q.conj().T) @ G
        B = 0.5 * (rng.normal(size=(n, u_dim)) + 1j * rng.normal(size=(n, u_dim))) / np.sqrt(n)
        form = PHForm(E=E, J=J, R=R, Q=Q, B=B, P=P, S=S, N=N)
        if not validate_ph(form).passed:
            continue
        if is_regular(Pencil(E=form.E, A=(form.J - form.R) @ form.Q)).regular:
            return form
    raise RuntimeError("failed to generate a regular pH form")


def polynomial_input(rng, dim, degree=2, scale=0.15):
    """Random polynomial input with its exact jet at t = 0."""
    coeffs = scale * (rng.normal(size=(degree + 1, dim)) + 1j * rng.normal(size=(degree + 1, dim)))

    def u(t):
        return sum(c * t**k for k, c in enumerate(coeffs))

    fact = 1.0
    jets = []
    for j, c in enumerate(coeffs):
        if j > 0:
            fact *= j
        jets.append(fact * c)
    return u, InputJet(values=tuple(jets)), coeffs
