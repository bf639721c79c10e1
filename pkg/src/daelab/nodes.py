"""System nodes with inputs and outputs built on a regular pencil.

A node packages (E, A, B, C, D) for the system

    d/dt E x = A x + B u,      y = C x + D u.

In finite dimensions the node's domain is all of X x U, so the structural
content left from the operator-node axioms is the regularity of (E, A); it
is verified at construction.  Transfer functions may grow polynomially in
lambda (improper) for higher-index pencils; that is reported, not rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch
from .pencil import Pencil, require_regular


@dataclass(frozen=True)
class TransferEval:
    lam: complex
    G: np.ndarray


@dataclass(frozen=True)
class SystemNode:
    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        mats = {}
        for name in ("E", "A", "B", "C", "D"):
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.ndim != 2:
                raise DimensionMismatch(f"{name} must be a matrix, got shape {M.shape}")
            M.setflags(write=False)
            mats[name] = M
            object.__setattr__(self, name, M)
        m, n = mats["E"].shape
        if mats["A"].shape != (m, n):
            raise DimensionMismatch(f"A must match E's shape {(m, n)}, got {mats['A'].shape}")
        if m != n:
            raise DimensionMismatch(
                "system nodes require a square pencil: the resolvent set of a "
                f"rectangular pencil is empty (E is {m}x{n})"
            )
        if mats["B"].shape[0] != m:
            raise DimensionMismatch(f"B must have {m} rows, got {mats['B'].shape}")
        if mats["C"].shape[1] != n:
            raise DimensionMismatch(f"C must have {n} columns, got {mats['C'].shape}")
        y, u = mats["C"].shape[0], mats["B"].shape[1]
        if mats["D"].shape != (y, u):
            raise DimensionMismatch(f"D must be {y}x{u}, got {mats['D'].shape}")
        require_regular(self.pencil)

    @cached_property
    def pencil(self) -> Pencil:
        return Pencil(E=self.E, A=self.A)

    @property
    def state_dim(self) -> int:
        return self.E.shape[1]

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]

    @property
    def output_dim(self) -> int:
        return self.C.shape[0]

    def output(self, x, u) -> np.ndarray:
        return self.C @ np.asarray(x, dtype=complex) + self.D @ np.asarray(u, dtype=complex)


def transfer(node: SystemNode, lam) -> TransferEval:
    """G(lambda) = C (lambda E - A)^{-1} B + D."""
    R = node.pencil.resolvent(lam)
    return TransferEval(lam=complex(lam), G=node.C @ R @ node.B + node.D)


def transfer_identity_residual(node: SystemNode, lam, rho) -> float:
    """Defect of the resolvent-difference identity for the transfer function.

    Measures || G(rho) - G(lambda) - (lambda - rho) C R(rho) E R(lambda) B ||,
    which vanishes identically in exact arithmetic.
    """
    G_lam = transfer(node, lam).G
    G_rho = transfer(node, rho).G
    R_rho = node.pencil.resolvent(rho)
    R_lam = node.pencil.resolvent(lam)
    cross = (complex(lam) - complex(rho)) * node.C @ R_rho @ node.E @ R_lam @ node.B
    return float(np.linalg.norm(G_rho - G_lam - cross, 2))


def f_lambda(node: SystemNode, lam, direction: str = "forward") -> np.ndarray:
    """Block transformation [[I, -(lambda E - A)^{-1} B], [0, I]] or its inverse.

    The forward map straightens the node's coupled domain into a product;
    forward and inverse compose to the identity exactly up to round-off.
    """
    n, u = node.state_dim, node.input_dim
    R_B = node.pencil.resolvent(lam) @ node.B
    out = np.eye(n + u, dtype=complex)
    if direction == "forward":
        out[:n, n:] = -R_B
    elif direction == "inverse":
        out[:n, n:] = R_B
    else:
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    return out


def output_split_residual(node: SystemNode, x, u, lam) -> float:
    """Defect of the output splitting C x + D u = C [x - R(lambda) B u] + G(lambda) u."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    u = np.asarray(u, dtype=complex).reshape(-1)
    direct = node.output(x, u)
    R_B = node.pencil.resolvent(lam) @ node.B
    split = node.C @ (x - R_B @ u) + transfer(node, lam).G @ u
    return float(np.linalg.norm(direct - split))


def adjoint_node(node: SystemNode, lam) -> SystemNode:
    """The adjoint node, materialized at a construction point lambda.

    Realizes the dual splitting [A_adj B_adj] = [A^H C^H] together with the
    dual output map y -> B^H (z - (lambda E - A)^{-H} C^H y) + G(lambda)^H y;
    the feedthrough block is materialized by evaluating that map on a basis.
    The resulting transfer function satisfies G_adj(mu) = G(conj(mu))^H for
    every mu, independently of the lambda used here.
    """
    lam = complex(lam)
    R = node.pencil.resolvent(lam)  # raises if conj(lam) is not in rho(E^H, A^H)
    G_lam = transfer(node, lam).G
    BH = node.B.conj().T
    CH = node.C.conj().T
    # dual feedthrough on the standard basis of the y-input space
    D_adj = G_lam.conj().T - BH @ R.conj().T @ CH
    return SystemNode(
        E=node.E.conj().T,
        A=node.A.conj().T,
        B=CH,
        C=BH,
        D=D_adj,
    )
