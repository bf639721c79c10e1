"""Port-Hamiltonian structure: validation, energy bookkeeping, index audits.

The canonical data are eight matrices (E, J, R, Q, B, P, S, N) describing

    d/dt E x = (J - R) Q x + (B - P) u,
    y        = (B^H + P^H) Q x + (S - N) u,

with J, N skew-adjoint and E^H Q, W = [[R, P], [P^H, S]] positive
semidefinite.  The Hamiltonian H(x) = Re <Ex, Qx> / 2 then obeys the
dissipation inequality along trajectories, and the resolvent indices of the
pencil (E, (J - R) Q) are bounded (complex <= 3, real <= 2) whenever Q is
invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, QSingular, ValidationFailed
from .indices import IndexReport, algebraic_index, check_index_bound, fit_resolvent_index, REAL_RAY, VERTICAL_LINE
from .nodes import SystemNode
from .pencil import Pencil
from .simulate import Trajectory, _cumulative_trapezoid

PSD_TOL = 1e-10
SKEW_TOL = 1e-10
Q_CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class PHForm:
    E: np.ndarray
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    P: np.ndarray
    S: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        for name in ("E", "J", "R", "Q", "B", "P", "S", "N"):
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.ndim != 2:
                raise DimensionMismatch(f"{name} must be a matrix")
            M.setflags(write=False)
            object.__setattr__(self, name, M)
        n = self.E.shape[0]
        if self.E.shape != (n, n):
            raise DimensionMismatch("E must be square")
        for name in ("J", "R", "Q"):
            if getattr(self, name).shape != (n, n):
                raise DimensionMismatch(f"{name} must be {n}x{n}")
        u = self.B.shape[1]
        if self.B.shape != (n, u) or self.P.shape != (n, u):
            raise DimensionMismatch(f"B and P must be {n}x{u}")
        for name in ("S", "N"):
            if getattr(self, name).shape != (u, u):
                raise DimensionMismatch(f"{name} must be {u}x{u}")

    @property
    def state_dim(self) -> int:
        return self.E.shape[0]

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]

    @property
    def dissipation_block(self) -> np.ndarray:
        """W = [[R, P], [P^H, S]], the joint resistive structure."""
        return np.block([[self.R, self.P], [self.P.conj().T, self.S]])


@dataclass(frozen=True)
class StructureCheck:
    name: str
    passed: bool
    violation: float
    tolerance: float


@dataclass(frozen=True)
class PHValidationReport:
    checks: tuple[StructureCheck, ...]
    passed: bool

    def check(self, name: str) -> StructureCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "violation": c.violation, "tolerance": c.tolerance}
                for c in self.checks
            ],
        }


def _skew_check(name, M):
    tol = SKEW_TOL * max(1.0, np.linalg.norm(M, 2))
    violation = float(np.linalg.norm(M + M.conj().T, 2))
    return StructureCheck(name=name, passed=violation <= tol, violation=violation, tolerance=tol)


def _psd_check(name, M):
    scale = max(1.0, np.linalg.norm(M, 2))
    herm_violation = float(np.linalg.norm(M - M.conj().T, 2))
    if herm_violation > PSD_TOL * scale:
        return StructureCheck(name=name, passed=False, violation=herm_violation, tolerance=PSD_TOL * scale)
    eigmin = float(np.min(np.linalg.eigvalsh(0.5 * (M + M.conj().T)))) if M.size else 0.0
    violation = max(0.0, -eigmin)
    return StructureCheck(name=name, passed=eigmin >= -PSD_TOL * scale, violation=violation, tolerance=PSD_TOL * scale)


def validate_ph(form: PHForm) -> PHValidationReport:
    """Check skew-adjointness of J, N and positive semidefiniteness of E^H Q and W.

    Smallest-eigenvalue thresholding (rather than Cholesky) tolerates data
    sitting on the PSD boundary, which pH forms routinely do.
    """
    checks = (
        _skew_check("J_skew_adjoint", form.J),
        _skew_check("N_skew_adjoint", form.N),
        _psd_check("EhQ_positive_semidefinite", form.E.conj().T @ form.Q),
        _psd_check("W_positive_semidefinite", form.dissipation_block),
    )
    return PHValidationReport(checks=checks, passed=all(c.passed for c in checks))


def hamiltonian(form: PHForm, x) -> float:
    """H(x) = Re <Ex, Qx> / 2 (real by E^H Q Hermitian; Re makes it total)."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    return 0.5 * float(np.real(np.vdot(form.E @ x, form.Q @ x)))


def to_node(form: PHForm) -> SystemNode:
    """Compose the system node (E, (J-R)Q, B-P, (B^H+P^H)Q, S-N)."""
    report = validate_ph(form)
    if not report.passed:
        failing = [c.name for c in report.checks if not c.passed]
        raise ValidationFailed(f"pH structure checks failed: {', '.join(failing)}", report=report)
    return SystemNode(
        E=form.E,
        A=(form.J - form.R) @ form.Q,
        B=form.B - form.P,
        C=(form.B.conj().T + form.P.conj().T) @ form.Q,
        D=form.S - form.N,
    )


@dataclass(frozen=True)
class EnergyLedger:
    times: np.ndarray
    hamiltonian: np.ndarray
    supplied_power: np.ndarray      # Re <u_k, y_k>
    cumulative_supply: np.ndarray   # trapezoid integral of the supplied power
    tolerance: np.ndarray           # per-step slack covering integrator error

    def to_rows(self):
        return zip(self.times, self.hamiltonian, self.supplied_power, self.cumulative_supply)


def dissipation_check(form: PHForm, traj: Trajectory, c: float = 10.0):
    """Verify H(x(t)) - H(x(0)) <= Re int <u, y> + tol at every grid point.

    The slack tol = c*h*(1 + max ||x||^2) covers quadrature and integrator
    error; the paper's inequality is exact only for exact trajectories.
    Returns (ledger, passed).
    """
    H = np.array([hamiltonian(form, x) for x in traj.states])
    power = np.real(np.einsum("ki,ki->k", np.conj(traj.inputs), traj.outputs))
    supply = _cumulative_trapezoid(power[:, None], traj.step)[:, 0]
    xmax = float(np.max(np.linalg.norm(traj.states, axis=1))) if len(traj.states) else 0.0
    tol = c * traj.step * (1.0 + xmax**2) * np.ones_like(H)
    ledger = EnergyLedger(
        times=traj.times,
        hamiltonian=H,
        supplied_power=power,
        cumulative_supply=supply,
        tolerance=tol,
    )
    passed = bool(np.all(H - H[0] <= supply + tol))
    return ledger, passed


def reduce_q_invertible(form: PHForm) -> PHForm:
    """Equivalent form in the co-energy variable z = Qx (Q-part becomes I).

    The pencil becomes (E Q^{-1}, J - R); transfer functions and algebraic
    indices are preserved exactly.  Requires cond(Q) < 1e10.
    """
    cond = np.linalg.cond(form.Q)
    if not np.isfinite(cond) or cond >= Q_CONDITION_LIMIT:
        raise QSingular(f"Q is too ill-conditioned to invert (cond {cond:.3e})")
    Qinv = np.linalg.inv(form.Q)
    return PHForm(
        E=form.E @ Qinv,
        J=form.J,
        R=form.R,
        Q=np.eye(form.state_dim, dtype=complex),
        B=form.B,
        P=form.P,
        S=form.S,
        N=form.N,
    )


@dataclass(frozen=True)
class PHIndexAudit:
    real_report: IndexReport
    complex_report: IndexReport
    algebraic: int
    q_invertible: bool
    structure_ok: bool
    complex_bound: int
    real_bound: int
    violation: bool

    def to_dict(self):
        return {
            "algebraic_index": self.algebraic,
            "q_invertible": self.q_invertible,
            "structure_ok": self.structure_ok,
            "complex_bound": self.complex_bound,
            "real_bound": self.real_bound,
            "violation": self.violation,
            "real": self.real_report.to_dict(),
            "complex": self.complex_report.to_dict(),
        }


def ph_index_audit(form: PHForm, window=(1e2, 1e6), count=12) -> PHIndexAudit:
    """Fit real and complex resolvent indices and compare to the pH bounds.

    A violation is flagged only when the theorem's hypotheses hold (Q
    invertible, structure checks pass) and a fitted or algebraic index
    exceeds its bound: complex <= 3, real <= 2.
    """
    node = to_node(form)
    pencil = node.pencil
    alg = algebraic_index(pencil)
    real_report = fit_resolvent_index(pencil, ray=REAL_RAY, window=window, count=count, with_algebraic=True)
    complex_report = fit_resolvent_index(pencil, ray=VERTICAL_LINE, window=window, count=count, with_algebraic=True)
    q_cond = np.linalg.cond(form.Q)
    q_ok = bool(np.isfinite(q_cond) and q_cond < Q_CONDITION_LIMIT)
    structure_ok = validate_ph(form).passed
    bounds_hold = check_index_bound(complex_report, 3) and check_index_bound(real_report, 2)
    return PHIndexAudit(
        real_report=real_report,
        complex_report=complex_report,
        algebraic=alg,
        q_invertible=q_ok,
        structure_ok=structure_ok,
        complex_bound=3,
        real_bound=2,
        violation=bool(q_ok and structure_ok and not bounds_hold),
    )
