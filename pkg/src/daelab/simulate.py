"""Implicit time integration of d/dt(Ex) = Ax + Bu and residual certificates.

Only implicit one-step schemes are offered: explicit schemes cannot enforce
the algebraic constraints of a singular E at the new time level.  Residuals
certify a computed trajectory against the classical (pointwise), mild
(integrated), and weak (tested) solution concepts; they do not assume the
trajectory came from our own integrator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .consistency import InputJet, consistent_membership, consistent_projection, default_chain_length
from .errors import InconsistentInitialValue, NotInResolventSet, NotRegular
from .nodes import SystemNode
from .pencil import Pencil

IMPLICIT_EULER = "implicit_euler"
TRAPEZOID = "trapezoid"
SCHEMES = (IMPLICIT_EULER, TRAPEZOID)


@dataclass(frozen=True)
class Trajectory:
    """Samples of (x, u, y) on a uniform grid, plus scheme metadata.

    Outputs are computed pointwise from the node's output equation, never
    integrated, so y_k = C x_k + D u_k holds exactly by construction.
    """

    times: np.ndarray
    states: np.ndarray    # (N+1, n)
    inputs: np.ndarray    # (N+1, u)
    outputs: np.ndarray   # (N+1, y)
    scheme: str
    step: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("times must contain at least two grid points")
        dt = np.diff(t)
        if np.any(dt <= 0) or np.max(np.abs(dt - self.step)) > 1e-9 * max(self.step, 1.0):
            raise ValueError("times must be strictly increasing with uniform step h")
        for name in ("times", "states", "inputs", "outputs"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class SolutionCertificate:
    classical_residual: float
    mild_residual: float
    weak_residual: float
    classical_per_step: np.ndarray
    mild_per_step: np.ndarray
    weak_per_step: np.ndarray

    def to_dict(self):
        return {
            "classical_residual": self.classical_residual,
            "mild_residual": self.mild_residual,
            "weak_residual": self.weak_residual,
        }


def _sample_input(u, times, dim):
    if u is None:
        return np.zeros((len(times), dim), dtype=complex)
    vals = np.empty((len(times), dim), dtype=complex)
    for k, t in enumerate(times):
        vals[k] = np.asarray(u(t), dtype=complex).reshape(-1)
    return vals


def _step_matrix(node, h, scheme):
    """LU-factored implicit step operator, retrying a perturbed h when singular."""
    import scipy.linalg

    coeff = h if scheme == IMPLICIT_EULER else 0.5 * h
    for attempt in range(4):
        h_try = h * (1.0 + attempt * 1e-6)
        c_try = coeff * (1.0 + attempt * 1e-6)
        M = node.E - c_try * node.A
        cond = np.linalg.cond(M)
        if np.isfinite(cond) and cond < 1e12:
            return h_try, scipy.linalg.lu_factor(M)
    raise NotRegular(f"E - h*A is numerically singular for h near {h}")


def integrate(
    node: SystemNode,
    x0,
    u,
    T: float,
    h: float,
    scheme: str = IMPLICIT_EULER,
    input_jet: InputJet | None = None,
    on_inconsistent: str = "raise",
) -> Trajectory:
    """March d/dt(Ex) = Ax + Bu from a consistent x0 over [0, T].

    implicit_euler solves (E - hA) x_{k+1} = E x_k + h B u_{k+1}; trapezoid
    uses the symmetric variant.  The input is a callable sampled at grid
    points; its jet at t=0 must be supplied explicitly for the consistency
    precondition (numerical differentiation would poison the decision).
    on_inconsistent: 'raise' (default), 'warn', or 'project' (replace x0 by
    its minimum-norm consistent correction).
    """
    import scipy.linalg

    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if on_inconsistent not in ("raise", "warn", "project"):
        raise ValueError(f"on_inconsistent must be raise/warn/project, got {on_inconsistent!r}")
    x0 = np.asarray(x0, dtype=complex).reshape(-1)
    if x0.shape[0] != node.state_dim:
        raise InconsistentInitialValue(f"x0 has length {x0.shape[0]}, state dimension is {node.state_dim}")

    p = default_chain_length(node.E, node.A)
    if input_jet is None:
        input_jet = InputJet.zero(p, node.input_dim)
    f_jet = input_jet.padded(p).mapped(node.B)
    feasible, cert = consistent_membership(node.E, node.A, x0, f_jet, p)
    if not feasible:
        if on_inconsistent == "raise":
            raise InconsistentInitialValue(
                f"x0 is not consistent (first failing chain level {cert.first_infeasible_level})",
                certificate=cert,
            )
        if on_inconsistent == "warn":
            warnings.warn("integrating from an inconsistent initial value", stacklevel=2)
        else:
            x0 = consistent_projection(node.E, node.A, x0, f_jet, p)

    h_eff, lu = _step_matrix(node, h, scheme)
    n_steps = int(round(T / h_eff))
    times = np.arange(n_steps + 1) * h_eff
    inputs = _sample_input(u, times, node.input_dim)

    states = np.empty((n_steps + 1, node.state_dim), dtype=complex)
    states[0] = x0
    if scheme == IMPLICIT_EULER:
        for k in range(n_steps):
            rhs = node.E @ states[k] + h_eff * (node.B @ inputs[k + 1])
            states[k + 1] = scipy.linalg.lu_solve(lu, rhs)
    else:
        Eplus = node.E + 0.5 * h_eff * node.A
        for k in range(n_steps):
            rhs = Eplus @ states[k] + 0.5 * h_eff * (node.B @ (inputs[k] + inputs[k + 1]))
            states[k + 1] = scipy.linalg.lu_solve(lu, rhs)

    outputs = states @ node.C.T + inputs @ node.D.T
    return Trajectory(times=times, states=states, inputs=inputs, outputs=outputs, scheme=scheme, step=h_eff)


def _forcing(node, traj):
    return traj.states @ node.A.T + traj.inputs @ node.B.T


def classical_residual(node: SystemNode, traj: Trajectory) -> float:
    return float(np.max(classical_residual_per_step(node, traj)))


def classical_residual_per_step(node: SystemNode, traj: Trajectory) -> np.ndarray:
    """Central-difference defect of d/dt(Ex) = Ax + Bu at interior points.

    Normalized per point by 1 + ||A x_k + B u_k||; order h for implicit
    Euler trajectories, order h^2 for trapezoid ones on smooth data.
    """
    h = traj.step
    Ex = traj.states @ node.E.T
    rhs = _forcing(node, traj)
    ddt = (Ex[2:] - Ex[:-2]) / (2.0 * h)
    defect = ddt - rhs[1:-1]
    scale = 1.0 + np.linalg.norm(rhs[1:-1], axis=1)
    return np.linalg.norm(defect, axis=1) / scale


def _cumulative_trapezoid(values, h):
    """Cumulative trapezoid quadrature along axis 0, starting at zero."""
    out = np.zeros_like(values)
    if len(values) > 1:
        panels = 0.5 * h * (values[1:] + values[:-1])
        out[1:] = np.cumsum(panels, axis=0)
    return out


def mild_residual(node: SystemNode, traj: Trajectory) -> float:
    return float(np.max(mild_residual_per_step(node, traj)))


def mild_residual_per_step(node: SystemNode, traj: Trajectory) -> np.ndarray:
    """Defect of the integrated equation Ex(t) - Ex(0) = A int x + int Bu.

    Quadratures are cumulative trapezoid sums on the trajectory grid; the
    defect is normalized by 1 + ||A int x + int Bu|| per point.
    """
    h = traj.step
    Ex = traj.states @ node.E.T
    Qx = _cumulative_trapezoid(traj.states, h)
    Qbu = _cumulative_trapezoid(traj.inputs @ node.B.T, h)
    integral = Qx @ node.A.T + Qbu
    defect = Ex - Ex[0] - integral
    scale = 1.0 + np.linalg.norm(integral, axis=1)
    return np.linalg.norm(defect, axis=1) / scale


def weak_residual(node: SystemNode, traj: Trajectory, test_vectors=None) -> float:
    return float(np.max(weak_residual_per_step(node, traj, test_vectors)))


def weak_residual_per_step(node: SystemNode, traj: Trajectory, test_vectors=None) -> np.ndarray:
    """Tested defect |d/dt<Ex, z> - <x, A^H z> - <Bu, z>| over test vectors.

    Defaults to the canonical basis of the codomain, in which case this is
    the componentwise counterpart of the classical residual.
    """
    m = node.E.shape[0]
    if test_vectors is None:
        Z = np.eye(m, dtype=complex)
    else:
        Z = np.column_stack([np.asarray(z, dtype=complex).reshape(-1) for z in test_vectors])
    h = traj.step
    Ex_z = traj.states @ node.E.T @ np.conj(Z)        # <E x_k, z>
    rhs_z = _forcing(node, traj) @ np.conj(Z)         # <A x_k + B u_k, z>
    ddt = (Ex_z[2:] - Ex_z[:-2]) / (2.0 * h)
    defect = np.abs(ddt - rhs_z[1:-1])
    scale = 1.0 + np.abs(rhs_z[1:-1])
    return np.max(defect / scale, axis=1)


def certify(node: SystemNode, traj: Trajectory, test_vectors=None) -> SolutionCertificate:
    cls = classical_residual_per_step(node, traj)
    mld = mild_residual_per_step(node, traj)
    wk = weak_residual_per_step(node, traj, test_vectors)
    return SolutionCertificate(
        classical_residual=float(np.max(cls)),
        mild_residual=float(np.max(mld)),
        weak_residual=float(np.max(wk)),
        classical_per_step=cls,
        mild_per_step=mld,
        weak_per_step=wk,
    )


def pseudo_resolvent_transform(node: SystemNode, traj: Trajectory, lam):
    """Transform a trajectory to w = (lambda E - A) x and its companion system.

    w solves d/dt R_l(lambda) w = (lambda R_l(lambda) - I) w + Bu with the
    left resolvent R_l = E (lambda E - A)^{-1}; the returned node carries
    that pencil (with a zero output map) so the mild residual of the
    transformed trajectory can be certified directly.
    """
    lam = complex(lam)
    pencil = node.pencil
    M = lam * node.E - node.A
    R_l = pencil.left_resolvent(lam)
    w = traj.states @ M.T
    node_w = SystemNode(
        E=R_l,
        A=lam * R_l - np.eye(R_l.shape[0], dtype=complex),
        B=node.B,
        C=np.zeros((node.output_dim, R_l.shape[1]), dtype=complex),
        D=np.zeros((node.output_dim, node.input_dim), dtype=complex),
    )
    outputs = w @ node_w.C.T + traj.inputs @ node_w.D.T
    traj_w = Trajectory(
        times=traj.times,
        states=w,
        inputs=traj.inputs,
        outputs=outputs,
        scheme=traj.scheme,
        step=traj.step,
    )
    return traj_w, node_w
