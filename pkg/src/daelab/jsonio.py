"""JSON and CSV serialization for matrices, pencils, nodes, and reports.

Complex numbers are [re, im] pairs everywhere; no string forms.  Matrices
are {"rows": m, "cols": n, "data": [[re, im], ...]} with row-major data.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import ParseError
from .nodes import SystemNode
from .pencil import Pencil
from .ph import PHForm
from .subspaces import Subspace


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    m, n = M.shape
    flat = M.reshape(-1)
    return {"rows": m, "cols": n, "data": [[z.real, z.imag] for z in flat]}


def matrix_from_json(obj, name="matrix") -> np.ndarray:
    try:
        m, n = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{name}: expected {{rows, cols, data}}, got {type(obj).__name__}") from exc
    if len(data) != m * n:
        raise ParseError(f"{name}: data has {len(data)} entries, expected {m * n}")
    try:
        flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: entries must be [re, im] pairs") from exc
    return flat.reshape(m, n)


def vector_to_json(v) -> list:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return [[z.real, z.imag] for z in v]


def vector_from_json(obj, name="vector") -> np.ndarray:
    try:
        return np.array([complex(re, im) for re, im in obj], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: entries must be [re, im] pairs") from exc


def pencil_to_json(p: Pencil) -> dict:
    out = {"E": matrix_to_json(p.E), "A": matrix_to_json(p.A)}
    if p.state_weight is not None:
        out["state_weight"] = matrix_to_json(p.state_weight)
    if p.codomain_weight is not None:
        out["codomain_weight"] = matrix_to_json(p.codomain_weight)
    return out


def pencil_from_json(obj) -> Pencil:
    if not isinstance(obj, dict) or "E" not in obj or "A" not in obj:
        raise ParseError("pencil: expected an object with E and A matrices")
    return Pencil(
        E=matrix_from_json(obj["E"], "E"),
        A=matrix_from_json(obj["A"], "A"),
        state_weight=matrix_from_json(obj["state_weight"], "state_weight") if "state_weight" in obj else None,
        codomain_weight=matrix_from_json(obj["codomain_weight"], "codomain_weight") if "codomain_weight" in obj else None,
    )


def node_to_json(n: SystemNode) -> dict:
    return {name: matrix_to_json(getattr(n, name)) for name in ("E", "A", "B", "C", "D")}


def node_from_json(obj) -> SystemNode:
    missing = [k for k in ("E", "A", "B", "C", "D") if not isinstance(obj, dict) or k not in obj]
    if missing:
        raise ParseError(f"node: missing matrices {missing}")
    return SystemNode(**{k: matrix_from_json(obj[k], k) for k in ("E", "A", "B", "C", "D")})


def subspace_to_json(S: Subspace) -> dict:
    return {"ambient": S.ambient_dim, "basis": matrix_to_json(S.basis)}


def subspace_from_json(obj) -> Subspace:
    if not isinstance(obj, dict) or "basis" not in obj:
        raise ParseError("subspace: expected an object with a basis matrix")
    return Subspace(basis=matrix_from_json(obj["basis"], "basis"))


def ph_form_to_json(f: PHForm) -> dict:
    return {name: matrix_to_json(getattr(f, name)) for name in ("E", "J", "R", "Q", "B", "P", "S", "N")}


def ph_form_from_json(obj) -> PHForm:
    names = ("E", "J", "R", "Q", "B", "P", "S", "N")
    missing = [k for k in names if not isinstance(obj, dict) or k not in obj]
    if missing:
        raise ParseError(f"pH form: missing matrices {missing}")
    return PHForm(**{k: matrix_from_json(obj[k], k) for k in names})


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_index_samples_csv(path, samples):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["abs_lambda", "re_lambda", "im_lambda", "norm", "condition"])
        for s in samples:
            writer.writerow([abs(s.lam), s.lam.real, s.lam.imag, s.norm, s.condition])


def write_trajectory_csv(path, traj):
    n = traj.states.shape[1]
    u = traj.inputs.shape[1]
    y = traj.outputs.shape[1]
    header = (
        ["t"]
        + [f"{kind}{i}_{part}" for kind, count in (("x", n), ("u", u), ("y", y)) for i in range(count) for part in ("re", "im")]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, t in enumerate(traj.times):
            row = [t]
            for block in (traj.states[k], traj.inputs[k], traj.outputs[k]):
                for z in block:
                    row.extend([z.real, z.imag])
            writer.writerow(row)


def write_ledger_csv(path, ledger):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "hamiltonian", "supplied_power", "cumulative_supply"])
        for row in ledger.to_rows():
            writer.writerow(list(row))


def write_transfer_csv(path, evals):
    if not evals:
        raise ValueError("no transfer evaluations to write")
    y, u = evals[0].G.shape
    header = ["re_lambda", "im_lambda"] + [
        f"G{i}{j}_{part}" for i in range(y) for j in range(u) for part in ("re", "im")
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for ev in evals:
            row = [ev.lam.real, ev.lam.imag]
            for z in ev.G.reshape(-1):
                row.extend([z.real, z.imag])
            writer.writerow(row)
