"""Command-line front end tying the analysis modules together.

Every command writes a JSON report embedding the tool version, the seed, a
digest of its inputs, and the verbatim tolerances used, so acceptance runs
are auditable and reproducible.  Exit codes: 0 pass, 2 check failure,
1 error (with a machine-readable code in the report).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from . import jsonio
from .consistency import InputJet, consistent_membership
from .errors import DaelabError, NotRegular
from .indices import REAL_RAY, VERTICAL_LINE, algebraic_index, fit_resolvent_index
from .nodes import transfer
from .pde import preset, discretize, lower_bound_witness, regime_index_experiment
from .pencil import SINGULAR_CONDITION, Pencil, _decide_regularity
from .ph import dissipation_check, ph_index_audit, to_node, validate_ph
from .simulate import certify, integrate
from .subspaces import augmented_wong_sequence, wong_sequence

RAY_NAMES = {"real": REAL_RAY, "vertical": VERTICAL_LINE}


def _digest(paths):
    h = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def _parse_window(text):
    try:
        lo, hi = (float(part) for part in text.split(","))
        return lo, hi
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'min,max', got {text!r}")


def _parse_complex(text):
    try:
        re, im = (float(part) for part in text.split(","))
        return complex(re, im)
    except ValueError:
        raise argparse.ArgumentTypeError(f"complex values are 're,im', got {text!r}")


def _poly_input(spec, dim):
    """Polynomial input u(t) = sum_k c_k t^k from {'coeffs': [vector, ...]}."""
    coeffs = [jsonio.vector_from_json(c, "input coefficient") for c in spec.get("coeffs", [])]
    for c in coeffs:
        if c.shape != (dim,):
            raise jsonio.ParseError(f"input coefficients must have dimension {dim}")
    if not coeffs:
        coeffs = [np.zeros(dim, dtype=complex)]

    def u(t):
        return sum(c * t**k for k, c in enumerate(coeffs))

    # analytic jet: u^(j)(0) = j! * c_j
    fact = 1.0
    jet = []
    for j, c in enumerate(coeffs):
        if j > 0:
            fact *= j
        jet.append(fact * c)
    return u, InputJet(values=tuple(jet))


def _emit(report, out_path):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _envelope(command, args, inputs, tolerances, results):
    return {
        "tool": "daelab",
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "inputs_digest": _digest(inputs),
        "tolerances": tolerances,
        "results": results,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }


def cmd_analyze(args):
    pencil = jsonio.pencil_from_json(jsonio.load_json(args.pencil))
    rng = np.random.default_rng(args.seed)
    witness = _decide_regularity(pencil, rng=rng)
    results = {
        "shape": list(pencil.shape),
        "regular": witness.regular,
        "witness": [witness.witness.real, witness.witness.imag] if witness.witness is not None else None,
        "witness_condition": witness.condition if np.isfinite(witness.condition) else None,
    }
    if not witness.regular:
        raise NotRegular("pencil is singular: det(lambda E - A) vanishes at all sampled points")
    results["algebraic_index"] = algebraic_index(pencil)
    report = _envelope("analyze", args, [args.pencil], {"singular_condition": SINGULAR_CONDITION}, results)
    _emit(report, args.out)
    return 0


def cmd_index(args):
    pencil = jsonio.pencil_from_json(jsonio.load_json(args.pencil))
    report_obj = fit_resolvent_index(
        pencil,
        ray=RAY_NAMES[args.ray],
        omega=args.omega,
        window=args.window,
        count=args.count,
        with_algebraic=True,
    )
    if args.csv:
        jsonio.write_index_samples_csv(args.csv, report_obj.samples)
    report = _envelope("index", args, [args.pencil], {"singular_condition": SINGULAR_CONDITION}, report_obj.to_dict())
    _emit(report, args.out)
    return 0


def cmd_wong(args):
    obj = jsonio.load_json(args.pencil)
    pencil = jsonio.pencil_from_json(obj)
    if args.augmented:
        chain = augmented_wong_sequence(pencil.E, pencil.A)
    else:
        chain = wong_sequence(pencil)
    results = {
        "augmented": args.augmented,
        "dims": list(chain.dims),
        "stabilized_at": chain.stabilized_at,
        "limit": jsonio.subspace_to_json(chain.limit),
    }
    report = _envelope("wong", args, [args.pencil], {}, results)
    _emit(report, args.out)
    return 0


def cmd_init(args):
    obj = jsonio.load_json(args.input)
    pencil = jsonio.pencil_from_json(obj.get("pencil", obj))
    x0 = jsonio.vector_from_json(obj["x0"], "x0")
    jet = InputJet(values=tuple(jsonio.vector_from_json(v, "jet value") for v in obj.get("jet", [])))
    feasible, cert = consistent_membership(pencil.E, pencil.A, x0, jet, p=args.p)
    results = {"certificate": cert.to_dict()}
    from .consistency import FEASIBILITY_TOL

    report = _envelope("init", args, [args.input], {"feasibility_tol": FEASIBILITY_TOL}, results)
    _emit(report, args.out)
    return 0 if feasible else 2


def cmd_simulate(args):
    node = jsonio.node_from_json(jsonio.load_json(args.node))
    setup = jsonio.load_json(args.setup)
    x0 = jsonio.vector_from_json(setup["x0"], "x0")
    u, jet = _poly_input(setup.get("input", {}), node.input_dim)
    scheme = setup.get("scheme", args.scheme)
    h = float(setup.get("h", args.h))
    T = float(setup.get("T", args.T))
    traj = integrate(
        node,
        x0,
        u,
        T=T,
        h=h,
        scheme=scheme,
        input_jet=jet,
        on_inconsistent="project" if args.project else "raise",
    )
    cert = certify(node, traj)
    if args.csv:
        jsonio.write_trajectory_csv(args.csv, traj)
    results = {
        "scheme": traj.scheme,
        "step": traj.step,
        "n_steps": traj.n_steps,
        "certificate": cert.to_dict(),
    }
    from .consistency import FEASIBILITY_TOL

    report = _envelope(
        "simulate", args, [args.node, args.setup], {"feasibility_tol": FEASIBILITY_TOL}, results
    )
    _emit(report, args.out)
    return 0


def cmd_phcheck(args):
    form = jsonio.ph_form_from_json(jsonio.load_json(args.form))
    validation = validate_ph(form)
    results = {"validation": validation.to_dict()}
    ok = validation.passed
    tolerances = {"psd_tol": 1e-10, "skew_tol": 1e-10}
    if ok and not args.skip_index:
        audit = ph_index_audit(form)
        results["index_audit"] = audit.to_dict()
        ok = ok and not audit.violation
    if ok and args.simulate_T > 0:
        node = to_node(form)
        rng = np.random.default_rng(args.seed)
        x0 = rng.normal(size=node.state_dim)
        coeffs = rng.normal(size=(2, node.input_dim))

        def u(t):
            return coeffs[0] + coeffs[1] * t

        jet = InputJet(values=(coeffs[0].astype(complex), coeffs[1].astype(complex)))
        traj = integrate(node, x0, u, T=args.simulate_T, h=args.h, scheme="trapezoid",
                         input_jet=jet, on_inconsistent="project")
        ledger, passed = dissipation_check(form, traj)
        tolerances["dissipation_c"] = 10.0
        results["dissipation"] = {"passed": passed, "final_hamiltonian": float(ledger.hamiltonian[-1])}
        if args.csv:
            jsonio.write_ledger_csv(args.csv, ledger)
        ok = ok and passed
    report = _envelope("phcheck", args, [args.form], tolerances, results)
    _emit(report, args.out)
    return 0 if ok else 2


def cmd_example(args):
    cfg = preset(args.regime, args.n)
    experiment = regime_index_experiment(cfg, window=args.window)
    results = experiment.to_dict()
    if args.regime == "diffusion":
        samples = lower_bound_witness(cfg)
        norms = [s.norm for s in samples]
        results["lower_bound_witness"] = {
            "norms": norms,
            "max_over_min": max(norms) / min(norms),
        }
    if args.csv:
        jsonio.write_index_samples_csv(args.csv, experiment.vertical_report.samples)
    report = _envelope("example", args, [], {"singular_condition": SINGULAR_CONDITION}, results)
    _emit(report, args.out)
    return 0


def cmd_transfer(args):
    node = jsonio.node_from_json(jsonio.load_json(args.node))
    evals = [transfer(node, lam) for lam in args.lam]
    if args.csv:
        jsonio.write_transfer_csv(args.csv, evals)
    results = {
        "evaluations": [
            {"lambda": [ev.lam.real, ev.lam.imag], "G": jsonio.matrix_to_json(ev.G)} for ev in evals
        ]
    }
    report = _envelope("transfer", args, [args.node], {"singular_condition": SINGULAR_CONDITION}, results)
    _emit(report, args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="daelab", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks, recorded in reports")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="regularity, witness, and algebraic index of a pencil")
    p.add_argument("--pencil", required=True)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("index", help="fit the resolvent growth index along a ray")
    p.add_argument("--pencil", required=True)
    p.add_argument("--ray", choices=sorted(RAY_NAMES), default="real")
    p.add_argument("--window", type=_parse_window, default=(1e2, 1e6))
    p.add_argument("--count", type=int, default=12)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--csv", help="also export (|lambda|, norm) samples as CSV")
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("wong", help="Wong or augmented Wong subspace chain")
    p.add_argument("--pencil", required=True)
    p.add_argument("--augmented", action="store_true")
    p.set_defaults(fn=cmd_wong)

    p = sub.add_parser("init", help="consistency certificate for {pencil, x0, jet}")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=int, default=None, help="chain length (default: algebraic index + 1)")
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("simulate", help="integrate a node and certify the trajectory")
    p.add_argument("--node", required=True)
    p.add_argument("--setup", required=True, help="JSON with x0, input, T, h, scheme")
    p.add_argument("--scheme", choices=["implicit_euler", "trapezoid"], default="implicit_euler")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--project", action="store_true", help="project an inconsistent x0 instead of failing")
    p.add_argument("--csv", help="trajectory CSV path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("phcheck", help="validate pH structure, audit indices, check dissipation")
    p.add_argument("--form", required=True)
    p.add_argument("--skip-index", action="store_true")
    p.add_argument("--simulate-T", type=float, default=0.0, help="also run a dissipation check over [0, T]")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--csv", help="energy ledger CSV path")
    p.set_defaults(fn=cmd_phcheck)

    p = sub.add_parser("example", help="discretize the two-field example and fit its regime indices")
    p.add_argument("--regime", choices=["wave", "diffusion", "elliptic", "index2"], required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--window", type=_parse_window, default=None)
    p.add_argument("--csv", help="CSV of (|lambda|, norm) for the vertical fit")
    p.set_defaults(fn=cmd_example)

    p = sub.add_parser("transfer", help="evaluate the transfer function at given points")
    p.add_argument("--node", required=True)
    p.add_argument("--lambda", dest="lam", type=_parse_complex, action="append", required=True,
                   help="evaluation point as 're,im' (repeatable)")
    p.add_argument("--csv", help="CSV export of the sweep")
    p.set_defaults(fn=cmd_transfer)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DaelabError as exc:
        error_report = {
            "tool": "daelab",
            "version": __version__,
            "command": args.command,
            "error": {"code": exc.code, "message": str(exc)},
        }
        _emit(error_report, args.out)
        return 1


if __name__ == "__main__":
    sys.exit(main())
