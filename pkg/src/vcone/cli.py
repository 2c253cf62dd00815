"""Command-line front end.

Subcommands: geometry, lemma-bound, quantum-opt, demo, check. Every command
writes its machine-readable JSON artifact (and CSV for sweeps) into --out
before printing a human summary. Defaults can be overridden by VCONE_*
environment variables (VCONE_SEED, VCONE_RESTARTS, VCONE_R, VCONE_OUT,
VCONE_RATIONAL, VCONE_JOBS); explicit flags win over the environment.

Exit codes: 0 success/pass, 1 check failed, 2 usage or input error,
3 internal error.
"""
import argparse
import json
import os
import sys

import numpy as np

from .behavior import (behavior_from_json, behavior_to_json, evaluate_bell,
                       expression_from_json, is_no_signalling)
from .errors import InternalInconsistencyError, InvalidInputError
from .expressions import hidden_influence_s
from .lp import result_to_json
from .polytope import conditional_locality_check, lemma_polytope_max
from .quantum import behavior_from_quantum, seesaw_maximize, setup_to_json
from .spacetime import (broadcast_meeting_events, canonical_geometry,
                        effective_speed, geometry_to_json, matches, ordering)
from .vmodel import demo_report_to_json, signalling_demo

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _env(name, cast, default):
    raw = os.environ.get("VCONE_" + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise InvalidInputError(f"bad VCONE_{name} value {raw!r}")


def _env_flag(name):
    return os.environ.get("VCONE_" + name, "").lower() in ("1", "true", "yes")


def _write(out_dir, name, payload):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        if name.endswith(".json"):
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        else:
            fh.write(payload)
    return path


def _load_expression(path):
    if path is None:
        return hidden_influence_s()
    with open(path) as fh:
        return expression_from_json(json.load(fh))


def _parse_sweep(spec):
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise InvalidInputError(f"--sweep expects lo:hi:n, got {spec!r}")
    if not (lo > 1 and hi >= lo and n >= 1):
        raise InvalidInputError(f"--sweep needs 1 < lo <= hi and n >= 1, got {spec!r}")
    return np.linspace(lo, hi, n)


def cmd_geometry(args):
    g = canonical_geometry(args.r)
    d_prime, a_prime = broadcast_meeting_events(g)
    doc = geometry_to_json(g)
    doc["ordering"] = {f"{a},{b}": rel.symbol for (a, b), rel in ordering(g).items()}
    doc["matches_A<D<(B~C)"] = matches(g, "A<D<(B~C)")
    doc["meeting_points"] = {
        "d_prime": {"position": float(d_prime.position), "time": float(d_prime.time)},
        "a_prime": {"position": float(a_prime.position), "time": float(a_prime.time)},
    }
    doc["effective_speeds"] = {
        "A_to_d_prime": effective_speed(g.event("A"), d_prime),
        "D_to_a_prime": effective_speed(g.event("D"), a_prime),
    }
    path = _write(args.out, "geometry.json", doc)
    if args.sweep:
        rows = ["r,speed_A_to_d_prime,speed_D_to_a_prime,matches_pattern"]
        for r in _parse_sweep(args.sweep):
            gr = canonical_geometry(float(r))
            dp, ap = broadcast_meeting_events(gr)
            rows.append("%.12g,%.12g,%.12g,%d" % (
                r, effective_speed(gr.event("A"), dp),
                effective_speed(gr.event("D"), ap),
                matches(gr, "A<D<(B~C)")))
        csv_path = _write(args.out, "geometry_sweep.csv", "\n".join(rows) + "\n")
        print(f"wrote {csv_path}")
    print(f"wrote {path}")
    print(f"r={args.r}: ordering A<D<(B~C)={doc['matches_A<D<(B~C)']}, "
          f"speed A->D' = {doc['effective_speeds']['A_to_d_prime']:.6f} c")
    return EXIT_OK


def cmd_lemma_bound(args):
    e = _load_expression(args.expr)
    res = lemma_polytope_max(e, rational=args.rational)
    doc = {
        "expression": e.name or "custom",
        "value": res.value,
        "dual_bound": res.dual_bound,
        "rational": args.rational,
        "dual_certificate": res.duals.tolist(),
        "lp": result_to_json(res.lp),
    }
    if res.exact_value is not None:
        doc["exact_value"] = str(res.exact_value)
    path = _write(args.out, "lemma_bound.json", doc)
    print(f"wrote {path}")
    if args.rational:
        print(f"maximum over the constrained set: {res.exact_value} (exact)")
    else:
        print(f"maximum over the constrained set: {res.value:.9f}")
    return EXIT_OK


def cmd_quantum_opt(args):
    if args.restarts < 1:
        raise InvalidInputError(f"--restarts must be >= 1, got {args.restarts}")
    e = _load_expression(args.expr)
    res = seesaw_maximize(e, restarts=args.restarts, seed=args.seed)
    b = behavior_from_quantum(res.setup)
    doc = {
        "expression": e.name or "custom",
        "value": res.value,
        "behavior_value": evaluate_bell(e, b),
        "restarts": res.restarts_used,
        "seed": args.seed,
        "converged": res.converged,
        "setup": setup_to_json(res.setup),
        "behavior": behavior_to_json(b),
        "iterations_per_restart": [len(t) for t in res.trace],
    }
    path = _write(args.out, "quantum_opt.json", doc)
    print(f"wrote {path}")
    print(f"best see-saw value over {args.restarts} restarts: {res.value:.9f}")
    return EXIT_OK


def cmd_demo(args):
    target = None
    if args.target:
        with open(args.target) as fh:
            target = behavior_from_json(json.load(fh))
    rep = signalling_demo(args.r, q_behavior=target)
    doc = demo_report_to_json(rep)
    path = _write(args.out, "demo_report.json", doc)
    print(f"wrote {path}")
    for step in rep.steps:
        print(f"  [{'PASS' if step.passed else 'FAIL'}] {step.name}")
    if rep.forced:
        print(f"simulated S = {rep.simulated_value:.6f} > 7; "
              f"channel speed {rep.channel_speed:.6f} c")
    else:
        print("no signalling forced (target reachable within the bound)")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_check(args):
    with open(args.behavior) as fh:
        b = behavior_from_json(json.load(fh))
    ns_ok, report = is_no_signalling(b, tol=args.tol)
    doc = {
        "n_parties": b.n_parties,
        "no_signalling": ns_ok,
        "max_variation": report.max_variation,
        "worst_party": report.worst_party,
        "variations": report.variations,
        "witnesses": {p: list(w) for p, w in report.witnesses.items()},
    }
    all_ok = ns_ok
    if b.n_parties == 4:
        loc_ok, details = conditional_locality_check(b)
        doc["bc_given_ad_local"] = loc_ok
        doc["bc_given_ad_details"] = details
        all_ok = all_ok and loc_ok
    path = _write(args.out, "check.json", doc)
    print(f"wrote {path}")
    print(f"no-signalling: {'pass' if ns_ok else 'FAIL'} "
          f"(max variation {report.max_variation:.3g}, "
          f"worst party {report.worst_party})")
    if b.n_parties == 4:
        print(f"BC|AD locality: {'pass' if doc['bc_given_ad_local'] else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(
        prog="vcone",
        description="v-cone causal geometries, polytope bound certification, "
                    "quantum see-saw optimization and the signalling demo.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=_env("OUT", str, "."),
                        help="output directory for JSON/CSV artifacts")
    common.add_argument("--jobs", type=int, default=_env("JOBS", int, 1),
                        help="parallelism cap (currently single-process)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", parents=[common],
                       help="canonical geometry, ordering, "
                            "meeting points and channel speeds")
    g.add_argument("--r", type=float, default=_env("R", float, 2.0),
                   help="influence speed ratio v/c (must exceed 1)")
    g.add_argument("--sweep", default=None, metavar="LO:HI:N",
                   help="also write geometry_sweep.csv with columns "
                        "r,speed_A_to_d_prime,speed_D_to_a_prime,matches_pattern")
    g.set_defaults(func=cmd_geometry)

    l = sub.add_parser("lemma-bound", parents=[common], help="LP maximum over behaviors with "
                                           "local BC|AD conditionals and no-signalling")
    l.add_argument("--expr", default=None, help="expression JSON (default: built-in S)")
    l.add_argument("--rational", action="store_true",
                   default=_env_flag("RATIONAL"),
                   help="certify the optimum in exact rational arithmetic")
    l.set_defaults(func=cmd_lemma_bound)

    q = sub.add_parser("quantum-opt", parents=[common], help="see-saw maximization over 4-qubit setups")
    q.add_argument("--expr", default=None, help="expression JSON (default: built-in S)")
    q.add_argument("--restarts", type=int, default=_env("RESTARTS", int, 50))
    q.add_argument("--seed", type=int, default=_env("SEED", int, 0))
    q.set_defaults(func=cmd_quantum_opt)

    d = sub.add_parser("demo", parents=[common], help="six-step signalling demonstration")
    d.add_argument("--r", type=float, default=_env("R", float, 2.0))
    d.add_argument("--seed", type=int, default=_env("SEED", int, 0),
                   help="kept for reproducibility bookkeeping; the default "
                        "demo is deterministic")
    d.add_argument("--target", default=None,
                   help="behavior JSON to reproduce instead of the built-in "
                        "quantum optimum")
    d.set_defaults(func=cmd_demo)

    c = sub.add_parser("check", parents=[common], help="validate a behavior file: invariants, "
                                     "no-signalling, BC|AD locality")
    c.add_argument("behavior", help="behavior JSON path")
    c.add_argument("--tol", type=float, default=1e-9)
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()   # environment defaults can already fail
        args = parser.parse_args(argv)
    except InvalidInputError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as ex:
        return EXIT_USAGE if ex.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InvalidInputError, FileNotFoundError, json.JSONDecodeError,
            KeyError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInconsistencyError as ex:
        print(f"internal inconsistency: {ex}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as ex:   # noqa: BLE001 - the CLI boundary
        print(f"internal error: {type(ex).__name__}: {ex}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
