"""Command-line front end.

Every command builds a JSON report first; the text printed to stdout is a
rendering of that report.  The exit code is 0 exactly when every certificate
in the report passed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, tuples
from .cohomology import (
    DEFAULT_GUARD,
    Cochain,
    GuardError,
    KParModule,
    PartialComplex,
    derivation_spaces,
)
from .corpus import EXAMPLES, example
from .exel import ExelSemigroup
from .finite_group import GroupAxiomError, build_group
from .globalization import (
    InternalConsistencyError,
    build_envelope,
    compare_transversals,
    globalize,
    uniqueness_certificate,
    verify_iso,
    verify_reduction_lemmas,
)
from .partial_action import action_from_json, validate
from .resolution import build_resolution

DEFAULT_SEED = 20240101
EXIT_FAIL = 1
EXIT_USAGE = 2


class InputError(ValueError):
    """Unreadable or invalid user input."""


# -- loading -------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_group(text: str):
    if text.endswith(".json") or Path(text).is_file():
        data = _read_json(text)
        try:
            return build_group(data)
        except GroupAxiomError as exc:
            raise InputError(f"{text}: {exc} (witness {list(exc.witness)})") from exc
    try:
        return build_group(text)
    except GroupAxiomError as exc:
        raise InputError(f"{exc} (witness {list(exc.witness)})") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_action(text: str, field: str | None):
    """A corpus name or a path to an action JSON file."""
    if text in EXAMPLES:
        return example(text, field or "rational")
    if not Path(text).is_file():
        raise InputError(f"{text!r} is neither a file nor one of the examples: {', '.join(EXAMPLES)}")
    data = _read_json(text)
    try:
        return action_from_json(data, field)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{text}: {exc}") from exc


# -- JSON helpers ---------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj.numerator)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def _cochain_json(field, values: np.ndarray, n: int, order: int) -> dict:
    return Cochain(n, values, field, order).to_json()


def _all_passed(obj) -> bool:
    """Every boolean under a 'passed' or 'checks' key is true."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "passed" and v is False:
                return False
            if k == "checks" and isinstance(v, dict) and not all(x is True for x in v.values() if isinstance(x, bool)):
                return False
            if not _all_passed(v):
                return False
    elif isinstance(obj, list):
        return all(_all_passed(v) for v in obj)
    return True


# -- rendering ------------------------------------------------------------


def render(report, indent: int = 0) -> str:
    """Plain-text view of a report: nested keys, checks shown as PASS/FAIL."""
    pad = "  " * indent
    lines = []
    if isinstance(report, dict):
        for k in sorted(report):
            v = report[k]
            if isinstance(v, bool):
                lines.append(f"{pad}{k}: {'PASS' if v else 'FAIL'}")
            elif isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(report, list):
        for i, v in enumerate(report):
            if isinstance(v, (dict, list)) and not _is_flat(v):
                lines.append(f"{pad}- [{i}]")
                lines.append(render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(report)}")
    return "\n".join(line for line in lines if line)


def _is_flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _is_flat(x)) for x in v)
    return False


def _inline(v) -> str:
    return json.dumps(_plain(v), sort_keys=True)


# -- commands -------------------------------------------------------------


def cmd_semigroup(args) -> dict:
    G = load_group(args.group)
    S = ExelSemigroup(G)
    axioms = S.certify_axioms()
    return {
        "command": "semigroup",
        "group": G.label,
        "order": G.order,
        "size": len(S),
        "elements": [S.render(s) for s in S.elements],
        "axioms": axioms,
    }


def cmd_cohomology(args) -> dict:
    spec = load_action(args.action, args.field)
    cert = validate(spec)
    if not cert.passed:
        return {"command": "cohomology", "action": spec.label, "validate": cert.to_json()}
    cx = PartialComplex(KParModule.from_action(spec), args.guard_dim)
    degrees = range(args.degree + 1) if args.all_degrees else [args.degree]
    reports = [cx.cohomology(n).to_json() for n in degrees]
    return {
        "command": "cohomology",
        "action": spec.label,
        "field": spec.field.name,
        "validate": cert.to_json(),
        "dims": [r["dim_H"] for r in reports],
        "degrees": reports,
    }


def _globalization_json(env, gl, j: int) -> dict:
    F, N = env.field, env.N
    out = {
        "u": _cochain_json(F, gl.U[:, :, j], gl.n, N),
        "checks": gl.checks,
    }
    for name in ("w_prime", "epsilon", "w_tilde"):
        val = getattr(gl, name)
        if val is not None:
            deg = gl.n - 1 if name == "epsilon" else gl.n
            out[name] = _cochain_json(F, val[:, :, j], deg, N)
    out["passed"] = gl.passed
    return out


def cmd_globalize(args) -> dict:
    spec = load_action(args.action, args.field)
    F, N, n = spec.field, spec.group.order, args.degree
    env = build_envelope(spec, args.transversal_permutation, args.guard_dim)
    cx = PartialComplex(KParModule.from_action(spec), args.guard_dim)
    if args.cocycle:
        try:
            w = Cochain.from_json(_read_json(args.cocycle), N, spec.dim, F)
        except (KeyError, ValueError) as exc:
            raise InputError(f"{args.cocycle}: {exc}") from exc
        if w.n != n:
            raise InputError(f"cocycle has degree {w.n} but --degree is {n}")
        W = w.values[:, :, None]
        source = args.cocycle
    else:
        rng = np.random.default_rng(args.seed)
        W = _sample_cocycles(cx, n, rng)
        source = "kernel basis and one random combination"
    report = {"command": "globalize", "action": spec.label, "degree": n, "seed": args.seed, "cocycles": source}
    residual = cx.apply(n, W)
    bad = np.flatnonzero(np.any(residual != 0, axis=(1, 2)))
    in_space = cx.space(n).contains(W)
    if bad.size or not np.all(in_space):
        digs = tuples.digits(N, n + 1)
        report["rejected"] = {
            "reason": "input is not a partial cocycle",
            "constraint_violations": [tuples.key(t) for t in tuples.digits(N, n)[~in_space]],
            "residual": {tuples.key(digs[t]): F.encode_array(residual[t, :, 0]) for t in bad},
        }
        report["passed"] = False
        return report
    gl = globalize(env, W, n)
    report["globalizations"] = [_globalization_json(env, gl, j) for j in range(W.shape[2])]
    report["model"] = env.model.to_json()
    return report


def cmd_envelope(args) -> dict:
    spec = load_action(args.action, args.field)
    env = build_envelope(spec, args.transversal_permutation, args.guard_dim)
    return {"command": "envelope", "action": spec.label, "seed": args.seed, **env.certify(np.random.default_rng(args.seed))}


def _sample_cocycles(cx: PartialComplex, n: int, rng) -> np.ndarray:
    """Kernel basis of delta^n plus one random combination of it."""
    F = cx.field
    Z = cx.cocycle_basis(n)
    if Z.shape[2] == 0:
        return F.zeros((Z.shape[0], Z.shape[1], 1))
    coeffs = F.random(rng, (Z.shape[2], 1))
    combo = F.reduce(F.matmul(Z, coeffs))
    return np.concatenate([Z, combo], axis=2)


def cmd_verify(args) -> dict:
    spec = load_action(args.action, args.field)
    rng = np.random.default_rng(args.seed)
    report: dict = {"command": "verify", "action": spec.label, "field": spec.field.name, "seed": args.seed}
    cert = validate(spec)
    report["validate"] = cert.to_json()
    if not cert.passed:
        return report
    G = spec.group
    n_max = args.degree
    S = ExelSemigroup(G)
    report["semigroup"] = {"size": len(S), **S.certify_axioms()}
    module = KParModule.from_action(spec)
    report["module"] = module.certify()
    try:
        res = build_resolution(G, n_max)
        report["resolution"] = {
            **res.certify(),
            "hom_transport": res.certify_hom_transport(module, rng, samples=args.samples),
        }
    except MemoryError as exc:
        report["resolution"] = {"skipped": str(exc)}
    cx = PartialComplex(module, args.guard_dim)
    env = build_envelope(spec, 0, args.guard_dim)
    report["envelope"] = env.certify(rng)
    report["derivations"] = derivation_spaces(module, cx)
    degrees = []
    for n in range(n_max + 1):
        entry: dict = {"n": n}
        zero_check = cx.apply(n + 1, cx.apply(n, cx.space(n).random(rng, 3)))
        entry["complex"] = {
            "checks": {
                "delta_squared_zero": not np.any(zero_check != 0),
                "constraint_preserved": cx.preserves_constraint(n),
            }
        }
        entry["cohomology"] = cx.cohomology(n, representatives=False).to_json(with_representatives=False)
        entry["iso"] = verify_iso(spec, n, rng, env, args.guard_dim)
        W = _sample_cocycles(cx, n, rng)
        gl = globalize(env, W, n)
        entry["globalize"] = {"cocycles": W.shape[2], "checks": gl.checks, "passed": gl.passed}
        if n >= 1:
            entry["reduction_lemmas"] = verify_reduction_lemmas(spec, W, n, rng)
            xi = cx.space(n - 1).random(rng, W.shape[2])
            entry["uniqueness"] = uniqueness_certificate(env, W, xi, n)
            if args.transversal_permutation:
                entry["transversal"] = compare_transversals(spec, W, n, args.transversal_permutation)
        degrees.append(entry)
    report["degrees"] = degrees
    report["dims_H_par"] = [d["iso"]["dim_H_par"] for d in degrees]
    report["dims_H_classical"] = [d["iso"]["dim_H_classical"] for d in degrees]
    return report


COMMANDS = {
    "semigroup": cmd_semigroup,
    "cohomology": cmd_cohomology,
    "globalize": cmd_globalize,
    "verify": cmd_verify,
    "envelope": cmd_envelope,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parcohom", description="Partial group cohomology and globalization certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=None, help="'rational' or a prime p / GF(p); overrides the action file")
    common.add_argument("--degree", type=int, default=2, help="cohomological degree (maximum degree for verify)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--guard-dim", type=_positive, default=DEFAULT_GUARD, help="maximum |G|^(n+1) * dim before refusing")
    common.add_argument("--output", default=None, help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of the text rendering")
    common.add_argument(
        "--transversal-permutation",
        type=int,
        default=0,
        help="use the k-th element of each coset as its representative and compare against k = 0",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("semigroup", parents=[common], help="enumerate S(G) and certify its axioms")
    p.add_argument("group", help="a named group such as 'cyclic(3)' or 'Z/2xZ/2', or a JSON table")
    for name, text in (
        ("cohomology", "dimensions and representatives of H^n_par"),
        ("globalize", "globalize a partial cocycle"),
        ("verify", "run the full certificate bundle"),
        ("envelope", "build and certify the enveloping action"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("action", help=f"an action JSON file or one of: {', '.join(EXAMPLES)}")
        if name == "cohomology":
            p.add_argument("--all-degrees", action="store_true", help="report degrees 0..n")
        if name == "globalize":
            p.add_argument("--cocycle", default=None, help='cocycle JSON {"n": .., "entries": {"g1,g2": [..]}}')
        if name == "verify":
            p.add_argument("--samples", type=int, default=20, help="random cochains per degree for Hom-transport")
    return parser


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report = COMMANDS[args.command](args)
    except (InputError, GuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalConsistencyError as exc:
        print(f"internal consistency fault: {exc}", file=sys.stderr)
        print(dumps(exc.state), file=sys.stderr)
        return EXIT_FAIL
    text = dumps(report)
    if args.output:
        Path(args.output).write_text(text)
    print(text if args.json else render(_plain(report)))
    return 0 if _all_passed(_plain(report)) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
