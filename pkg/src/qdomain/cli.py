"""Command-line front end.

Exit status: 0 when every check passes, 1 when violations are found, 2 on
input errors.  ``--report json`` output is deterministic and versioned.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import approach, domain, scott
from .interval import ALPHA_R, ParamStructure, parse_point, parse_shape, point_label
from .order import FiniteQOrder, InputError, check_q_order
from .tnorm import TNorm, classify, verify_quantale_laws

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Outcome:
    def __init__(self, passed, result, status=None):
        self.passed = passed
        self.result = result
        self.status = status or ("pass" if passed else "fail")


# -- loading ------------------------------------------------------------------


def _load_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _wrap(path, build, data):
    try:
        return build(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_tnorm(path):
    return _wrap(path, TNorm.from_dict, _load_json(path))


def load_order(path):
    return _wrap(path, FiniteQOrder.from_dict, _load_json(path))


def load_approach(path):
    return _wrap(path, approach.ApproachTable.from_dict, _load_json(path))


def _reject_exact_product(args, tnorm):
    if args.exact and tnorm.has_product:
        raise InputError("--exact is not available for t-norms with a product piece")


def _structure(args, allow_param=True):
    """A finite structure from ``--file``, or a parametric one from ``--spec`` and ``--shape``.

    ``--snapshot n`` turns the parametric structure into its finite grid snapshot.
    """
    if args.file:
        X = load_order(args.file)
        _reject_exact_product(args, X.tnorm)
        return X.exact() if args.exact else X
    if not args.spec:
        raise InputError("give either --file <structure.json> or --spec <tnorm.json> with --shape")
    t = load_tnorm(args.spec)
    _reject_exact_product(args, t)
    S = ParamStructure(t, parse_shape(args.shape))
    if getattr(args, "snapshot", None):
        return S.grid_snapshot(args.snapshot, exact=args.exact)
    if not allow_param:
        raise InputError("this command needs a finite structure: pass --file or --snapshot <n>")
    if args.exact:
        raise InputError("--exact applies to finite structures only")
    return S


def _points(X, text):
    if isinstance(X, FiniteQOrder):
        return X.index(text) if text in X.elements else X.index(point_label(parse_point(text)))
    return parse_point(text)


# -- commands -----------------------------------------------------------------


def cmd_check_tnorm(args):
    t = load_tnorm(args.spec)
    _reject_exact_product(args, t)
    rep = verify_quantale_laws(t, args.grid, exact=True if args.exact else None)
    cls = classify(t)
    passed = rep.passed(args.eps)
    return Outcome(passed, {"tnorm": t.to_dict(), "laws": rep.to_dict(),
                            "condition_s": cls.satisfies_condition_s, "archimedean": cls.archimedean})


def cmd_check_order(args):
    X = load_order(args.file)
    _reject_exact_product(args, X.tnorm)
    if args.exact:
        X = X.exact()
    rep = check_q_order(X.alpha, X.tnorm, 0 if args.exact else args.eps)
    return Outcome(rep.valid, {"elements": list(X.elements), "order": rep.to_dict(X.elements)})


def cmd_check_approach(args):
    T = load_approach(args.file)
    _reject_exact_product(args, T.tnorm)
    if args.exact:
        T = T.exact()
    rep = approach.check_approach_axioms(T, 0 if args.exact else args.eps)
    result = {"elements": list(T.elements), "axioms": rep.to_dict(list(T.elements))}
    passed = rep.valid
    if rep.valid:
        rt = approach.functor_round_trips(T, grid_n=min(args.grid, 4))
        result["round_trips"] = rt.to_dict()
        passed = rt.passed
    return Outcome(passed, result)


def cmd_way_below(args):
    X = _structure(args)
    if isinstance(X, FiniteQOrder):
        try:
            tab = domain.way_below_finite(X)
        except domain.NotCocomplete as exc:
            return Outcome(False, {"error": "not cocomplete", "detail": str(exc)})
        labels = list(X.elements)
    else:
        if X.is_power:
            raise InputError("way-below tables of power shapes: use --snapshot on the base shape")
        tab = domain.way_below(X, args.grid)
        labels = [point_label(p) for p in tab.points]
    laws = tab.law_violations(X.tnorm)
    passed = all(v <= args.eps for v in laws.values())
    return Outcome(passed, {"points": labels, "w": tab.w, "mode": tab.mode, "law_violations": laws})


def cmd_check_continuity(args):
    X = _structure(args)
    rep = domain.check_continuity(X, args.grid)
    result = {"continuity": rep.to_dict()}
    if isinstance(X, ParamStructure) and X.shape == "xinf":
        return Outcome(rep.conditions["domain"], result)
    passed = rep.is_continuous_lattice
    if passed:
        inter = domain.check_interpolation(X, args.grid)
        result["interpolation"] = inter.to_dict()
        passed = inter.passed
    return Outcome(passed, result)


def cmd_scott_delta(args):
    X = _structure(args)
    x = _points(X, args.point)
    A = [_points(X, a) for a in args.subset.split(",") if a.strip()] if args.subset else []
    if isinstance(X, FiniteQOrder):
        xs, As = X.elements[x], [X.elements[a] for a in A]
        value = scott.sigma_delta(X, xs, As)
        result = {"point": xs, "subset": As, "sigma_delta": value,
                  "gamma_delta": max((X.alpha[x, a] for a in A), default=0.0)}
        return Outcome(True, result)
    if X.shape != ALPHA_R:
        raise InputError("parametric scott-delta is available for alphaR; use --snapshot otherwise")
    value = scott.sigma_delta(X, x, A, args.grid)
    k = approach.k_distance(X.tnorm, x, A)
    gap = abs(value - k)
    return Outcome(gap <= 1.0 / args.grid + args.eps,
                   {"point": x, "subset": A, "sigma_delta": value, "k_distance": k,
                    "gap": gap, "tolerance": 1.0 / args.grid})


def cmd_sobriety(args):
    X = _structure(args, allow_param=False)
    if args.weight:
        lam = np.array([float(Fraction(v)) for v in args.weight.split(",")])
        if len(lam) != len(X):
            raise InputError(f"--weight needs {len(X)} values")
        lams = [("weight", lam)]
    elif args.point:
        i = _points(X, args.point)
        lams = [(X.elements[i], X.alpha[:, i])]
    else:
        lams = [(X.elements[i], X.alpha[:, i]) for i in range(len(X))]
    results, passed = [], True
    for name, lam in lams:
        try:
            sw = scott.sobriety_witness(X, lam, grid_n=args.probe_grid)
        except scott.PreconditionError as exc:
            raise InputError(f"{name}: {exc}") from None
        d = sw.to_dict(list(X.elements))
        d["lambda_label"] = name
        results.append(d)
        passed &= sw.valid
    return Outcome(passed, {"elements": list(X.elements), "witnesses": results})


def cmd_sigma_product(args):
    X = _structure(args, allow_param=False)
    rep = scott.sigma_product_check(X, args.k, args.eps)
    return Outcome(rep.passed, {"k": args.k, "points": len(X), "report": rep.to_dict()})


def cmd_classify_injectivity(args):
    t = load_tnorm(args.spec)
    v = scott.classify_injectivity(t, args.grid if args.grid_given else 100)
    status = "inconclusive" if v.verdict == scott.INCONCLUSIVE else "pass"
    return Outcome(True, v.to_dict(), status)


def cmd_verify_certificate(args):
    data = _load_json(args.file)
    payload = data.get("result", data) if isinstance(data, dict) else data
    try:
        verdict, ok = scott.verify_certificate(payload)
    except InputError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    return Outcome(ok, {"claimed": payload.get("verdict"), "replayed": verdict, "reproduced": ok})


COMMANDS = {
    "check-tnorm": (cmd_check_tnorm, "quantale laws and (S)/Archimedean flags of a t-norm"),
    "check-order": (cmd_check_order, "reflexivity and transitivity of a finite [0,1]-order"),
    "check-approach": (cmd_check_approach, "approach axioms and closed-set round trips of a table"),
    "way-below": (cmd_way_below, "way-below table of a finite or parametric structure"),
    "check-continuity": (cmd_check_continuity, "continuous [0,1]-lattice test with witnesses"),
    "scott-delta": (cmd_scott_delta, "Scott approach distance from a point to a subset"),
    "sobriety": (cmd_sobriety, "recover the point represented by an irreducible closed weight"),
    "sigma-product": (cmd_sigma_product, "compare Sigma(X^k) with (Sigma X)^k"),
    "classify-injectivity": (cmd_classify_injectivity, "injectivity verdict for Sigma(alphaL) with certificate"),
    "verify-certificate": (cmd_verify_certificate, "replay a classify-injectivity report"),
}


# -- parser -------------------------------------------------------------------


class _GridAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.grid_given = True


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v) or v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative tolerance, got {text}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=_positive, default=32, action=_GridAction,
                        help="grid subdivision for sampled checks (default 32)")
    common.add_argument("--eps", type=_nonneg_float, default=1e-9, help="tolerance (default 1e-9)")
    common.add_argument("--report", choices=("text", "json"), default="text")
    common.add_argument("--exact", action="store_true",
                        help="rational arithmetic; rejected when a product piece is present")
    common.set_defaults(grid_given=False)

    parser = _Parser(prog="qdomain", description="Checks for [0,1]-enriched orders, domains and approach spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name in ("check-tnorm", "classify-injectivity"):
            p.add_argument("--spec", required=True, help="t-norm JSON file")
        elif name in ("check-order", "check-approach", "verify-certificate"):
            p.add_argument("--file", required=True)
        else:
            p.add_argument("--file", help="finite structure JSON file")
            p.add_argument("--spec", help="t-norm JSON file for a parametric structure")
            p.add_argument("--shape", default=ALPHA_R, help="alphaL | alphaR | xinf | power:<shape>:<k>")
            p.add_argument("--snapshot", type=_positive, help="use the 1/n grid snapshot of the parametric structure")
        if name == "scott-delta":
            p.add_argument("--point", required=True)
            p.add_argument("--subset", default="", help="comma-separated points")
        if name == "sobriety":
            p.add_argument("--point", help="check the representable weight of this point only")
            p.add_argument("--weight", help="comma-separated weight values")
            p.add_argument("--probe-grid", type=_positive, default=2,
                           help="value grid of the closed sets used to probe irreducibility")
        if name == "sigma-product":
            p.add_argument("--k", type=_positive, default=2)
    return parser


# -- reports ------------------------------------------------------------------


def _plain(obj):
    """Convert to JSON-ready values: arrays to lists, Fractions to strings, infinity to "inf"."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def make_report(args, outcome):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "status": outcome.status,
        "passed": bool(outcome.passed),
        "grid_n": args.grid,
        "epsilon": args.eps,
        "exact": bool(args.exact),
        "result": _plain(outcome.result),
    }


def _text_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _text_lines(obj[k], f"{prefix}{k}." if prefix or k else k)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _text_lines(v, f"{prefix}{i}.")
    else:
        yield f"{prefix.rstrip('.')}: {obj}"


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    head = f"{report['command']}: {report['status'].upper()}"
    return "\n".join([head, *_text_lines(report["result"])])


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        outcome = handler(args)
    except InputError as exc:
        if args.report == "json":
            print(json.dumps({"schema_version": SCHEMA_VERSION, "command": args.command,
                              "status": "input-error", "error": str(exc)}, sort_keys=True, indent=2))
        print(f"qdomain {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(render(make_report(args, outcome), args.report))
    return EXIT_PASS if outcome.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
