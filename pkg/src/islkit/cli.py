"""Command-line surface.

Exit codes: 0 success (decide: derivable), 1 decide: refuted / check-model:
violations found, 2 usage or parse errors, 3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys

from . import (bisim, closed, config, decide, fixpoint, interp, kripke,
               syntax, translate)
from .errors import BudgetExceededError, IslkitError, ParseError

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="islkit", description=__doc__)
    top.add_argument("--json", action="store_true", help="machine-readable output")
    top.add_argument("--seed", type=int, default=0, help="seed for randomized verbs")
    top.add_argument("--jobs", type=int, default=1,
                     help="worker count for the deterministic parallel paths")
    sub = top.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("decide", help="decide derivability, else emit a countermodel")
    p.add_argument("--logic", required=True, choices=sorted(decide.LOGICS))
    p.add_argument("--countermodel", metavar="OUT",
                   help="write the countermodel (.json or .dot)")
    p.add_argument("--max-types", type=int, default=None)
    p.add_argument("formula")

    p = sub.add_parser("translate", help="apply a compositional translation")
    p.add_argument("--map", required=True, choices=sorted(translate.MAPS),
                   dest="map_name")
    p.add_argument("formula")

    p = sub.add_parser("normalize", help="closed-fragment normal form")
    p.add_argument("--display-cap", type=int, default=32,
                   help="render the canonical formula only up to this degree")
    p.add_argument("formula")

    p = sub.add_parser("fixpoint", help="explicit fixed point of a guarded body")
    p.add_argument("--var", required=True)
    p.add_argument("--logic", required=True, choices=sorted(decide.LOGICS))
    p.add_argument("chi")

    p = sub.add_parser("interpolate", help="uniform interpolants")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exists", metavar="VARS")
    g.add_argument("--forall", metavar="VARS")
    p.add_argument("--logic", required=True, choices=sorted(decide.LOGICS))
    p.add_argument("--bound", type=int, default=None)
    p.add_argument("--verify-sample-depth", type=int, default=None)
    p.add_argument("formula")

    p = sub.add_parser("enum-classes", help="representatives up to equivalence")
    p.add_argument("--vars", default="")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--logic", required=True, choices=sorted(decide.LOGICS))

    p = sub.add_parser("bisim", help="bounded bisimulation layer table")
    p.add_argument("--vars", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("model_k")
    p.add_argument("model_m")

    p = sub.add_parser("amalgamate", help="witnessing-triple amalgamation")
    p.add_argument("--logic", required=True, choices=["isl-a", "isl-a+", "isl-a-plus"])
    p.add_argument("--adequate-of", required=True, metavar="FORMULA")
    p.add_argument("model_k")
    p.add_argument("model_m")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("check-model", help="validate a model file")
    p.add_argument("--class", dest="cls", default=kripke.CLASS_ISL,
                   choices=kripke.CLASSES)
    p.add_argument("--close", action="store_true",
                   help="saturate pre/sub before validating")
    p.add_argument("model")

    p = sub.add_parser("enum-models", help="exhaustively enumerate small models")
    p.add_argument("--vars", default="")
    p.add_argument("--max-nodes", type=int, required=True)
    p.add_argument("--class", dest="cls", default=kripke.CLASS_ISL,
                   choices=[kripke.CLASS_ISL, kripke.CLASS_BRILLIANT])
    p.add_argument("--limit", type=int, default=None)
    return top


def _vars_arg(text: str) -> tuple[str, ...]:
    return syntax.variable_set(v for v in text.replace(",", " ").split() if v)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        print(text)


def _budgets(args) -> config.Budgets:
    b = config.from_env()
    if getattr(args, "max_types", None):
        b = dataclasses.replace(b, max_types=args.max_types)
    if getattr(args, "bound", None):
        b = dataclasses.replace(b, enum_depth=max(b.enum_depth, args.bound))
    return b


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        return _dispatch(args)
    except ParseError as exc:
        print(f"islkit: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"islkit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IslkitError as exc:
        print(f"islkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"islkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    return {
        "decide": _cmd_decide,
        "translate": _cmd_translate,
        "normalize": _cmd_normalize,
        "fixpoint": _cmd_fixpoint,
        "interpolate": _cmd_interpolate,
        "enum-classes": _cmd_enum_classes,
        "bisim": _cmd_bisim,
        "amalgamate": _cmd_amalgamate,
        "check-model": _cmd_check_model,
        "enum-models": _cmd_enum_models,
    }[args.verb](args)


def _cmd_decide(args) -> int:
    logic = decide.get_logic(args.logic)
    f = syntax.parse(args.formula, logic.mode)
    verdict = decide.derivable(f, logic, _budgets(args))
    if verdict.derivable:
        _emit(args, {"formula": args.formula, "logic": logic.name,
                     "derivable": True}, "derivable")
        return EXIT_OK
    payload = {"formula": args.formula, "logic": logic.name, "derivable": False,
               "root": verdict.root,
               "countermodel": kripke.to_json_dict(verdict.countermodel)}
    _emit(args, payload,
          f"refuted at {verdict.root} in a {len(verdict.countermodel.nodes)}-node model")
    if args.countermodel:
        cm = verdict.countermodel
        cm = kripke.KripkeModel(cm.vars, cm.nodes, cm.pre, cm.sub, cm.val,
                                root=verdict.root)
        if args.countermodel.endswith(".dot"):
            with open(args.countermodel, "w", encoding="utf-8") as fh:
                fh.write(kripke.to_dot(cm) + "\n")
        else:
            kripke.dump(cm, args.countermodel)
    return EXIT_REFUTED


def _cmd_translate(args) -> int:
    tmap = translate.get_map(args.map_name)
    if tmap.source == syntax.ARROW:
        f = syntax.parse(args.formula, syntax.ARROW_FP)
        if any(g.kind in ("fix", "star") for g in syntax.subformulas(f)):
            f = translate.eliminate_fixpoints(f)
    else:
        f = syntax.parse(args.formula, tmap.source)
    out = translate.apply_translation(f, tmap)
    text = syntax.render(out, tmap.target)
    _emit(args, {"map": tmap.name, "input": args.formula, "output": text}, text)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    f = syntax.parse(args.formula, syntax.ARROW)
    d = closed.normalize_closed(f)
    text = f"degree: {closed.degree_str(d)}"
    canonical = None
    if d == closed.INF or d <= args.display_cap:
        canonical = syntax.render(closed.degree_to_formula(d), syntax.ARROW)
        text += f"\ncanonical: {canonical}"
    _emit(args, {"input": args.formula, "degree": closed.degree_str(d),
                 "canonical": canonical}, text)
    return EXIT_OK


def _cmd_fixpoint(args) -> int:
    logic = decide.get_logic(args.logic)
    chi = syntax.parse(args.chi, logic.mode)
    theta = fixpoint.explicit_fixpoint(chi, args.var)
    verified = fixpoint.check_fixpoint(chi, args.var, theta, logic)
    text = (f"fixpoint: {syntax.render(theta, logic.mode)}\n"
            f"equation verified: {verified}")
    _emit(args, {"chi": args.chi, "var": args.var, "logic": logic.name,
                 "fixpoint": syntax.render(theta, logic.mode),
                 "verified": verified}, text)
    return EXIT_OK if verified else EXIT_REFUTED


def _cmd_interpolate(args) -> int:
    logic = decide.get_logic(args.logic)
    f = syntax.parse(args.formula, logic.mode)
    kind = "exists" if args.exists else "forall"
    qvars = _vars_arg(args.exists or args.forall)
    budgets = _budgets(args)
    fn = interp.post_interpolant if kind == "exists" else interp.pre_interpolant
    report = fn(f, qvars, logic, budgets, bound=args.bound)
    if args.verify_sample_depth is not None:
        pvars = syntax.variable_set(syntax.pv(f) - set(qvars))
        sample = interp.enum_representatives(
            pvars, args.verify_sample_depth, logic, budgets).representatives
        report = interp.verify_interpolant(f, qvars, report.theta, kind,
                                           logic, sample, budgets)
    theta_text = syntax.render(report.theta, logic.mode)
    text = (f"{kind} {','.join(qvars)}. {args.formula}\n"
            f"interpolant: {theta_text}\n"
            f"checks: {report.checks}")
    _emit(args, {"kind": kind, "qvars": list(qvars), "logic": logic.name,
                 "input": args.formula, "interpolant": theta_text,
                 "nu": report.nu, "bound": report.full_bound,
                 "checks": report.checks, "ok": report.ok}, text)
    return EXIT_OK if report.ok else EXIT_REFUTED


def _cmd_enum_classes(args) -> int:
    logic = decide.get_logic(args.logic)
    enum = interp.enum_representatives(_vars_arg(args.vars), args.depth, logic,
                                       _budgets(args))
    reps = [syntax.render(f, logic.mode) for f in enum.representatives]
    _emit(args, {"vars": list(enum.pvars), "depth": enum.bound,
                 "logic": logic.name, "count": len(reps),
                 "representatives": reps},
          "\n".join(reps) + f"\n({len(reps)} classes)")
    return EXIT_OK


def _cmd_bisim(args) -> int:
    K = kripke.load(args.model_k)
    M = kripke.load(args.model_m)
    layers = bisim.bounded_bisim(K, M, _vars_arg(args.vars), args.depth)
    lines = []
    for alpha, rel in enumerate(layers.layers):
        pairs = ", ".join(f"({a},{b})" for a, b in sorted(rel))
        lines.append(f"Z_{alpha}: {pairs or '(empty)'}")
    _emit(args, {"vars": list(layers.pvars),
                 "layers": [sorted(map(list, rel)) for rel in layers.layers]},
          "\n".join(lines))
    return EXIT_OK


def _cmd_amalgamate(args) -> int:
    logic = decide.get_logic(args.logic)
    K = kripke.load(args.model_k)
    M = kripke.load(args.model_m)
    f = syntax.parse(args.adequate_of, logic.mode)
    shared = sorted(set(K.vars) & set(M.vars))
    X = decide.AdequateSet(
        syntax.closure([f] + [syntax.Var(v) for v in shared],
                       logic.closure_kind), "arrow")
    N, root = bisim.amalgamate(K, M, X, logic, _budgets(args))
    if args.output:
        kripke.dump(N, args.output)
    _emit(args, {"root": root, "nodes": len(N.nodes),
                 "model": kripke.to_json_dict(N)},
          f"amalgam has {len(N.nodes)} nodes, root {root}"
          + (f"; written to {args.output}" if args.output else ""))
    return EXIT_OK


def _cmd_check_model(args) -> int:
    m = kripke.load(args.model)
    if args.close:
        m = kripke.close_model(m, brilliant=(args.cls == kripke.CLASS_BRILLIANT))
    violations = kripke.validate_model(m, args.cls)
    payload = {"class": args.cls, "valid": not violations,
               "violations": [str(v) for v in violations]}
    text = "valid" if not violations else "\n".join(str(v) for v in violations)
    _emit(args, payload, text)
    return EXIT_OK if not violations else EXIT_REFUTED


def _cmd_enum_models(args) -> int:
    budgets = config.from_env()
    stream = kripke.enumerate_models(_vars_arg(args.vars), args.max_nodes,
                                     args.cls, budget_nodes=budgets.max_nodes)
    count = 0
    models = []
    for m in stream:
        count += 1
        if args.limit is not None and count > args.limit:
            count -= 1
            break
        if args.json:
            models.append(kripke.to_json_dict(m))
    if args.json:
        print(json.dumps({"count": count, "models": models}, indent=2))
    else:
        print(f"{count} models")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
