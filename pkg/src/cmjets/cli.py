"""Command-line front end.

Exit codes: 0 holds, 1 violated (or failed precondition), 2 undetermined,
3 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import io as jio
from .jets import (JetMap, check_first_order, check_flat2_conditions, check_second_order, classify_contact,
                   construct_2flat_germ, construct_first_order_germ, expand_basic)
from .normalform import (MAX_NORMAL_WEIGHT, HypersurfaceModel, cm_normalize, levi_normalize, transform_graph,
                         weighted_equivalence)
from .sampling import DEFAULT_SAMPLES, DEFAULT_SEED
from .scalars import FLOAT, RATIONAL, parse_scalar
from .trace import normal_space_check
from .verdict import PreconditionError, Status, Verdict
from .wpoly import WPoly

USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# input helpers


def _load_hypersurface(path, backend, n=None, K=None) -> HypersurfaceModel:
    n0, K0, h = jio.hypersurface_from_json(jio.load_json(path), backend)
    if n is not None and n0 != n:
        raise UsageError(f"{path}: dimension {n0} does not match {n}")
    try:
        return HypersurfaceModel.from_graph(h, K0 if K is None else min(K, K0))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _models(args, n, K, inputs):
    out = []
    for path in (args.source, args.target):
        if path is None:
            out.append(HypersurfaceModel.quadric(n, K))
        else:
            inputs[path] = jio.sha256_file(path)
            out.append(_load_hypersurface(path, args.backend, n))
    return out


def _require_normal(models, K):
    for H in models:
        if not normal_space_check(H.phi, min(K, H.K)).is_holds:
            raise UsageError("hypersurfaces must be in normal form; run 'cmjets normalize' first")


def _load_jet(path, backend, inputs) -> JetMap:
    inputs[path] = jio.sha256_file(path)
    return jio.jet_from_json(jio.load_json(path), backend)


def _report(args, inputs, verdict: Verdict, t0, **extra) -> dict:
    rep = {
        "command": ["cmjets"] + list(args.argv),
        "inputs": inputs,
        "verdict": jio.verdict_to_json(verdict),
        "seed": args.seed,
        "tolerance": args.tolerance,
        "backend": args.backend,
    }
    rep.update(extra)
    rep["timing_seconds"] = round(time.perf_counter() - t0, 6)
    return rep


def _emit(rep, path=None):
    sys.stdout.write(jio.dump(rep))
    if path:
        jio.dump(rep, path)


# ---------------------------------------------------------------------------
# commands


def cmd_normalize(args) -> int:
    t0 = time.perf_counter()
    inputs = {args.input: jio.sha256_file(args.input)}
    n, K0, h = jio.hypersurface_from_json(jio.load_json(args.input), args.backend)
    K = min(args.max_weight or K0, MAX_NORMAL_WEIGHT)
    if args.max_weight and args.max_weight > MAX_NORMAL_WEIGHT:
        raise UsageError(f"normalization is implemented through weight {MAX_NORMAL_WEIGHT}")
    h = h.truncate(K)
    levi = None
    lower = h.truncate(2) - WPoly.norm2(n)
    if lower:
        model, levi = levi_normalize(h, K, FLOAT if args.backend == FLOAT else None)
    else:
        model = HypersurfaceModel.from_graph(h, K)
    N, change = cm_normalize(model, K)
    float_mode = N.backend == FLOAT
    tol = args.tolerance if float_mode else None

    def _same(a, b):
        d = a - b
        return d.max_abs() <= tol if tol is not None else not d

    round_trip = {"cm": _same(transform_graph(model.graph(), change, K), N.graph())}
    if levi is not None:
        round_trip["levi"] = _same(transform_graph(h, levi, K), model.graph())
    check = normal_space_check(N.phi, K, exact=not float_mode, tol=args.tolerance)
    ok = check.is_holds and all(round_trip.values())
    verdict = (Verdict.holds("normal form computed", strict=True) if ok
               else Verdict.undetermined("normal form failed its postconditions"))
    nf = jio.hypersurface_to_json(N.graph(), K)
    ch = {"levi": jio.change_to_json(levi) if levi is not None else None, "cm": jio.change_to_json(change)}
    if args.output:
        jio.dump(nf, args.output)
    if args.change_output:
        jio.dump(ch, args.change_output)
    _emit(_report(args, inputs, verdict, t0, normal_form=nf, change=ch, round_trip=round_trip,
                  normal_space_check=jio.verdict_to_json(check), change_is_identity=change.is_identity()
                  and levi is None))
    return verdict.status.exit_code


def cmd_equiv(args) -> int:
    t0 = time.perf_counter()
    inputs = {p: jio.sha256_file(p) for p in (args.first, args.second)}
    H1 = _load_hypersurface(args.first, args.backend)
    H2 = _load_hypersurface(args.second, args.backend, H1.n)
    K = args.max_weight or 5
    if K > 5:
        raise UsageError("weighted equivalence is decided through weight 5")
    v = weighted_equivalence(H1, H2, K, seed=args.seed, tolerance=args.tolerance)
    _emit(_report(args, inputs, v, t0, max_weight=K), args.output)
    return v.status.exit_code


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    inputs = {}
    extra = {}
    if args.order == "1":
        inputs[args.file] = jio.sha256_file(args.file)
        L = jio.matrix_from_json(jio.load_json(args.file), args.backend)
        v, data = check_first_order(L)
        if data is not None:
            extra["differential"] = {"lambda": data.lam, "singular_values": data.mu, "alpha": data.alpha,
                                     "charpoly": data.charpoly}
    else:
        F = _load_jet(args.file, args.backend, inputs)
        K = max(F.K, 4)
        H, Hp = _models(args, F.n, max(K, 6), inputs)
        _require_normal((H, Hp), 6)
        if args.order == "2":
            try:
                v = check_second_order(F, H.get(4), Hp.get(4), samples=args.samples, seed=args.seed)
            except PreconditionError as exc:
                v = Verdict.violated(str(exc), certificate="precondition")
        else:
            try:
                rep = check_flat2_conditions(F, H, Hp)
            except PreconditionError as exc:
                v = Verdict.violated(str(exc), certificate="precondition")
            else:
                conds = {"flat2": rep.flat2, "tangent4": rep.tangent4, "im_zero": rep.im_zero,
                         "agree": rep.agree}
                extra["conditions"] = conds
                extra["details"] = rep.details
                if rep.flat2 and rep.agree:
                    v = Verdict.holds("2-flat; all three conditions hold", **conds)
                elif rep.agree:
                    v = Verdict.violated("not 2-flat; all three conditions fail", **conds)
                else:
                    v = Verdict.undetermined("the three conditions disagree", **conds)
    _emit(_report(args, inputs, v, t0, order=args.order, **extra), args.output)
    return v.status.exit_code


def _parse_alpha(text, backend):
    try:
        vals = [parse_scalar(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --alpha value: {exc}") from exc
    if backend == FLOAT:
        vals = [complex(x) for x in vals]
    return vals


def _contact_summary(report):
    order, sign = classify_contact(report)
    return {"tangency_order": order, "lowest_sign": jio.verdict_to_json(sign)}, order, sign


def cmd_construct(args) -> int:
    t0 = time.perf_counter()
    inputs = {}
    if args.order == "1":
        if not args.alpha:
            raise UsageError("--order 1 needs --alpha")
        alpha = _parse_alpha(args.alpha, args.backend)
        n = len(alpha)
    else:
        n = args.n
    if n is None:
        n = 1
        for path in (args.source, args.target):
            if path is not None:
                n = jio.load_json(path).get("n", 1)
                break
    H, Hp = _models(args, n, MAX_NORMAL_WEIGHT, inputs)
    try:
        if args.order == "1":
            F = construct_first_order_germ(alpha, H, Hp, samples=args.samples, seed=args.seed)
        else:
            F = construct_2flat_germ(H, Hp, samples=args.samples, seed=args.seed)
    except PreconditionError as exc:
        v = Verdict.violated(f"precondition failed: {exc}", certificate="precondition")
        print(f"cmjets construct: {exc}", file=sys.stderr)
        _emit(_report(args, inputs, v, t0, order=args.order))
        return 1
    jet = jio.jet_to_json(F)
    if args.output:
        jio.dump(jet, args.output)
    rep = expand_basic(H, Hp, F, F.K, allow_truncated_models=True, samples=args.samples, seed=args.seed)
    summary, _, _ = _contact_summary(rep)
    params = {k: (x if k == "certificate" else str(x)) for k, x in F.params.items()
              if k not in ("models", "normalized_source", "normalized_target")}
    v = Verdict.holds("germ constructed and certified", strict=True, **params)
    _emit(_report(args, inputs, v, t0, order=args.order, jet=jet, jet_text=str(F), verification=summary))
    return 0


def cmd_contact(args) -> int:
    t0 = time.perf_counter()
    inputs = {}
    F = _load_jet(args.jet, args.backend, inputs)
    K = args.max_weight or F.K
    if K > F.K:
        raise UsageError(f"jet is stored through weight {F.K} < {K}")
    H, Hp = _models(args, F.n, K, inputs)
    rep = expand_basic(H, Hp, F, K, allow_truncated_models=True, samples=args.samples, seed=args.seed)
    summary, order, sign = _contact_summary(rep)
    comps = {str(mu): str(e) for mu, e in rep.components}
    if args.format == "json":
        _emit(_report(args, inputs, sign, t0, components=comps, notes=rep.notes, **summary), args.output)
    else:
        lines = [f"e_{mu} = {e}" for mu, e in rep.components]
        if order >= K:
            lines.append(f"tangent through weight {K}")
        else:
            lines.append(f"tangency order {order}")
            lines.append(f"lowest component e_{order + 1}: {sign.summary()}")
            if sign.witness is not None:
                lines.append(f"witness: {json.dumps(jio.to_jsonable(sign.witness))}")
        text = "\n".join(lines) + "\n"
        sys.stdout.write(text)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return sign.status.exit_code


def cmd_selftest(args) -> int:
    from . import selftest
    t0 = time.perf_counter()
    results = selftest.run(args.suite, args.seed)
    for r in results:
        print(("PASS " if r.ok else "FAIL ") + r.line())
        for f in r.failures:
            print(f"    failing case: {f}")
    total = sum(r.total for r in results)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{total} cases passed in {time.perf_counter() - t0:.2f}s (seed {args.seed})")
    return 0 if passed == total else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-weight", type=int, default=None, help="truncation weight K")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--backend", choices=(RATIONAL, FLOAT), default=RATIONAL)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="sample count for sign checks")
    common.add_argument("-o", "--output", default=None, help="write the primary output here")

    models = _Parser(add_help=False)
    models.add_argument("--source", default=None, help="source hypersurface file (default: quadric)")
    models.add_argument("--target", default=None, help="target hypersurface file (default: quadric)")

    p = _Parser(prog="cmjets", description="Admissible boundary jets between strongly pseudoconvex germs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize", parents=[common], help="partial Chern-Moser normal form")
    s.add_argument("input")
    s.add_argument("--change-output", default=None, help="write the coordinate change here")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("equiv", parents=[common], help="equivalence up to weighted order 5")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("check", parents=[common, models], help="first/second order admissibility, 2-flatness")
    s.add_argument("--order", choices=("1", "2", "flat2"), required=True)
    s.add_argument("file", help="matrix file (order 1) or jet file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("construct", parents=[common, models], help="build a 1-flat or 2-flat germ")
    s.add_argument("--order", choices=("1", "2"), required=True)
    s.add_argument("--alpha", default=None, help="comma separated alpha_1 >= ... >= alpha_n")
    s.add_argument("--n", type=int, default=None, help="dimension when both models are quadrics")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("contact", parents=[common, models], help="weighted expansion of the basic expression")
    s.add_argument("jet")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_contact)

    s = sub.add_parser("selftest", help="run the randomised property suites")
    s.add_argument("--suite", choices=("appendix", "normalform", "jets", "all"), default="all")
    s.add_argument("--seed", type=int, default=42)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except (UsageError, jio.FormatError, OSError) as exc:
        print(f"cmjets: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except PreconditionError as exc:
        print(f"cmjets: precondition failed: {exc}", file=sys.stderr)
        return Status.VIOLATED.exit_code


if __name__ == "__main__":
    sys.exit(main())
