"""Command line front end: ``fcaerr scale|factorize|evaluate|lattice``.

Exit codes: 0 success, 1 usage error, 2 input error, 3 concept cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .bmf import BmfParams, bmf_factorize, boolean_product, default_rank
from .context import ObjectMap, intent_of, sigma_context
from .error import attribute_split, conceptual_scaling_error, consistent_part_measure, error_report
from .io import CxtFormatError, ScalingError, load_scaling_spec, read_cxt, save_cxt, scale_csv, write_cxt
from .lattice import DEFAULT_CAP, IntractableError, concepts, export_dot, family_context
from .measure import join_complement

EXIT_USAGE, EXIT_INPUT, EXIT_CAP = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_cap() -> int:
    raw = os.environ.get("FCAERR_CAP")
    if not raw:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"FCAERR_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError("FCAERR_CAP must be at least 1")
    return cap


def _cap(args) -> int:
    if args.cap is None:
        return _default_cap()
    if args.cap < 1:
        raise UsageError("--cap must be at least 1")
    return args.cap


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _object_map(base, scale, path):
    mapping = None
    if path:
        mapping = json.loads(Path(path).read_text(encoding="utf-8"))
    return ObjectMap.by_name(base, scale, mapping)


def cmd_scale(args) -> int:
    spec = load_scaling_spec(args.spec) if args.spec else {}
    ctx = scale_csv(Path(args.input), spec, object_column=args.objects)
    if args.out:
        save_cxt(ctx, args.out)
    else:
        sys.stdout.write(write_cxt(ctx))
    return 0


def cmd_factorize(args) -> int:
    ctx = read_cxt(args.input)
    k = args.k if args.k is not None else default_rank(ctx.n_attributes)
    params = BmfParams(rank=k, max_iter=args.max_iter, restarts=args.restarts,
                       lambda_w=args.lambda_w, lambda_h=args.lambda_h, seed=args.seed)
    fac = bmf_factorize(ctx, params)
    out = Path(args.out)
    save_cxt(fac.scale_context(ctx.objects), out)
    h_path = Path(args.h_out) if args.h_out else out.with_name(out.stem + ".H.cxt")
    save_cxt(fac.h_context(ctx.attributes), h_path)
    side = fac.sidecar()
    side["input"] = str(args.input)
    side["scale"] = str(out)
    side["h"] = str(h_path)
    sidecar = Path(args.sidecar) if args.sidecar else out.with_name(out.stem + ".json")
    sidecar.write_text(json.dumps(side, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_evaluate(args) -> int:
    if not args.scale:
        raise UsageError("evaluate needs --scale (and optionally --h for the factor H)")
    k = read_cxt(args.input)
    s = read_cxt(args.scale)
    sigma = _object_map(k, s, args.map)
    approx = None
    if args.h:
        h = read_cxt(args.h)
        product = boolean_product(sigma_context(k, s, sigma), h)
        if product.attributes != k.attributes:
            raise ValueError("attributes of H do not match the context")
        approx = product
    report = error_report(k, s, sigma, approx, cap=_cap(args), ae_only=args.ae_only,
                          name=args.name or Path(args.input).stem)
    text = report.to_json() + "\n" if args.report == "json" else report.to_table()
    _emit(text, args.out)
    return 0


def _names(ctx, mask):
    return ",".join(ctx.attribute_names(mask))


def cmd_lattice(args) -> int:
    cap = _cap(args)
    ctx = read_cxt(args.input)
    if args.split and not args.highlight_errors:
        raise UsageError("--split needs --highlight-errors BASE.cxt")
    if not args.highlight_errors:
        text = export_dot(concepts(ctx, cap), labeling=args.labeling)
        _emit(text, args.dot)
        return 0

    base = read_cxt(args.highlight_errors)
    sigma = _object_map(base, ctx, args.map)
    pulled = sigma_context(base, ctx, sigma)

    if args.split is None:
        err = conceptual_scaling_error(base, ctx, sigma, cap)
        if err.error_family is None:
            raise IntractableError(cap, "scale extents")
        text = export_dot(concepts(pulled, cap), err.error_family, args.labeling)
    elif args.split == "valid":
        sm = consistent_part_measure(base, ctx, sigma, cap)
        text = export_dot(concepts(sm.scale, cap), labeling=args.labeling, name="consistent")
    elif args.split == "complement":
        err = conceptual_scaling_error(base, ctx, sigma, cap)
        if err.error_family is None:
            raise IntractableError(cap, "scale extents")
        comp = join_complement(err.reflected(), err.consistent_part)
        comp_ctx = family_context(comp, base.objects,
                                  label=lambda A: "{" + _names(pulled, intent_of(pulled, A)) + "}")
        wrong = set(err.error_family)
        bad = [A for A in comp if A in wrong]
        text = export_dot(concepts(comp_ctx, cap), bad, args.labeling, name="join_complement")
    else:
        good, rest = attribute_split(base, ctx, sigma)
        good_ctx = sigma_context(base, good.scale, sigma)
        rest_ctx = sigma_context(base, rest, sigma)
        rest_err = conceptual_scaling_error(base, rest, sigma, cap)
        if rest_err.error_family is None:
            raise IntractableError(cap, "scale extents")
        text = (export_dot(concepts(good_ctx, cap), labeling=args.labeling, name="consistent_attributes")
                + export_dot(concepts(rest_ctx, cap), rest_err.error_family, args.labeling,
                             name="inconsistent_attributes"))
    _emit(text, args.dot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fcaerr", description="Conceptual scaling errors of binary data scalings.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = sub.add_parser("scale", help="scale a CSV table into a formal context")
    sc.add_argument("--in", dest="input", required=True, help="CSV file with a header row")
    sc.add_argument("--spec", help="JSON scaling spec; unlisted columns are scaled nominally")
    sc.add_argument("--objects", help="column holding object names")
    sc.add_argument("--out", help="output .cxt (default: stdout)")
    sc.set_defaults(func=cmd_scale)

    fa = sub.add_parser("factorize", help="binary matrix factorization of a context")
    fa.add_argument("--in", dest="input", required=True)
    fa.add_argument("--out", required=True, help="output .cxt for the scale factor S")
    fa.add_argument("--h-out", help="output .cxt for H (default: OUT stem + .H.cxt)")
    fa.add_argument("--sidecar", help="run metadata JSON (default: OUT stem + .json)")
    fa.add_argument("--k", type=int, help="number of factors (default: round(sqrt(|M|)))")
    fa.add_argument("--max-iter", type=int, default=500)
    fa.add_argument("--restarts", type=int, default=10)
    fa.add_argument("--seed", type=int, default=0)
    fa.add_argument("--lambda-w", type=float, default=1.1)
    fa.add_argument("--lambda-h", type=float, default=1.1)
    fa.set_defaults(func=cmd_factorize)

    ev = sub.add_parser("evaluate", help="report matrix and conceptual errors of a scaling")
    ev.add_argument("--in", dest="input", required=True, help="original context K")
    ev.add_argument("--scale", help="scale context S")
    ev.add_argument("--h", help="factor H; S.H is then evaluated as an approximation of K")
    ev.add_argument("--map", help="JSON object mapping objects of K to objects of S")
    ev.add_argument("--cap", type=int, help="concept cap (default: $FCAERR_CAP or 1000000)")
    ev.add_argument("--ae-only", action="store_true", help="skip the conceptual error")
    ev.add_argument("--report", choices=("json", "table"), default="table")
    ev.add_argument("--name", help="row label (default: input file stem)")
    ev.add_argument("--out", help="write the report here instead of stdout")
    ev.set_defaults(func=cmd_evaluate)

    la = sub.add_parser("lattice", help="export a concept lattice as DOT")
    la.add_argument("--in", dest="input", required=True)
    la.add_argument("--highlight-errors", metavar="BASE.cxt",
                    help="color extents whose preimage is not an extent of BASE")
    la.add_argument("--split", choices=("valid", "complement", "attributes"))
    la.add_argument("--map", help="JSON object mapping objects of BASE to objects of the input")
    la.add_argument("--labeling", choices=("reduced", "full"), default="reduced")
    la.add_argument("--cap", type=int)
    la.add_argument("--dot", help="output file (default: stdout)")
    la.set_defaults(func=cmd_lattice)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fcaerr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntractableError as exc:
        print(f"fcaerr: intractable: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, CxtFormatError, ScalingError, KeyError, ValueError) as exc:
        print(f"fcaerr: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
