"""Command line front end.

Examples::

    haarint --group U "g[1,1]*gc[1,1]"                 # 1/d
    haarint --group O --dim 3 "g[1,1]^4"               # 1/5
    haarint --group O --format json "g[1,1]^4"
    haarint --group O --format tsv --table-I 1,1,1,1,1,1,1,1,2,2
    haarint --group Sp --weingarten 2
    haarint --group O --dim 3 --verify "g[1,1]^4"
    haarint --group O --explain "g[1,1]*g[1,2]*g[2,1]*g[2,2]"

Symbolic ``--dim d`` (the default) gives results valid for every ``d >= n``;
an integer dimension evaluates exactly at that ``d``, dropping the
Weingarten terms that vanish when ``d < n``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import symfun, weingarten
from .combinatorics import partitions_of
from .integrator import MomentSpec, Trace, integrate_monomial
from .optimizer import list_class_counts
from .parsing import ParseError, parse_expression, render_monomial
from .ratfunc import ZERO, RationalFunction
from .weingarten import ResourceLimitError, build_table, normalize_dim, normalize_group

CACHE_ENV = "HAARINT_CACHE_DIR"


def _fmt_partition(lam) -> str:
    return "(" + ",".join(map(str, lam)) + ")"


def _fmt_value(value: RationalFunction, dim) -> str:
    if dim is not None:
        return str(value.constant_value())
    return str(value)


def _specs(poly, group: str):
    out = []
    for monomial, coeff in poly.items():
        if group != "U" and any(e.conj for e in monomial):
            raise ValueError(f"gc[i,j] is only allowed for group U (got {group})")
        out.append((monomial, Fraction(coeff), MomentSpec.from_entries(group, monomial)))
    return out


def integrate(args, out) -> int:
    group, dim = args.group, args.dim
    poly = parse_expression(args.expression, max_degree=4 * args.max_n)
    total = ZERO
    traces = []
    n = 0
    for monomial, coeff, spec in _specs(poly, group):
        trace = Trace()
        value = integrate_monomial(spec, dim, trace=trace, max_n=args.max_n)
        total = total + RationalFunction.constant(coeff) * value
        traces.append((monomial, coeff, spec, value, trace))
        if trace.strategy != "zero":
            n = max(n, spec.n)
    if args.format == "json":
        payload = {
            "group": group,
            "n": n,
            "dim": "d" if dim is None else dim,
            "numerator": list(total.num) or [0],
            "denominator": list(total.den),
        }
        print(json.dumps(payload), file=out)
    elif args.format == "tsv":
        print("expression\tvalue", file=out)
        print(f"{args.expression}\t{_fmt_value(total, dim)}", file=out)
    else:
        print(_fmt_value(total, dim), file=out)
    if args.explain:
        for monomial, coeff, spec, value, trace in traces:
            print(f"# {coeff} * {render_monomial(monomial)}", file=out)
            for line in trace.render().splitlines():
                print(f"#   {line}", file=out)
            print(f"#   value: {_fmt_value(value, dim)}", file=out)
    if args.verify:
        return verify(args, traces, total, out)
    return 0


def verify(args, traces, total, out) -> int:
    from .oracle import gram_inverse_weingarten, monte_carlo_moment

    dim = args.dim
    if dim is None:
        print("verify: needs an integer --dim", file=sys.stderr)
        return 2
    ok = True
    estimate = 0.0
    variance = 0.0
    for monomial, coeff, spec, value, trace in traces:
        if trace.strategy == "zero" or spec.n == 0:
            estimate += float(coeff) * float(value.constant_value())
            continue
        mean, se = monte_carlo_moment(spec, dim, args.samples, args.seed)
        estimate += float(coeff) * mean
        variance += float(coeff) ** 2 * se ** 2
        if spec.n <= 3:
            oracle = gram_inverse_weingarten(spec.group, spec.n, dim)
            same = oracle.values == build_table(spec.group, spec.n, dim).values
            ok &= same
            print(f"gram-inverse {spec.group} n={spec.n} d={dim}: {'agree' if same else 'DISAGREE'}", file=out)
    exact = float(total.constant_value())
    se = variance ** 0.5
    z = 0.0 if se == 0 else (estimate - exact) / se
    within = abs(z) <= 4 or (se == 0 and abs(estimate - exact) < 1e-12)
    ok &= within
    print(f"monte-carlo: exact={exact:.6g} estimate={estimate:.6g} se={se:.3g} z={z:+.2f} "
          f"({args.samples} samples, seed {args.seed}): {'ok' if within else 'FAIL'}", file=out)
    return 0 if ok else 1


def table_rows(lists, out, fmt: str) -> None:
    size = {len(I) for I in lists}
    if len(size) != 1 or size.pop() % 2:
        raise ValueError("all --table-I lists must have the same even length")
    n = len(lists[0]) // 2
    parts = partitions_of(n)
    rows = [(I, list_class_counts(I).row()) for I in lists]
    if fmt == "json":
        payload = [{"I": list(I), "counts": {_fmt_partition(p): c for p, c in zip(parts, row)}} for I, row in rows]
        print(json.dumps(payload), file=out)
        return
    sep = "\t" if fmt == "tsv" else "  "
    print(sep.join(["I"] + [_fmt_partition(p) for p in parts]), file=out)
    for I, row in rows:
        print(sep.join([_fmt_partition(I)] + [str(c) for c in row]), file=out)


def weingarten_table(args, out) -> None:
    table = build_table(args.group, args.weingarten, args.dim, max_n=args.max_n)
    if args.format == "json":
        payload = {
            "group": table.group,
            "n": table.n,
            "dim": "d" if table.dim is None else table.dim,
            "values": {
                _fmt_partition(lam): {"numerator": list(v.num) or [0], "denominator": list(v.den)}
                for lam, v in table.values.items()
            },
        }
        print(json.dumps(payload), file=out)
    elif args.format == "tsv":
        print("partition\tvalue", file=out)
        for lam, v in table.values.items():
            print(f"{_fmt_partition(lam)}\t{_fmt_value(v, table.dim)}", file=out)
    else:
        print(f"# {table.group} n={table.n} d={'d' if table.dim is None else table.dim}", file=out)
        for lam, v in table.values.items():
            print(f"{_fmt_partition(lam)}: {_fmt_value(v, table.dim)}", file=out)


def _parse_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated integer list: {text!r}")


def _parse_dim(text: str):
    try:
        return normalize_dim(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension must be 'd' or a positive integer, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="haarint",
        description="Exact Haar-measure moments over U(d), O(d) and Sp(2d).",
    )
    p.add_argument("expression", nargs="?", help='polynomial such as "g[1,1]^2*gc[2,2]"')
    p.add_argument("--group", default="U", type=normalize_group, help="U, O or Sp (default U)")
    p.add_argument("--dim", default=None, type=_parse_dim, help="'d' (symbolic, default) or an integer")
    p.add_argument("--format", default="text", choices=["text", "json", "tsv"])
    p.add_argument("--table-I", dest="table_I", action="append", type=_parse_list, metavar="LIST",
                   help="print C_I(λ) for this index list (repeatable)")
    p.add_argument("--weingarten", type=int, metavar="N", help="print the Weingarten table of degree N")
    p.add_argument("--verify", action="store_true", help="cross-check with the Gram-inverse and Monte Carlo oracles")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--explain", action="store_true", help="print the evaluation trace")
    p.add_argument("--cache-dir", default=None, help=f"table cache directory (default ${CACHE_ENV})")
    p.add_argument("--max-n", type=int, default=weingarten.DEFAULT_MAX_N)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    cache_dir = args.cache_dir or os.environ.get(CACHE_ENV)
    if cache_dir:
        symfun.load_tables(cache_dir)
        weingarten.load_saved_tables(cache_dir)
    try:
        if args.table_I:
            table_rows(args.table_I, out, args.format)
        elif args.weingarten is not None:
            weingarten_table(args, out)
        elif args.expression is not None:
            status = integrate(args, out)
            if status:
                return status
        else:
            parser.error("give an expression, --table-I or --weingarten")
    except ParseError as exc:
        print(f"haarint: parse error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"haarint: resource limit: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"haarint: error: {exc}", file=sys.stderr)
        return 2
    if cache_dir:
        symfun.write_tables(cache_dir)
        weingarten.save_tables(cache_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
