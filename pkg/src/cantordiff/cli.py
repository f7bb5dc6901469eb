"""Command-line frontend: exact-scalar parsing, JSON/CSV output, SVG rendering.

Every scalar in the JSON output carries its exact text form next to a
validated float enclosure.  Exit codes: 0 success, 2 parse error, 3 budget
exceeded (partial JSON still emitted), 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .cantor import (
    CantorPair,
    MiddleCantor,
    hausdorff_dim,
    in_omega,
    log_ratio,
    middle_pair,
    thickness,
    thickness_product,
)
from .errors import (
    BudgetExceededError,
    CantordiffError,
    InternalInvariantError,
    ParseError,
    PreconditionError,
    UndecidableError,
)
from .finitetype import (
    build_automaton,
    depth_counting_bound,
    hausdorff_dimension,
    is_finite_type,
)
from .fullinterval import IRRATIONAL, RationalRatio, analyze, is_full
from .ifs import coverage_at_depth, generate_ifs, attractor_membership
from .nonlinear import (
    CATALOG,
    LinkRange,
    certificate_smoke_gap,
    interval_certificate,
    regularly_linked,
    weak_stable_range,
)
from .renorm import build_recurrent_set, membership, verify_recurrence
from .render import render_interval_stack, render_plane_regions
from .scalars import FieldSpec, Scalar, format_scalar, parse_field, parse_scalar

SCHEMA = "cantordiff/1"


def _env_budget(default: int) -> int:
    raw = os.environ.get("CANTORDIFF_BUDGET")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"CANTORDIFF_BUDGET must be an integer, got {raw!r}") from exc


def scalar_json(x: Scalar) -> dict:
    lo, hi = x.float_enclosure(120)
    return {"exact": format_scalar(x), "lo": lo, "hi": hi}


def interval_json(iv) -> dict:
    return {"lo": scalar_json(iv.lo), "hi": scalar_json(iv.hi)}


def intervalset_json(s) -> list:
    return [interval_json(iv) for iv in s]


# -- pair configuration -------------------------------------------------------------


def parse_pair_config(text: str) -> tuple[CantorPair, FieldSpec | None]:
    """Key-value pair description: field (optional), alpha, beta.

    Accepts newline- or semicolon-separated ``key = value`` lines; '#' starts
    a comment.  Scalars round-trip exactly.
    """
    entries: dict[str, str] = {}
    for raw_line in text.replace(";", "\n").splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"bad config line {raw_line!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key == "field":
            # field declarations contain '=' themselves
            value = line.split("=", 1)[1]
        entries[key] = value.strip()
    field = parse_field(entries["field"]) if "field" in entries else None
    try:
        alpha = parse_scalar(entries["alpha"], field)
        beta = parse_scalar(entries["beta"], field)
    except KeyError as exc:
        raise ParseError(f"pair config needs alpha and beta: missing {exc}") from exc
    return middle_pair(alpha, beta), field


def load_pair(arg: str) -> tuple[CantorPair, FieldSpec | None]:
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return parse_pair_config(fh.read())
    if "=" in arg:
        return parse_pair_config(arg)
    raise ParseError(f"pair config {arg!r} is neither a file nor inline key=value text")


def _pair_json(pair: CantorPair) -> dict:
    return {
        "alpha": scalar_json(pair.first.alpha),
        "beta": scalar_json(pair.second.alpha),
    }


# -- subcommands -------------------------------------------------------------------


def cmd_ifs(args) -> dict:
    pair, _ = load_pair(args.pair)
    field = pair.field()
    lam = parse_scalar(args.lam, field)
    ifs = generate_ifs(pair, lam)
    return {
        "schema": SCHEMA,
        "command": "ifs",
        "pair": _pair_json(pair),
        "lambda": scalar_json(lam),
        "ratio": scalar_json(ifs.ratio),
        "n0": ifs.provenance.n0,
        "m0": ifs.provenance.m0,
        "hull": interval_json(ifs.hull),
        "map_count": len(ifs),
        "maps": [
            {"ratio": scalar_json(m.ratio), "offset": scalar_json(m.offset)}
            for m in ifs.maps
        ],
        "expanding_offsets": [scalar_json(x) for x in ifs.expanding_offsets_desc()],
    }


def cmd_cover(args) -> dict:
    pair, _ = load_pair(args.pair)
    lam = parse_scalar(args.lam, pair.field())
    ifs = generate_ifs(pair, lam)
    budget = _env_budget(args.budget)
    report = coverage_at_depth(ifs, args.depth, budget)
    return {
        "schema": SCHEMA,
        "command": "cover",
        "pair": _pair_json(pair),
        "lambda": scalar_json(lam),
        "depth": report.depth,
        "covered": report.covered,
        "class_count": report.class_count,
        "gaps": intervalset_json(report.gaps),
    }


def cmd_member(args) -> dict:
    pair, _ = load_pair(args.pair)
    field = pair.field()
    t = parse_scalar(args.t, field)
    s = parse_scalar(args.s, field)
    budget = _env_budget(args.budget)
    verdict = membership(t, s, pair, budget)
    out = {
        "schema": SCHEMA,
        "command": "member",
        "pair": _pair_json(pair),
        "t": scalar_json(t),
        "s": scalar_json(s),
        "verdict": verdict.kind,
        "nodes": verdict.nodes,
    }
    if verdict.kind == "in":
        out["witness_word"] = list(verdict.witness or ())
    if verdict.kind == "out":
        out["escape_depth"] = verdict.depth
    return out


def _ratio_declaration(args, field):
    if getattr(args, "ratio", None) is None:
        return None
    if args.ratio == "irrational":
        return IRRATIONAL
    try:
        n0_s, m0_s, gamma_s = args.ratio.split(":")
        return RationalRatio(int(n0_s), int(m0_s), parse_scalar(gamma_s, field))
    except ValueError as exc:
        raise ParseError(
            f"--ratio must be n0:m0:gamma or 'irrational', got {args.ratio!r}"
        ) from exc


def cmd_full(args) -> dict:
    pair, field = load_pair(args.pair)
    declared = _ratio_declaration(args, field or pair.field())
    if args.sweep:
        return _full_sweep(args, pair, field, declared)
    lam = parse_scalar(args.lam, field or pair.field())
    verdict = is_full(pair, lam, declared)
    out = {
        "schema": SCHEMA,
        "command": "full",
        "pair": _pair_json(pair),
        "lambda": scalar_json(lam),
        "full": verdict.full,
        "case": verdict.case,
        "detail": verdict.detail,
    }
    one = Scalar.rational(1)
    if thickness_product(pair) < one:
        try:
            analysis = analyze(pair, declared)
            out["lambda_set"] = intervalset_json(analysis.Lambda)
            out["s1"] = scalar_json(analysis.s1)
            out["s0"] = scalar_json(analysis.s0)
        except PreconditionError:
            pass
    return out


def _full_sweep(args, pair, field, declared) -> dict:
    try:
        a_s, b_s, count_s = args.sweep.split(":")
        lo = parse_scalar(a_s, field or pair.field())
        hi = parse_scalar(b_s, field or pair.field())
        count = int(count_s)
    except ValueError as exc:
        raise ParseError(f"--sweep must be a:b:count, got {args.sweep!r}") from exc
    if count < 2:
        raise ParseError("sweep needs at least 2 samples")
    rows = sweep_rows(pair, lo, hi, count, declared)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda", "verdict", "class_count", "dim_low", "dim_high"])
    for row in rows:
        writer.writerow(row)
    return {"csv": buf.getvalue()}


def sweep_rows(pair, lo, hi, count, declared=None):
    """Per-slope verdicts; budget failures are recorded in-row."""
    step = (hi - lo) / Scalar.rational(count - 1)
    rows = []
    for k in range(count):
        lam = lo + step * Scalar.rational(k)
        if lam.sign() == 0:
            rows.append([format_scalar(lam), "skipped-zero", "", "", ""])
            continue
        try:
            verdict = is_full(pair, lam, declared)
            label = "full" if verdict.full else "not-full"
        except (PreconditionError, UndecidableError) as exc:
            label = f"error: {exc}"
        counts = ""
        dim_lo = dim_hi = ""
        try:
            ifs = generate_ifs(pair, lam)
            counts = "|".join(
                str(depth_counting_bound(ifs, n, enumeration_budget=100_000).k_n)
                for n in (1, 2, 3, 4)
            )
            if is_finite_type(ifs) is not None:
                dim = hausdorff_dimension(ifs, state_budget=256)
                dim_lo, dim_hi = repr(dim.hdim_lo), repr(dim.hdim_hi)
        except (BudgetExceededError, PreconditionError) as exc:
            counts = counts or f"error: {exc}"
        rows.append([format_scalar(lam), label, counts, dim_lo, dim_hi])
    return rows


def cmd_dim(args) -> dict:
    pair, _ = load_pair(args.pair)
    lam = parse_scalar(args.lam, pair.field())
    ifs = generate_ifs(pair, lam)
    budget = _env_budget(args.budget)
    cert = is_finite_type(ifs)
    automaton = build_automaton(ifs, budget)
    dim = hausdorff_dimension(ifs, automaton)
    out = {
        "schema": SCHEMA,
        "command": "dim",
        "pair": _pair_json(pair),
        "lambda": scalar_json(lam),
        "finite_type": None
        if cert is None
        else {"kind": cert.kind, "k": cert.k, "description": cert.description},
        "state_count": automaton.state_count,
        "spectral_radius": {"lo": dim.spectral_lo, "hi": dim.spectral_hi},
        "hdim": {"lo": dim.hdim_lo, "hi": dim.hdim_hi},
        "box_dim_equals_hdim": True,
        "char_poly": list(dim.char_poly) if dim.char_poly else None,
    }
    if args.emit:
        payload = {
            "schema": SCHEMA,
            "states": [
                [format_scalar(o) for o in st.offsets] for st in automaton.states
            ],
            "matrix": automaton.matrix,
            "start_vector": automaton.start_vector,
        }
        with open(args.emit, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        out["emitted"] = args.emit
    return out


def cmd_recur(args) -> dict:
    pair, _ = load_pair(args.pair)
    region = build_recurrent_set(pair)
    report = verify_recurrence(region, pair, grid=args.grid)
    out = {
        "schema": SCHEMA,
        "command": "recur",
        "pair": _pair_json(pair),
        "region": {
            "s_min": scalar_json(region.s_min),
            "s_max": scalar_json(region.s_max),
            "eps": scalar_json(region.eps),
            "delta": scalar_json(region.delta),
            "s0": scalar_json(region.s0),
        },
        "grid": report.grid,
        "verified_points": report.points,
        "max_steps": report.max_steps,
        "failures": len(report.failures),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(render_plane_regions(region))
        out["rendered"] = args.out
    return out


_EXAMPLES = {
    "sq-sum": {
        "f": "neg_square",
        "g": "square",
        "base": (((1,), (0,)), ((0,), (1,))),
        "range": ("-51/100", "-49/100"),
    },
    "sincos": {
        "f": "sin",
        "g": "neg_cos",
        "base": (((0,), (1,)), ((0,), (1,))),
        "range": ("17/50", "9/25"),
    },
    "sqrt": {
        "f": "sqrt",
        "g": "sqrt",
        "base": (((1, 1, 0), (1,)), ((), (1,))),
        "range": ("978/1000", "979/1000"),
    },
}


def default_pair_for_example(example: str) -> CantorPair:
    if example == "sqrt":
        field = parse_field("g^2=g+1")
        g = field.generator()
        return middle_pair(g**-3, g**-2)
    third = Scalar.rational(Fraction(1, 3))
    return middle_pair(third, third)


def cmd_nonlinear(args) -> dict:
    spec = _EXAMPLES[args.example]
    pair = default_pair_for_example(args.example) if args.pair is None else load_pair(args.pair)[0]
    field = pair.field()
    rng = LinkRange(
        parse_scalar(spec["range"][0], field), parse_scalar(spec["range"][1], field)
    )
    cert = interval_certificate(
        CATALOG[spec["f"]], CATALOG[spec["g"]], pair, spec["base"], rng
    )
    gap, modulus = certificate_smoke_gap(cert, pair)
    return {
        "schema": SCHEMA,
        "command": "nonlinear",
        "example": args.example,
        "f": cert.f.name,
        "g": cert.g.name,
        "base": {"x": scalar_json(cert.base_x), "y": scalar_json(cert.base_y)},
        "digit_words": {"x": list(cert.x_digits), "y": list(cert.y_digits)},
        "depth": cert.depth,
        "range": {"m1": scalar_json(rng.m1), "m2": scalar_json(rng.m2)},
        "ratio_bounds": {
            "lo": float(cert.ratio_bounds[0]),
            "hi": float(cert.ratio_bounds[1]),
        },
        "verdict": cert.verdict,
        "smoke_gap": gap,
        "smoke_modulus": modulus,
    }


def cmd_linked(args) -> dict:
    pair, field = load_pair(args.pair)
    try:
        a_s, b_s = args.range.split(":")
    except ValueError as exc:
        raise ParseError(f"--range must be m1:m2, got {args.range!r}") from exc
    fld = field or pair.field()
    rng = LinkRange(parse_scalar(a_s, fld), parse_scalar(b_s, fld))
    report = regularly_linked(pair, rng)
    return {
        "schema": SCHEMA,
        "command": "linked",
        "pair": _pair_json(pair),
        "range": {"m1": scalar_json(rng.m1), "m2": scalar_json(rng.m2)},
        "linked": report.linked,
        "crossings": [scalar_json(c) for c in report.crossings],
        "failure": report.failure,
    }


def cmd_sweep(args) -> dict:
    pair, field = load_pair(args.pair)
    declared = _ratio_declaration(args, field or pair.field())
    try:
        a_s, b_s, count_s = args.range.split(":")
        lo = parse_scalar(a_s, field or pair.field())
        hi = parse_scalar(b_s, field or pair.field())
        count = int(count_s)
    except ValueError as exc:
        raise ParseError(f"range must be a:b:count, got {args.range!r}") from exc
    if count < 2:
        raise ParseError("sweep needs at least 2 samples")
    rows = sweep_rows(pair, lo, hi, count, declared)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda", "verdict", "class_count", "dim_low", "dim_high"])
    for row in rows:
        writer.writerow(row)
    return {"csv": buf.getvalue()}


def cmd_render(args) -> dict:
    pair, _ = load_pair(args.pair)
    lam = parse_scalar(args.lam, pair.field())
    ifs = generate_ifs(pair, lam)
    svg = render_interval_stack(ifs, args.depth, _env_budget(args.budget))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    return {
        "schema": SCHEMA,
        "command": "render",
        "out": args.out,
        "depth": args.depth,
        "bytes": len(svg.encode()),
    }


def cmd_diag(args) -> dict:
    pair, _ = load_pair(args.pair)
    tau = thickness_product(pair)
    hd_a = hausdorff_dim(pair.first)
    hd_b = hausdorff_dim(pair.second)
    return {
        "schema": SCHEMA,
        "command": "diag",
        "pair": _pair_json(pair),
        "thickness_first": scalar_json(thickness(pair.first)),
        "thickness_second": scalar_json(thickness(pair.second)),
        "thickness_product": scalar_json(tau),
        "hdim_first": {"lo": hd_a[0], "hi": hd_a[1]},
        "hdim_second": {"lo": hd_b[0], "hi": hd_b[1]},
        "hdim_sum": {"lo": hd_a[0] + hd_b[0], "hi": hd_a[1] + hd_b[1]},
        "in_omega": in_omega(pair),
        "log_ratio": log_ratio(pair),
    }


# -- driver -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantordiff",
        description="Exact analysis of arithmetic differences of middle Cantor sets",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pair(p):
        p.add_argument("--pair", required=True, help="config file or inline key=value text")

    p = sub.add_parser("ifs", help="emit the difference contraction system")
    add_pair(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.set_defaults(fn=cmd_ifs)

    p = sub.add_parser("cover", help="depth-n coverage report with exact gaps")
    add_pair(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("member", help="operator-orbit membership verdict")
    add_pair(p)
    p.add_argument("--t", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--budget", type=int, default=20_000)
    p.set_defaults(fn=cmd_member)

    p = sub.add_parser("full", help="closed-form full-interval decision")
    add_pair(p)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--ratio", help="n0:m0:gamma or 'irrational'")
    p.add_argument("--sweep", help="a:b:count for a CSV sweep")
    p.set_defaults(fn=cmd_full)

    p = sub.add_parser("dim", help="finite-type automaton and Hausdorff dimension")
    add_pair(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--emit", help="write the automaton as JSON to this path")
    p.set_defaults(fn=cmd_dim)

    p = sub.add_parser("recur", help="build and verify a recurrent set")
    add_pair(p)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--out", help="write an SVG of the plane regions")
    p.set_defaults(fn=cmd_recur)

    p = sub.add_parser("nonlinear", help="interval certificate for a catalog example")
    p.add_argument("--example", choices=sorted(_EXAMPLES), required=True)
    p.add_argument("--pair", help="override the example's default pair")
    p.set_defaults(fn=cmd_nonlinear)

    p = sub.add_parser("linked", help="regular-linking decision over a slope range")
    add_pair(p)
    p.add_argument("--range", required=True, help="m1:m2")
    p.set_defaults(fn=cmd_linked)

    p = sub.add_parser("sweep", help="CSV sweep of verdicts over a slope range")
    add_pair(p)
    p.add_argument("--range", required=True, help="a:b:count")
    p.add_argument("--ratio", help="n0:m0:gamma or 'irrational'")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("render", help="deterministic SVG of depth-n interval stacks")
    add_pair(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, default=200_000)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("diag", help="pair diagnostics: thickness, dimensions, Omega")
    add_pair(p)
    p.set_defaults(fn=cmd_diag)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.fn(args)
    except (ParseError,) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc), "partial": True}))
        return 3
    except (InternalInvariantError,) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 4
    except (PreconditionError, UndecidableError, CantordiffError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 2
    if "csv" in result:
        sys.stdout.write(result["csv"])
    else:
        print(json.dumps(result, indent=1, sort_keys=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())
