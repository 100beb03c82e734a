"""Command-line front end.

Exit codes: 0 success, 1 failed verdict, 2 usage or input error,
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import io as fmt
from .closure import decompose, dense_witnesses
from .compactgen import compactgen_R, compactgen_Rm, compactgen_Romega, verify_certificate
from .errors import BudgetExceeded, EucGroupsError, FileFormatError, ScalarSyntaxError
from .generic import LineSpec, density_report, extend_discrete, make_generic
from .groups import format_vector
from .intersect import intersect_subspace

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

STATEMENTS = {
    "closure": "The closure of a finitely generated subgroup G of R^m is V0 + L, where V0 is a linear "
    "subspace spanned by arbitrarily short elements of G and L is a lattice; every element of G "
    "of norm below eps0 lies in V0.",
    "compactgen": "A countable subgroup of R or of R^m is generated by {0}, a finite set and a sequence "
    "tending to 0. The same holds for a subgroup of R^omega whose elements have bounded finite "
    "support, with generators built stage by stage on coordinate prefixes.",
    "intersect": "For G = span_Z of points in general position and a subspace V of R^N, G ∩ V is "
    "free of rank at most dim V and discrete. Any finitely generated G is accepted here; "
    "discreteness is then computed, not assumed.",
    "generic": "Points with algebraically independent coordinates generate a dense subgroup of the "
    "plane meeting each line through 0 in a cyclic group and each affine line in a coset of one.",
    "extend": "A linearly discrete group G missing a line L0 through 0 extends to G + Zp with p on L0, "
    "still linearly discrete and meeting every old line exactly as G did.",
    "verify": "Independent check of a compact-generation certificate: membership, norm bounds, "
    "decay of the bounds, and generation of every input generator.",
    "density": "Density is checked empirically only: the distance from each target to the elements "
    "of G with coefficients bounded by K.",
}


class _StatementAction(argparse.Action):
    def __init__(self, option_strings, dest, command=None, **kwargs):
        self.command = command
        super().__init__(option_strings, dest, nargs=0, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        print(f"{self.command}: {STATEMENTS[self.command]}")
        parser.exit(EXIT_OK)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _lines(header: str, vectors, indent="  ") -> list[str]:
    if not vectors:
        return [f"{header}: none"]
    return [f"{header}:"] + [indent + format_vector(v) for v in vectors]


def _eps(q: Fraction) -> str:
    return f"{q} (~{float(q):.6g})"


# -- subcommands -------------------------------------------------------------------------------

def cmd_closure(args) -> int:
    gd = fmt.load_group(args.group)
    G = gd.group
    d = decompose(G)
    out = [f"group: R^{G.ambient}, {len(G.generators)} generators, abstract rank {G.rank} ({G.tier} tier)"]
    out += _lines(f"dense part V0 (dim {d.dim_V0})", d.V0_basis)
    out += _lines("lattice part F", d.F)
    out.append(f"eps0 = {_eps(d.epsilon0)}" + ("" if d.epsilon0_exact else " [certified lower bound]"))
    w = None
    if d.dim_V0 and args.stages:
        w = dense_witnesses(d, args.stages)
        for n, (eps, B, K) in enumerate(zip(w.epsilons, w.B, w.K_used)):
            out.append(f"stage {n}: norm < {float(eps):.3g} [K={K}]: " + ", ".join(format_vector(v) for v in B))
    print("\n".join(out))
    if args.out:
        _write(fmt.dumps(fmt.closure_json(d, w)), args.out)
    return EXIT_OK


def cmd_compactgen(args) -> int:
    gd = fmt.load_group(args.group)
    if gd.space == "R^omega":
        cert = compactgen_Romega(gd.group, args.stages, support=gd.support)
    elif gd.ambient == 1:
        source = gd.stream if gd.stream is not None else gd.group
        cert = compactgen_R(source, args.stages if args.stages is not None else 8)
    else:
        cert = compactgen_Rm(gd.group, args.stages if args.stages is not None else 8)
    text = fmt.dumps_certificate(cert)
    if args.out:
        _write(text, args.out)
        print(f"method {cert.method}: {len(cert.finite_part)} finite elements, {len(cert.null_sequence)} null-sequence elements")
        for e in cert.finite_part:
            print(f"  finite {format_vector(e.vector)}")
        print(f"certificate written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_intersect(args) -> int:
    gd = fmt.load_group(args.group)
    V = fmt.load_subspace(args.subspace, gd.constants)
    res = intersect_subspace(gd.group, V)
    out = [f"G ∩ V ({res.provenance}): rank {res.rank}, dim V = {V.dimension}"]
    out += _lines("generators", res.generators)
    out.append("trace: " + ", ".join(f"k{t.level}={t.k}" for t in res.trace))
    out.append(f"Q = {list(res.Q)}")
    out.append(res.verdict.describe())
    print("\n".join(out))
    if args.out:
        _write(fmt.dumps(fmt.intersection_json(res)), args.out)
    return EXIT_OK


def cmd_generic(args) -> int:
    if args.points < 1 or args.ambient < 1:
        print("error: --points and --ambient must be positive", file=sys.stderr)
        return EXIT_USAGE
    gg = make_generic(args.points, args.ambient, seed=args.seed)
    doc = fmt.group_json(gg.group, gg.constants, fresh_seed={n: args.seed for n in gg.minted})
    _write(fmt.dumps(doc), args.out)
    if args.out:
        print(f"generic group with {args.points} points in R^{args.ambient} written to {args.out}")
    return EXIT_OK


def _parse_direction(text: str, gd) -> tuple:
    parts = [p for p in text.split(",")]
    if len(parts) != gd.ambient:
        raise FileFormatError(f"--line needs {gd.ambient} comma-separated coordinates", "--line")
    try:
        return tuple(gd.constants.parse(p.strip()) for p in parts)
    except ScalarSyntaxError as exc:
        raise FileFormatError(f"bad coordinate in --line: {exc}", "--line") from None


def cmd_extend(args) -> int:
    gd = fmt.load_group(args.group)
    d = _parse_direction(args.line, gd)
    checks = [LineSpec(_parse_direction(c, gd)) for c in args.check_line]
    ext = extend_discrete(gd.group, d, gd.constants, seed=args.seed, lines=checks)
    print(f"p = {format_vector(ext.p)} with fresh constant {ext.constant.name}")
    for L, gens, ok in ext.checks:
        print(f"  line {format_vector(L.direction)}: G' ∩ L generated by {[format_vector(g) for g in gens]}, {'unchanged' if ok else 'CHANGED'}")
    if args.out:
        used = list(gd.constants)
        _write(fmt.dumps(fmt.group_json(ext.group, used, fresh_seed={ext.constant.name: args.seed})), args.out)
        print(f"extended group written to {args.out}")
    return EXIT_OK if ext.conservative else EXIT_VERDICT


def cmd_verify(args) -> int:
    if len(args.files) == 1:
        group_path, cert_path = None, args.files[0]
    elif len(args.files) == 2:
        group_path, cert_path = args.files
    else:
        print("error: verify takes [GROUP] CERTIFICATE", file=sys.stderr)
        return EXIT_USAGE
    verdict = fmt.verify_certificate_file(cert_path, group_path)
    print(verdict.summary())
    for f in verdict.failures[1:]:
        print(f"  also: {f}")
    return EXIT_OK if verdict else EXIT_VERDICT


def cmd_density(args) -> int:
    gd = fmt.load_group(args.group)
    targets = fmt.load_targets(args.targets, gd.ambient)
    try:
        delta = Fraction(args.delta)
    except (ValueError, ZeroDivisionError):
        raise FileFormatError(f"bad --delta {args.delta!r}", "--delta") from None
    if delta <= 0 or args.box < 0:
        print("error: --delta must be positive and --box non-negative", file=sys.stderr)
        return EXIT_USAGE
    rep = density_report(gd.group, targets, delta, args.box)
    for r in rep.rows:
        flag = "  FLAGGED" if r.flagged else ""
        print(f"target ({', '.join(map(str, r.target))}): distance {float(r.distance):.3e} via {format_vector(r.element)}{flag}")
    print(f"{sum(r.flagged for r in rep.rows)} of {len(rep.rows)} targets farther than {args.delta} (box K={args.box})")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            rep.to_csv(fh)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eucgroups", description="Exact computations with countable subgroups of Euclidean space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--statement", action=_StatementAction, command=name, help="print the statement this command implements and exit")
        p.add_argument("--seed", type=int, default=0, help="seed for fresh constants (default 0)")
        p.set_defaults(func=func)
        return p

    p = add("closure", cmd_closure, "closure decomposition V0 + lattice")
    p.add_argument("group")
    p.add_argument("--stages", type=int, default=4, help="dense-witness stages to report")
    p.add_argument("--out", help="write a JSON report")

    p = add("compactgen", cmd_compactgen, "compact generating sequence certificate")
    p.add_argument("group")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--out", help="certificate path (default: standard output)")

    p = add("intersect", cmd_intersect, "intersection with a linear subspace")
    p.add_argument("group")
    p.add_argument("subspace")
    p.add_argument("--out", help="write a JSON report")

    p = add("generic", cmd_generic, "group generated by points with fresh coordinates")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--ambient", type=int, required=True)
    p.add_argument("--out", help="group file path (default: standard output)")

    p = add("extend", cmd_extend, "extend a group by a fresh point on a missed line")
    p.add_argument("group")
    p.add_argument("--line", required=True, help="direction, comma-separated scalars")
    p.add_argument("--check-line", action="append", default=[], help="line to re-check (repeatable)")
    p.add_argument("--out", help="write the extended group file")

    p = add("verify", cmd_verify, "verify a certificate")
    p.add_argument("files", nargs="+", metavar="[GROUP] CERTIFICATE")

    p = add("density", cmd_density, "distances from targets to group elements in a coefficient box")
    p.add_argument("group")
    p.add_argument("--targets", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--box", type=int, required=True)
    p.add_argument("--csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileFormatError, ScalarSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EucGroupsError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
