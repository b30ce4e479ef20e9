"""Command-line entry point.

Exit codes: 0 completed, 2 non-tile certified, 3 inconclusive, 4 input error.
Machine-readable lines start with ``#RESULT``.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from . import binpack, farkas, ideal, lpmodel, oracle
from .exactlp import CapExceeded, decide_tiling_lp, to_dual_certificate
from .gf2core import Region, format_region, read_region

EXIT_OK = 0
EXIT_NONTILE = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT = 4

# bundled certificates: name -> (data file, k of the region it refers to)
PUBLISHED_CERTS = {"first": ("cert_first.txt", 6), "third": ("cert_third.txt", 8)}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def data_text(name: str) -> str:
    return resources.files("f2tiling").joinpath("data", name).read_text()


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _region(args) -> Region:
    if getattr(args, "k", None) is not None:
        return ideal.table1_region(args.k)
    if getattr(args, "region", None):
        return read_region(_read(args.region))
    raise InputError("give --region <file> or --k <row>")


def _add_region(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--region", help="region file (header n=<dim>, one support per line)")
    g.add_argument("--k", type=int, help="use a built-in putative tile by its k")


def _result(**fields) -> str:
    return "#RESULT " + " ".join(f"{k}={v}" for k, v in fields.items())


# -- subcommands -------------------------------------------------------------------

def cmd_ideal(args) -> int:
    if args.k is not None:
        V = ideal.table1_region(args.k)
    else:
        n, gens = ideal.read_generators(_read(args.gen))
        V = ideal.to_region(ideal.ideal_from_generators(gens, n))
    text = format_region(V)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_result(n=V.n, size=V.size, span_dim=V.span_dim))
    return EXIT_OK


def _census_record(V, r):
    c = binpack.piece_census(V, binpack.Projection.tail(V.n, r))
    return {"r": r, "binSize": c.bin_size, "census": {str(s): m for s, m in c.counts.items()}}, c


def cmd_census(args) -> int:
    V = _region(args)
    rs = range(1, V.n) if args.sweep else [args.r]
    if not args.sweep and args.r is None:
        raise InputError("give --r <r> or --sweep")
    for r in rs:
        if not 0 <= r <= V.n:
            raise InputError(f"r must lie in 0..{V.n}")
        rec, c = _census_record(V, r)
        print(f"r={r} bin size={c.bin_size} census: {c}")
        print("#RESULT " + json.dumps({"k": args.k, **rec}, sort_keys=True))
    return EXIT_OK


def _one_projection(job):
    V, r, k, cap = job
    return binpack.non_tiling_by_projection(V, r, k, cap)


def cmd_binpack(args) -> int:
    V = _region(args)
    if args.sweep:
        rs = [r for r in range(1, V.n) if (1 << r) <= binpack.MAX_BIN_SIZE]
    elif args.r is not None:
        rs = [args.r]
    else:
        raise InputError("give --r <r> or --sweep")
    jobs = [(V, r, args.k, args.cap) for r in rs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_one_projection, jobs))
    else:
        reports = [_one_projection(j) for j in jobs]
    for rep in reports:
        print(rep.text())
        print("#RESULT " + json.dumps(rep.record(), sort_keys=True))
    if any(rep.verdict.infeasible for rep in reports):
        return EXIT_NONTILE
    return EXIT_INCONCLUSIVE


def cmd_lp_export(args) -> int:
    V = _region(args)
    opts = lpmodel.LpBuildOptions(
        use_butterfly=not args.no_butterfly,
        use_pass_through=not (args.no_passthrough or args.no_butterfly),
        full_rank=args.full_rank,
        halving_equation=args.halving,
        integer_markers=args.integer_markers,
    )
    model = lpmodel.build_primal(V, opts)
    text = lpmodel.export_lp(model, args.format)
    with open(args.out, "w") as fh:
        fh.write(text)
    print(lpmodel.stats_line(model))
    return EXIT_OK


def _load_cert(args, n):
    if args.published:
        return farkas.parse_certificate(data_text(PUBLISHED_CERTS[args.published][0]), n=n)
    return farkas.parse_certificate(_read(args.cert), n=n)


def cmd_verify_cert(args) -> int:
    if args.published and args.region is None and args.k is None:
        V = ideal.table1_region(PUBLISHED_CERTS[args.published][1])
    else:
        V = _region(args)
    cert = _load_cert(args, V.n)
    conventions = farkas.CONVENTIONS if args.convention == "auto" else (args.convention,)
    layouts = farkas.LAYOUTS if args.layout == "auto" else (args.layout,)
    verdicts = farkas.verify_auto(V, cert, conventions, layouts)
    for v in verdicts:
        print(v.summary())
        for note in v.notes:
            print(f"  note: {note}")
        print(_result(status=v.status, convention=v.convention, layout=v.layout, btz=v.btz))
    return EXIT_NONTILE if any(v.valid for v in verdicts) else EXIT_INCONCLUSIVE


def cmd_solve_small(args) -> int:
    V = _region(args)
    try:
        res, ts = decide_tiling_lp(V)
    except CapExceeded as exc:
        print(f"too large for the exact solver: {exc}")
        print(_result(status="CAP"))
        return EXIT_INCONCLUSIVE
    if res.feasible:
        print("LP relaxation feasible: no certificate of non-tiling")
        print(_result(status="FEASIBLE", pivots=res.pivots))
        return EXIT_INCONCLUSIVE
    cert = to_dual_certificate(res.dual, ts)
    text = farkas.format_certificate(cert)
    if args.cert_out:
        with open(args.cert_out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    verdict = farkas.verify_certificate(V, farkas.parse_certificate(text, n=V.n))
    print(verdict.summary())
    print(_result(status="INFEASIBLE", pivots=res.pivots, certificate=verdict.status))
    return EXIT_NONTILE if verdict.valid else EXIT_INCONCLUSIVE


def cmd_oracle(args) -> int:
    V = _region(args)
    try:
        A = oracle.find_complement(V, args.cap)
    except oracle.SearchLimitReached as exc:
        print(f"unknown: {exc}")
        print(_result(status="UNKNOWN"))
        return EXIT_INCONCLUSIVE
    if A is None:
        print("no complement exists: V is not a tile")
        print(_result(status="NONTILE"))
        return EXIT_NONTILE
    sys.stdout.write(format_region(A))
    print(_result(status="TILE", complement_size=A.size,
                  classification=oracle.classify_full_rank(V, A)))
    return EXIT_OK


def cmd_report(args) -> int:
    print("== putative tiles ==")
    for k, (n, gens) in ideal.PUTATIVE_TILES.items():
        S = ideal.ideal_from_generators(gens, n)
        sizes = {}
        for s in S.sets:
            sizes[len(s)] = sizes.get(len(s), 0) + 1
        gtxt = " ".join("{" + ",".join(map(str, g)) + "}" for g in gens)
        print(f"k={k} n={n} generators={gtxt} size={len(S)} by cardinality={dict(sorted(sizes.items()))}")
        print(_result(k=k, n=n, size=len(S)))
    print("== projections ==")
    for k, (r, c, _) in binpack.REFERENCE_CENSUSES.items():
        rep = binpack.non_tiling_by_projection(ideal.table1_region(k), r, k)
        print(f"k={k} r={r} bin size={rep.bin_size} census: {rep.census} -> {rep.verdict.status}")
        print("#RESULT " + json.dumps(rep.record(), sort_keys=True))
    print("== bundled certificates ==")
    for name, (fname, k) in PUBLISHED_CERTS.items():
        V = ideal.table1_region(k)
        cert = farkas.parse_certificate(data_text(fname), n=V.n)
        for v in farkas.verify_auto(V, cert):
            print(f"{name} (k={k}): {v.summary()}")
            print(_result(cert=name, status=v.status, convention=v.convention,
                          layout=v.layout, btz=v.btz))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="f2tiling", description="Non-tiling criteria for subsets of F_2^n.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("ideal", help="emit the region of an order ideal")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--gen", help="generator file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_ideal)

    s = sub.add_parser("census", help="piece census of a coordinate projection")
    _add_region(s)
    s.add_argument("--r", type=int, help="keep coordinates r..n-1")
    s.add_argument("--sweep", action="store_true")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("binpack", help="projection criterion verdicts")
    _add_region(s)
    s.add_argument("--r", type=int)
    s.add_argument("--sweep", action="store_true")
    s.add_argument("--cap", type=int, default=binpack.NODE_CAP, help="branch-and-bound node cap")
    s.add_argument("--jobs", type=int, default=1, help="worker processes for --sweep")
    s.set_defaults(func=cmd_binpack)

    s = sub.add_parser("lp-export", help="write the primal LP and print its size")
    _add_region(s)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("lp", "mps"), default="lp")
    s.add_argument("--full-rank", action="store_true")
    s.add_argument("--no-butterfly", action="store_true")
    s.add_argument("--no-passthrough", action="store_true")
    s.add_argument("--halving", action="store_true", help="add the sum equation")
    s.add_argument("--integer-markers", action="store_true")
    s.set_defaults(func=cmd_lp_export)

    s = sub.add_parser("verify-cert", help="verify a non-tiling certificate")
    _add_region(s, required=False)
    c = s.add_mutually_exclusive_group(required=True)
    c.add_argument("--cert")
    c.add_argument("--published", choices=sorted(PUBLISHED_CERTS))
    s.add_argument("--convention", choices=("auto",) + farkas.CONVENTIONS, default="auto")
    s.add_argument("--layout", choices=("auto",) + farkas.LAYOUTS, default="auto")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("solve-small", help="exact LP; emit a certificate when infeasible")
    _add_region(s)
    s.add_argument("--cert-out")
    s.set_defaults(func=cmd_solve_small)

    s = sub.add_parser("oracle", help="exhaustive complement search")
    _add_region(s)
    s.add_argument("--cap", type=int, default=None, help="node cap")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("report", help="reproduce the reference tables")
    s.add_argument("--all-rows", action="store_true", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
