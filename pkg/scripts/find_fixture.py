"""Scan downward-closed size-8 regions of F_2^6 for a non-tile with an
infeasible relaxed LP, and print the first one found.

Regions closed under the right-shifted order are tried first; if every one of
them tiles, the scan moves on to regions closed under taking subsets of
supports (v in V and w & v == w implies w in V).
"""

import argparse
import time

from f2tiling.exactlp import decide_tiling_lp, to_dual_certificate
from f2tiling.farkas import format_certificate, parse_certificate, verify_certificate
from f2tiling.gf2core import Region, format_region
from f2tiling.ideal import enumerate_ideals, to_region
from f2tiling.oracle import find_complement


def subset_closed_regions(n, size):
    """All subset-closed families of words with the given size, in a fixed order."""
    level = {frozenset([0])}
    for _ in range(size - 1):
        nxt = set()
        for fam in level:
            for w in range(1 << n):
                if w in fam:
                    continue
                if all((w & ~(1 << i)) in fam for i in range(n) if (w >> i) & 1):
                    nxt.add(fam | {w})
        level = nxt
    return sorted(level, key=sorted)


def candidates(n, size):
    for S in enumerate_ideals(n, size):
        yield "right-shifted ideal", to_region(S)
    for fam in subset_closed_regions(n, size):
        yield "subset-closed", Region(n, fam)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--size", type=int, default=8)
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    scanned = nontiles = 0
    for family, V in candidates(args.n, args.size):
        scanned += 1
        if find_complement(V) is not None:
            continue
        nontiles += 1
        res, ts = decide_tiling_lp(V)
        if res.feasible:
            continue
        cert = parse_certificate(format_certificate(to_dual_certificate(res.dual, ts)), n=V.n)
        verdict = verify_certificate(V, cert)
        print(f"# first hit after {scanned} regions ({nontiles} non-tiles), family: {family}")
        print(f"# members: {sorted(V.members)}")
        print(f"# certificate: {verdict.summary()}")
        print(format_region(V))
        print(f"# {time.perf_counter() - t0:.2f}s")
        return 0
    print(f"no hit among {scanned} regions ({nontiles} non-tiles)")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
