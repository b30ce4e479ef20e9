"""Rebuild the putative tiles, their projection censuses and the bundled
certificate checks, and compare against the reference values."""

from importlib import resources

from f2tiling.binpack import REFERENCE_CENSUSES, non_tiling_by_projection, sweep
from f2tiling.farkas import parse_certificate, verify_auto
from f2tiling.ideal import PUTATIVE_TILES, ideal_from_generators, table1_region


def main():
    print("putative tiles")
    for k, (n, gens) in PUTATIVE_TILES.items():
        size = len(ideal_from_generators(gens, n))
        print(f"  k={k:>2} n={n:>2} |V|={size} {'ok' if size == 64 else 'MISMATCH'}")

    print("projection censuses")
    for k, (r, size, counts) in REFERENCE_CENSUSES.items():
        rep = non_tiling_by_projection(table1_region(k), r, k)
        match = rep.census.counts == counts and rep.bin_size == size
        print(f"  k={k:>2} r={r} bin={size} [{rep.census}] {rep.verdict.status} "
              f"{'ok' if match else 'MISMATCH'}")

    print("first two rows, r = 1..4 (no projection is known to settle these)")
    for k in (6, 7):
        for rep in sweep(table1_region(k), rs=range(1, 5), k=k):
            print(f"  {rep.text()}")

    print("bundled certificates")
    for name, k in (("first", 6), ("third", 8)):
        V = table1_region(k)
        text = resources.files("f2tiling").joinpath("data", f"cert_{name}.txt").read_text()
        for v in verify_auto(V, parse_certificate(text, n=V.n)):
            print(f"  {name}: {v.summary()}")


if __name__ == "__main__":
    main()
