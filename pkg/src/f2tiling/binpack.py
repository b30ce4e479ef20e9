"""Projection criterion: piece censuses and exact bin-packing feasibility.

A coordinate projection splits V into pieces (classes with equal image). If V
tiles, every bin of size 2^(n - |keep|) is exactly filled by translated
pieces, each nonempty piece being used |U|/|V| times overall.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from fractions import Fraction
from typing import Iterable

from .exactlp import RationalSystem, solve_phase1
from .gf2core import Region

MAX_BIN_SIZE = 24
NODE_CAP = 20000

# k -> (r, bin size, {piece size: count}) for projections onto coordinates r..n-1
REFERENCE_CENSUSES: dict[int, tuple[int, int, dict[int, int]]] = {
    8: (3, 8, {5: 10, 6: 1, 8: 1}),
    9: (3, 8, {4: 4, 5: 8, 8: 1}),
    16: (2, 4, {3: 20, 4: 1}),
    17: (2, 4, {2: 3, 3: 18, 4: 1}),
    18: (2, 4, {2: 6, 3: 16, 4: 1}),
    19: (2, 4, {2: 9, 3: 14, 4: 1}),
    20: (2, 4, {2: 12, 3: 12, 4: 1}),
    21: (2, 4, {2: 15, 3: 10, 4: 1}),
}


@dataclass(frozen=True)
class Projection:
    n: int
    keep: tuple[int, ...]

    def __post_init__(self):
        keep = tuple(sorted(set(self.keep)))
        if any(not 0 <= i < self.n for i in keep):
            raise ValueError(f"kept coordinates must lie in 0..{self.n - 1}")
        object.__setattr__(self, "keep", keep)

    @classmethod
    def tail(cls, n: int, r: int) -> "Projection":
        """Projection onto coordinates r, ..., n-1."""
        return cls(n, tuple(range(r, n)))

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.keep)

    @property
    def target_dim(self) -> int:
        return len(self.keep)


@dataclass
class PieceCensus:
    counts: dict[int, int]
    bin_size: int
    num_bins: int
    copies: int

    def mass(self) -> int:
        return sum(size * mult for size, mult in self.counts.items())

    def __str__(self):
        return ", ".join(f"{m}*{s}" for s, m in sorted(self.counts.items()))

    def demands(self) -> dict[int, int]:
        return {s: self.copies * m for s, m in self.counts.items()}


def piece_census(V: Region, proj: Projection) -> PieceCensus:
    if proj.n != V.n:
        raise ValueError("projection and region dimensions differ")
    mask = proj.mask
    classes = Counter(v & mask for v in V.members)
    counts = Counter(classes.values())
    N = 1 << V.n
    copies = Fraction(N, V.size)
    return PieceCensus(
        counts=dict(sorted(counts.items())),
        bin_size=1 << (V.n - proj.target_dim),
        num_bins=1 << proj.target_dim,
        copies=int(copies) if copies.denominator == 1 else copies,
    )


@dataclass
class FeasibilityVerdict:
    status: str                       # FEASIBLE, INFEASIBLE or UNDECIDED
    reason: str = ""
    witness: dict[tuple[int, ...], int] = field(default_factory=dict)
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "FEASIBLE"

    @property
    def infeasible(self) -> bool:
        return self.status == "INFEASIBLE"


def bin_patterns(sizes: Iterable[int], capacity: int) -> list[tuple[int, ...]]:
    """Multisets of the given sizes summing exactly to capacity, each sorted
    descending; returned in lexicographically decreasing order."""
    sizes = sorted({s for s in sizes if 0 < s <= capacity}, reverse=True)
    out = []

    def rec(rem, start, acc):
        if rem == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(sizes)):
            s = sizes[i]
            if s <= rem:
                acc.append(s)
                rec(rem - s, i, acc)
                acc.pop()

    rec(capacity, 0, [])
    return sorted(out, reverse=True)


def binpack_feasible(census: PieceCensus, node_cap: int = NODE_CAP) -> FeasibilityVerdict:
    """Exact integer feasibility of packing copies*b_i pieces of each size i
    into num_bins bins of capacity bin_size."""
    c = census.bin_size
    if c > MAX_BIN_SIZE:
        raise ValueError(f"bin size {c} exceeds pattern-enumeration cap {MAX_BIN_SIZE}")
    if Fraction(census.copies).denominator != 1:
        return FeasibilityVerdict("INFEASIBLE", f"|V| does not divide |U| (copies={census.copies})")
    demand = tuple(sorted((s, d) for s, d in census.demands().items() if d))
    v = _decide(demand, c, census.num_bins, node_cap)
    return replace(v, witness=dict(v.witness))


@lru_cache(maxsize=4096)
def _decide(demand_items, c, num_bins, node_cap) -> FeasibilityVerdict:
    demand = dict(demand_items)
    if any(s > c for s in demand):
        return FeasibilityVerdict("INFEASIBLE", f"piece larger than bin size {c}")
    if sum(s * d for s, d in demand.items()) != num_bins * c:
        return FeasibilityVerdict("INFEASIBLE", "total piece mass differs from total bin capacity")
    if not demand:
        return FeasibilityVerdict("FEASIBLE", "nothing to pack")

    patterns = bin_patterns(demand, c)
    for s in sorted(demand):
        if not any(s in p for p in patterns):
            return FeasibilityVerdict(
                "INFEASIBLE", f"no way to fill a bin of size {c} around a piece of size {s}")

    sizes = sorted(demand)
    matrix = [[p.count(s) for p in patterns] for s in sizes]
    rhs = [demand[s] for s in sizes]
    return _branch_and_bound(patterns, matrix, rhs, node_cap)


def _branch_and_bound(patterns, matrix, rhs, node_cap) -> FeasibilityVerdict:
    k = len(patterns)
    # every pattern count is bounded by the number of bins, via any size it contains
    stack = [([0] * k, [None] * k)]
    nodes = 0
    while stack:
        lo, hi = stack.pop()
        nodes += 1
        if nodes > node_cap:
            return FeasibilityVerdict("UNDECIDED", f"node cap {node_cap} reached", nodes=nodes)
        y = _relaxation(matrix, rhs, lo, hi)
        if y is None:
            if nodes == 1:
                return FeasibilityVerdict(
                    "INFEASIBLE", "LP relaxation of the pattern system is infeasible", nodes=nodes)
            continue
        frac = next((j for j in range(k) if y[j].denominator != 1), None)
        if frac is None:
            witness = {patterns[j]: int(y[j]) for j in range(k) if y[j]}
            return FeasibilityVerdict("FEASIBLE", "pattern assignment found", witness, nodes)
        f = math.floor(y[frac])
        up_lo = list(lo)
        up_lo[frac] = f + 1
        down_hi = list(hi)
        down_hi[frac] = f
        # explore the rounded-down branch first
        stack.append((up_lo, list(hi)))
        stack.append((list(lo), down_hi))
    return FeasibilityVerdict("INFEASIBLE", f"branch-and-bound exhausted after {nodes} nodes", nodes=nodes)


def _relaxation(matrix, rhs, lo, hi):
    """Solve {M y = rhs, lo <= y <= hi} exactly; return y or None."""
    k = len(lo)
    m = len(matrix)
    upper = [j for j in range(k) if hi[j] is not None]
    if any(hi[j] < lo[j] for j in upper):
        return None
    width = k + len(upper)
    A, b = [], []
    for i in range(m):
        row = matrix[i] + [0] * len(upper)
        A.append(row)
        b.append(rhs[i] - sum(matrix[i][j] * lo[j] for j in range(k)))
    for t, j in enumerate(upper):
        row = [0] * width
        row[j] = 1
        row[k + t] = 1
        A.append(row)
        b.append(hi[j] - lo[j])
    res = solve_phase1(RationalSystem(A, b))
    if not res.feasible:
        return None
    return [res.point[j] + lo[j] for j in range(k)]


@dataclass
class Report:
    r: int
    bin_size: int
    census: PieceCensus
    verdict: FeasibilityVerdict
    k: int | None = None

    @property
    def conclusion(self) -> str:
        return "not a tile" if self.verdict.infeasible else "inconclusive"

    def record(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "binSize": self.bin_size,
            "census": {str(s): m for s, m in self.census.counts.items()},
            "verdict": self.verdict.status,
        }

    def text(self) -> str:
        head = f"k={self.k} " if self.k is not None else ""
        return (f"{head}r={self.r} bin size={self.bin_size} census=[{self.census}] "
                f"{self.verdict.status}: {self.verdict.reason} -> {self.conclusion}")


def non_tiling_by_projection(V: Region, r: int, k: int | None = None,
                             node_cap: int = NODE_CAP) -> Report:
    if not 0 <= r < V.n:
        raise ValueError(f"r must lie in 0..{V.n - 1}")
    census = piece_census(V, Projection.tail(V.n, r))
    return Report(r, census.bin_size, census, binpack_feasible(census, node_cap), k)


def sweep(V: Region, rs: Iterable[int] | None = None, k: int | None = None,
          max_bin_size: int = MAX_BIN_SIZE) -> list[Report]:
    rs = range(1, V.n) if rs is None else rs
    return [non_tiling_by_projection(V, r, k) for r in rs if (1 << r) <= max_bin_size]
