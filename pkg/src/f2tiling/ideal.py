"""Right-shifted order, order ideals, set systems and the distance polynomial."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf2core import Region

# k -> (n, generators); each putative tile has 64 members and a putative
# complement of size 2^k.
PUTATIVE_TILES: dict[int, tuple[int, tuple[tuple[int, ...], ...]]] = {
    6: (12, ((11,), (10, 5), (9, 8))),
    7: (13, ((12,), (10, 4), (9, 8))),
    8: (14, ((13, 2), (13, 1, 0), (3, 2, 0))),
    9: (15, ((14, 1, 0), (10, 2))),
    16: (22, ((21, 1),)),
    17: (23, ((22, 0), (19, 1))),
    18: (24, ((23, 0), (17, 1))),
    19: (25, ((24, 0), (15, 1))),
    20: (26, ((25, 0), (13, 1))),
    21: (27, ((26, 0), (11, 1))),
}


def finite_set(elements: Iterable[int]) -> tuple[int, ...]:
    """Canonical form: distinct non-negative ints, strictly decreasing."""
    s = set(elements)
    if any(e < 0 for e in s):
        raise ValueError("set elements must be non-negative")
    return tuple(sorted(s, reverse=True))


def geq_r(S: Sequence[int], T: Sequence[int]) -> bool:
    """S >=_R T: |S| >= |T| and the i-th largest of S dominates that of T."""
    S = finite_set(S)
    T = finite_set(T)
    return len(S) >= len(T) and all(s >= t for s, t in zip(S, T))


def _lower_covers(S: tuple[int, ...]):
    present = set(S)
    for idx, s in enumerate(S):
        yield S[:idx] + S[idx + 1:]
        if s > 0 and s - 1 not in present:
            yield tuple(sorted(present - {s} | {s - 1}, reverse=True))


@dataclass(frozen=True)
class SetSystem:
    n: int
    sets: frozenset

    def __post_init__(self):
        sets = frozenset(finite_set(s) for s in self.sets)
        for s in sets:
            if s and s[0] >= self.n:
                raise ValueError(f"element {s[0]} out of range for n={self.n}")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(sorted(self.sets, key=lambda s: (len(s), s)))


def ideal_from_generators(gens: Iterable[Sequence[int]], n: int) -> SetSystem:
    """Downward closure of the generators under <=_R (decrement or drop)."""
    start = [finite_set(g) for g in gens]
    seen = set(start)
    queue = deque(start)
    while queue:
        S = queue.popleft()
        for T in _lower_covers(S):
            if T not in seen:
                seen.add(T)
                queue.append(T)
    return SetSystem(n, frozenset(seen))


def to_region(S: SetSystem) -> Region:
    return Region(S.n, frozenset(sum(1 << i for i in s) for s in S.sets))


def to_set_system(V: Region) -> SetSystem:
    return SetSystem(V.n, frozenset(
        tuple(i for i in range(V.n - 1, -1, -1) if (w >> i) & 1) for w in V.members))


def f_poly(S: SetSystem | Region) -> np.ndarray:
    """coeffs[d] = number of ordered pairs (A, B) with |A xor B| = d."""
    V = S if isinstance(S, Region) else to_region(S)
    members = sorted(V.members)
    coeffs = np.zeros(V.n + 1, dtype=np.int64)
    for a in members:
        for b in members:
            coeffs[(a ^ b).bit_count()] += 1
    last = np.flatnonzero(coeffs)
    return coeffs[: last[-1] + 1] if last.size else coeffs[:1]


def f_value(coeffs: Sequence[int], p: float) -> float:
    ratio = p / (1 - p)
    return float(sum(c * ratio**d for d, c in enumerate(coeffs)))


def table1_region(k: int) -> Region:
    if k not in PUTATIVE_TILES:
        raise KeyError(f"no putative tile with k={k}; known: {sorted(PUTATIVE_TILES)}")
    n, gens = PUTATIVE_TILES[k]
    return to_region(ideal_from_generators(gens, n))


def read_generators(text: str) -> tuple[int, list[tuple[int, ...]]]:
    """Generator file: header ``n=<dim>``, then one generator per line."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("generator file must start with 'n=<dim>'")
    n = int(lines[0][2:])
    gens = [finite_set(int(t) for t in ln.split(",")) for ln in lines[1:]]
    for g in gens:
        if g and g[0] >= n:
            raise ValueError(f"generator {g} has element >= n={n}")
    return n, gens


def enumerate_ideals(n: int, size: int | None = None, max_size: int | None = None):
    """Yield every nonempty order ideal (downward closed under <=_R) of subsets
    of {0..n-1}, grouped by cardinality, optionally only those of one size."""
    top = size if size is not None else (max_size if max_size is not None else 1 << n)
    universe = [finite_set(s) for s in _all_subsets(n)]
    covers = {T: set(_lower_covers(T)) for T in universe}
    level = {frozenset([()])}
    k = 1
    while level and k <= top:
        if size is None or k == size:
            for I in sorted(level, key=lambda I: sorted(I)):
                yield SetSystem(n, I)
        if k == top:
            break
        nxt = set()
        for I in level:
            for T in universe:
                if T not in I and covers[T] <= I:
                    nxt.add(I | {T})
        level = nxt
        k += 1


def _all_subsets(n: int):
    for mask in range(1 << n):
        yield tuple(i for i in range(n) if (mask >> i) & 1)
