"""Region algebra over F_2^n.

Words are n-bit integers; coordinate i of a vector is bit i of its index.
All spectral arithmetic is exact (numpy int64 when it provably fits,
Python ints otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

MAX_DIM = 28

_INT64_SAFE = 1 << 62


class DimensionError(ValueError):
    pass


def _check_dim(n: int) -> None:
    if n > MAX_DIM:
        raise DimensionError(f"dimension {n} exceeds configured maximum {MAX_DIM}")


def _dim_of(length: int) -> int:
    n = length.bit_length() - 1
    if length <= 0 or (1 << n) != length:
        raise DimensionError(f"vector length {length} is not a power of two")
    return n


def _as_exact(f, bound: int) -> np.ndarray:
    """Return f as int64 if every intermediate stays below 2**62, else as Python ints."""
    arr = np.asarray(f)
    if arr.dtype == object or bound >= _INT64_SAFE:
        return np.array([int(x) for x in arr.ravel()], dtype=object)
    return arr.astype(np.int64, copy=True)


def _max_abs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(x)) for x in arr)
    return int(np.abs(arr).max())


def wht(f) -> np.ndarray:
    """Walsh-Hadamard transform: out[y] = sum_x (-1)^(x.y) f[x], exact."""
    arr = np.asarray(f)
    n = _dim_of(arr.size)
    _check_dim(n)
    out = _as_exact(arr, _max_abs(arr) << n)
    for h in range(n):
        blocks = out.reshape(-1, 2, 1 << h)
        lo = blocks[:, 0, :]
        hi = blocks[:, 1, :]
        out = np.concatenate([lo + hi, lo - hi], axis=1).reshape(-1)
    return out


def convolve(f, g) -> np.ndarray:
    """(f * g)(z) = sum_y f(y) g(z + y), via the transform and exact division."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.size != g.size:
        raise DimensionError(f"dimension mismatch: {f.size} vs {g.size}")
    n = _dim_of(f.size)
    ff = wht(f)
    gg = wht(g)
    bound = (_max_abs(ff) * _max_abs(gg)) << n
    if bound >= _INT64_SAFE:
        ff = ff.astype(object)
        gg = gg.astype(object)
    prod = ff * gg
    back = wht(prod)
    if back.dtype == object:
        return np.array([x >> n for x in back], dtype=object)
    return back >> n


def indicator(n: int, members: Iterable[int]) -> np.ndarray:
    _check_dim(n)
    chi = np.zeros(1 << n, dtype=np.int64)
    idx = list(members)
    if idx:
        chi[idx] = 1
    return chi


def gf2_rank(rows: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = r
                break
            r ^= pivots[top]
    return len(pivots)


@dataclass(frozen=True)
class Region:
    """A finite subset of F_2^n. Derived quantities are computed lazily."""

    n: int
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative dimension")
        members = frozenset(int(v) for v in self.members)
        limit = 1 << self.n
        for v in members:
            if not 0 <= v < limit:
                raise ValueError(f"word {v} out of range for n={self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, n: int, words: Iterable[int]) -> "Region":
        return cls(n, frozenset(words))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, word):
        return word in self.members

    @property
    def size(self) -> int:
        return len(self.members)

    @cached_property
    def span_dim(self) -> int:
        return gf2_rank(self.members)

    @property
    def is_proper(self) -> bool:
        return self.span_dim == self.n

    @cached_property
    def sumset_support(self) -> frozenset:
        m = list(self.members)
        return frozenset(a ^ b for a in m for b in m)

    @cached_property
    def chi(self) -> np.ndarray:
        return indicator(self.n, self.members)

    @cached_property
    def spectrum(self) -> np.ndarray:
        return wht(self.chi)

    @cached_property
    def autocorrelation(self) -> np.ndarray:
        """chi_V * chi_V, i.e. the number of ways to write x as v + v'."""
        return convolve(self.chi, self.chi)

    def translate(self, t: int) -> "Region":
        return Region(self.n, frozenset(v ^ t for v in self.members))


def sumset_support(V: Region) -> frozenset:
    if not V.members:
        raise ValueError("sumset of an empty region")
    return V.sumset_support


def span_dim(V: Region) -> int:
    return V.span_dim


def is_tile_pair(V: Region, A: Region, method: str = "convolution") -> bool:
    """True iff every word of F_2^n is uniquely v + a.

    ``method="convolution"`` checks chi_V * chi_A == 1; ``method="sumset"``
    checks |V||A| = 2^n and (V+V) & (A+A) = {0}.
    """
    if V.n != A.n:
        raise DimensionError("regions live in different dimensions")
    if V.size * A.size != 1 << V.n:
        return False
    if method == "convolution":
        return bool(np.all(convolve(V.chi, A.chi) == 1))
    if method == "sumset":
        return V.sumset_support & A.sumset_support == {0}
    raise ValueError(f"unknown method {method!r}")


def full_rank_test(A: Region) -> bool:
    """Spectral test that A (containing 0) spans F_2^n."""
    if 0 not in A.members:
        raise ValueError("full-rank test requires 0 in the region")
    spec = A.spectrum
    if spec.size == 1:
        return True
    return _max_abs(spec[1:]) <= A.size - 2


def read_region(text: str) -> Region:
    """Parse the region text format: header ``n=<dim>``, then one vector per
    line as comma-separated 1-coordinates; an empty line is the zero vector."""
    lines = text.splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
    if not lines or not lines[0].strip().startswith("n="):
        raise ValueError("region file must start with 'n=<dim>'")
    n = int(lines[0].strip()[2:])
    words = []
    for ln, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if s.startswith("#"):
            continue
        word = 0
        if s:
            for tok in s.split(","):
                i = int(tok)
                if not 0 <= i < n:
                    raise ValueError(f"line {ln}: coordinate {i} out of range for n={n}")
                word |= 1 << i
        words.append(word)
    return Region(n, frozenset(words))


def format_region(V: Region) -> str:
    out = [f"n={V.n}"]
    for w in sorted(V.members):
        out.append(",".join(str(i) for i in range(V.n - 1, -1, -1) if (w >> i) & 1))
    return "\n".join(out) + "\n"
