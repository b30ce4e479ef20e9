"""Exact-rational phase-1 simplex with Bland's rule.

Decides {A y = b, y >= 0}. A feasible run returns y; an infeasible run
returns the Farkas multipliers z with A^T z >= 0 and b^T z < 0, read off the
optimal phase-1 basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .gf2core import Region

MAX_ROWS = 20000
MAX_COLS = 20000


class CapExceeded(RuntimeError):
    pass


@dataclass
class RationalSystem:
    """Equality system A y = b over y >= 0, with optional row/column labels."""

    A: list[list[Fraction]]
    b: list[Fraction]
    row_labels: list[Hashable] | None = None
    col_labels: list[Hashable] | None = None

    def __post_init__(self):
        self.A = [[Fraction(v) for v in row] for row in self.A]
        self.b = [Fraction(v) for v in self.b]
        if len(self.A) != len(self.b):
            raise ValueError("row count of A and length of b differ")
        widths = {len(r) for r in self.A}
        if len(widths) > 1:
            raise ValueError("ragged matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.A), (len(self.A[0]) if self.A else 0)


@dataclass
class Phase1Result:
    feasible: bool
    point: list[Fraction] | None = None
    dual: list[Fraction] | None = None
    pivots: int = 0


def check_point(sys: RationalSystem, y: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in y):
        return False
    return all(sum(a * v for a, v in zip(row, y) if a) == rhs for row, rhs in zip(sys.A, sys.b))


def check_farkas(sys: RationalSystem, z: Sequence[Fraction]) -> bool:
    m, k = sys.shape
    if sum(bi * zi for bi, zi in zip(sys.b, z)) >= 0:
        return False
    for j in range(k):
        if sum(sys.A[i][j] * z[i] for i in range(m) if sys.A[i][j]) < 0:
            return False
    return True


def solve_phase1(sys: RationalSystem) -> Phase1Result:
    m, k = sys.shape
    if m > MAX_ROWS or k > MAX_COLS:
        raise CapExceeded(f"system {m}x{k} exceeds exact-arithmetic caps {MAX_ROWS}x{MAX_COLS}")
    if m == 0:
        return Phase1Result(True, point=[Fraction(0)] * k)

    flip = [bi < 0 for bi in sys.b]
    width = k + m
    # rows hold [structural | artificial | rhs]
    T = []
    for i in range(m):
        s = -1 if flip[i] else 1
        row = [s * a for a in sys.A[i]] + [Fraction(0)] * m + [s * sys.b[i]]
        row[k + i] = Fraction(1)
        T.append(row)
    basis = [k + i for i in range(m)]
    # reduced costs of the phase-1 objective (sum of artificials), last entry is -objective
    red = [Fraction(0)] * (width + 1)
    for j in range(k):
        red[j] = -sum(T[i][j] for i in range(m))
    red[width] = -sum(T[i][width] for i in range(m))

    pivots = 0
    while True:
        enter = next((j for j in range(width) if red[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # phase-1 objective is bounded below by 0; an unbounded ray cannot occur
            raise AssertionError("unbounded phase-1 ray")
        _pivot(T, red, leave, enter)
        basis[leave] = enter
        pivots += 1

    objective = -red[width]
    if objective == 0:
        y = [Fraction(0)] * k
        for i, bv in enumerate(basis):
            if bv < k:
                y[bv] = T[i][width]
        return Phase1Result(True, point=y, pivots=pivots)

    # dual of the flipped system: u_i = 1 - (reduced cost of artificial i)
    z = []
    for i in range(m):
        u = 1 - red[k + i]
        zi = -u
        z.append(-zi if flip[i] else zi)
    return Phase1Result(False, dual=z, pivots=pivots)


def _pivot(T, red, r, c):
    prow = T[r]
    inv = 1 / prow[c]
    nz = [j for j, v in enumerate(prow) if v]
    for j in nz:
        prow[j] *= inv
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    f = red[c]
    if f:
        for j in nz:
            red[j] -= f * prow[j]


# -- the relaxed tiling system -------------------------------------------------

@dataclass
class TilingSystem:
    """A y = b for the tiling LP with the transform variables eliminated.

    Columns are f(x) = (chi_A * chi_A)(x) >= 0 for every x. Rows are labelled
    ("f", x) for the fixed values f(0) = |A| and f(x) = 0 on (V+V) - 0, and
    ("fhat", xh) for sum_x (-1)^(x.xh) f(x) fixed to |A|^2 at 0 and to 0 where
    the spectrum of V is nonzero. Keeping the transform free elsewhere is the
    equality form of the dual, so every certificate of this system fits the
    two-section certificate layout.
    """

    region: Region
    system: RationalSystem
    size_A: int


def tiling_system(V: Region) -> TilingSystem:
    n = V.n
    N = 1 << n
    if N % V.size:
        raise ValueError(f"|V|={V.size} does not divide 2^{n}")
    size_A = N // V.size
    spec = V.spectrum
    rows, rhs, labels = [], [], []

    def unit(x):
        r = [Fraction(0)] * N
        r[x] = Fraction(1)
        return r

    rows.append(unit(0))
    rhs.append(size_A)
    labels.append(("f", 0))
    for x in sorted(V.sumset_support - {0}):
        rows.append(unit(x))
        rhs.append(0)
        labels.append(("f", x))
    for xh in range(N):
        if xh != 0 and spec[xh] == 0:
            continue
        rows.append([Fraction(1 - 2 * ((x & xh).bit_count() & 1)) for x in range(N)])
        rhs.append(size_A * size_A if xh == 0 else 0)
        labels.append(("fhat", xh))
    sys = RationalSystem(rows, rhs, row_labels=labels, col_labels=[("f", x) for x in range(N)])
    return TilingSystem(V, sys, size_A)


def to_dual_certificate(z: Sequence[Fraction], ts: TilingSystem, integral: bool = True):
    """Map row multipliers of ``tiling_system`` onto a two-section certificate."""
    from .farkas import Certificate

    labels = ts.system.row_labels
    if len(z) != len(labels):
        raise ValueError("multiplier vector does not match the system rows")
    scale = Fraction(1)
    if integral:
        scale = Fraction(math.lcm(*(Fraction(v).denominator for v in z)))
    upper, lower = {}, {}
    for (kind, idx), v in zip(labels, z):
        v = Fraction(v) * scale
        if not v:
            continue
        if kind == "fhat":
            upper[idx] = v
        elif kind == "f":
            lower[idx] = v
        else:
            raise ValueError(f"unmapped row label {kind!r}")
    return Certificate(n=ts.region.n, upper=upper, lower=lower)


def decide_tiling_lp(V: Region) -> tuple[Phase1Result, TilingSystem]:
    ts = tiling_system(V)
    return solve_phase1(ts.system), ts



# -- bounded models in standard form -------------------------------------------

def system_from_model(model):
    """Standard form {A y = b, y >= 0} of an lpmodel.LpModel.

    Each variable becomes lo + y (or hi - y when only bounded above, or a
    difference of two parts when free); finite upper bounds and inequality
    rows get slack columns. Returns the system and a map from y back to the
    model's variable values.
    """
    k = len(model.var_names)
    # per variable: (offset, [(column, sign)])
    parts, cols = [], 0
    bound_rows = []
    for j in range(k):
        lo, hi = model.lower[j], model.upper[j]
        if lo is None and hi is None:
            parts.append((Fraction(0), [(cols, 1), (cols + 1, -1)]))
            cols += 2
        elif lo is None:
            parts.append((Fraction(hi), [(cols, -1)]))
            cols += 1
        else:
            parts.append((Fraction(lo), [(cols, 1)]))
            if hi is not None:
                bound_rows.append((cols, Fraction(hi) - Fraction(lo)))
            cols += 1
    slack_count = sum(r.sense != "=" for r in model.rows) + len(bound_rows)
    width = cols + slack_count
    A, b, labels = [], [], []
    s = cols
    for row in model.rows:
        line = [Fraction(0)] * width
        rhs = Fraction(row.rhs)
        for j, c in row.coefs.items():
            off, terms = parts[j]
            rhs -= c * off
            for col, sign in terms:
                line[col] += c * sign
        if row.sense != "=":
            line[s] = Fraction(1 if row.sense == "<=" else -1)
            s += 1
        A.append(line)
        b.append(rhs)
        labels.append(row.name)
    for col, room in bound_rows:
        line = [Fraction(0)] * width
        line[col] = Fraction(1)
        line[s] = Fraction(1)
        s += 1
        A.append(line)
        b.append(room)
        labels.append(("ub", col))

    def recover(y):
        return {model.var_names[j]: off + sum(sign * y[col] for col, sign in terms)
                for j, (off, terms) in enumerate(parts)}

    return RationalSystem(A, b, row_labels=labels), recover


def solve_model(model):
    """Exact feasibility of a bounded model: (result, values or None)."""
    sys, recover = system_from_model(model)
    res = solve_phase1(sys)
    return res, (recover(res.point) if res.feasible else None)
