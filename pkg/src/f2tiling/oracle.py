"""Exhaustive complement search and cross-validation of both criteria."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import binpack
from .exactlp import decide_tiling_lp, to_dual_certificate
from .farkas import format_certificate, parse_certificate, verify_certificate
from .gf2core import Region, is_tile_pair


class SearchLimitReached(RuntimeError):
    """The node cap ran out before the search finished; the answer is unknown."""


def span_basis(words) -> list[int]:
    """Reduced echelon basis of the span, ordered by leading bit."""
    piv: dict[int, int] = {}
    for w in words:
        for b in sorted(piv, reverse=True):
            if (w >> b) & 1:
                w ^= piv[b]
        if w:
            top = w.bit_length() - 1
            for b in list(piv):
                if (piv[b] >> top) & 1:
                    piv[b] ^= w
            piv[top] = w
    return [piv[b] for b in sorted(piv)]


def _coords(w: int, basis: list[int]) -> int:
    """Coordinates of w in a reduced echelon basis (w must lie in the span)."""
    out = 0
    for i, v in enumerate(basis):
        if (w >> (v.bit_length() - 1)) & 1:
            out |= 1 << i
    return out


def _from_coords(c: int, basis: list[int]) -> int:
    w = 0
    i = 0
    while c:
        if c & 1:
            w ^= basis[i]
        c >>= 1
        i += 1
    return w


def find_complement(V: Region, node_cap: int | None = None) -> Region | None:
    """A complement A with V + A = F_2^n uniquely, or None if none exists.

    The search runs inside the span of V: it repeatedly covers the least
    uncovered point u by a translate V + a containing u. Raises
    SearchLimitReached when node_cap nodes have been expanded.
    """
    if not V.members:
        return None
    basis = span_basis(V.members)
    d = len(basis)
    M = 1 << d
    if M % V.size:
        return None
    local = [_coords(v, basis) for v in V.members]
    full = (1 << M) - 1
    masks = {}
    for a in range(M):
        m = 0
        for v in local:
            m |= 1 << (v ^ a)
        masks[a] = m

    nodes = 0
    chosen: list[int] = []

    def dfs(covered: int) -> bool:
        nonlocal nodes
        if covered == full:
            return True
        nodes += 1
        if node_cap is not None and nodes > node_cap:
            raise SearchLimitReached(f"node cap {node_cap} reached")
        free = ~covered & full
        u = (free & -free).bit_length() - 1
        for a in sorted({u ^ v for v in local}):
            m = masks[a]
            if m & covered:
                continue
            chosen.append(a)
            if dfs(covered | m):
                return True
            chosen.pop()
        return False

    if not dfs(0):
        return None
    A_local = [_from_coords(a, basis) for a in chosen]
    # extend by a complement W of the span using the non-pivot unit vectors
    pivots = {v.bit_length() - 1 for v in basis}
    free_bits = [i for i in range(V.n) if i not in pivots]
    A = []
    for wc in range(1 << len(free_bits)):
        w = sum(1 << free_bits[i] for i in range(len(free_bits)) if (wc >> i) & 1)
        A.extend(a ^ w for a in A_local)
    return Region(V.n, frozenset(A))


def classify_full_rank(V: Region, A: Region) -> str:
    v_proper = V.span_dim == V.n
    a_proper = A.span_dim == A.n
    if v_proper and a_proper:
        return "full-rank"
    if v_proper:
        return "V-proper-only"
    if a_proper:
        return "A-proper-only"
    return "neither"


@dataclass
class ConsistencyReport:
    region: Region
    complement: Region | None
    binpack_verdicts: dict[int, str] = field(default_factory=dict)
    lp_feasible: bool | None = None
    certificate_valid: bool | None = None
    problems: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.problems


def cross_validate(V: Region, node_cap: int | None = None) -> ConsistencyReport:
    A = find_complement(V, node_cap)
    rep = ConsistencyReport(V, A)
    if A is not None and not is_tile_pair(V, A):
        rep.problems.append("oracle complement fails the convolution check")
    if (1 << V.n) % V.size:
        if A is not None:
            rep.problems.append("complement found although |V| does not divide 2^n")
        return rep
    for r in range(V.n):
        if (1 << r) > binpack.MAX_BIN_SIZE:
            break
        rep.binpack_verdicts[r] = binpack.non_tiling_by_projection(V, r).verdict.status
    if A is not None:
        bad = [r for r, s in rep.binpack_verdicts.items() if s == "INFEASIBLE"]
        if bad:
            rep.problems.append(f"projection criterion rejects a tile at r={bad}")
    res, ts = decide_tiling_lp(V)
    rep.lp_feasible = res.feasible
    if res.feasible:
        return rep
    if A is not None:
        rep.problems.append("LP declared infeasible for a tile")
    cert = to_dual_certificate(res.dual, ts)
    cert = parse_certificate(format_certificate(cert), n=V.n)
    rep.certificate_valid = verify_certificate(V, cert).valid
    if not rep.certificate_valid:
        rep.problems.append("LP infeasible but its certificate does not verify")
    return rep
