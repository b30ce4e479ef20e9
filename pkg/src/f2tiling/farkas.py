"""Dual block system of the tiling LP and exact verification of certificates.

Primal (after dropping upper bounds): variables f(x) >= 0 and fhat(xh) >= 0,
row groups

    transform  sum_x (-1)^(x.xh) f(x) - fhat(xh) = 0   for every xh
    f0         f(0)     = |A|
    fhat0      fhat(0)  = |A|^2
    f-sumset   f(x)     = 0      for x in (V+V) - {0}
    fhat-spec  fhat(xh) = 0      for xh != 0 with spectrum(V)[xh] != 0

A certificate is z over these rows with A^T z >= 0 and b^T z < 0. The
transform-row multipliers z_xh are not stored: the fhat columns are taken as
equalities, so z_xh equals the fhat-row multiplier where that row exists and
is 0 elsewhere.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .gf2core import Region, wht

CONVENTIONS = ("bit", "bitrev")
# "fhat-first": section above the separator holds fhat-row multipliers, as the
# certificate tables are captioned; "f-first": the reverse.
LAYOUTS = ("fhat-first", "f-first")


class CertificateFormatError(ValueError):
    pass


@dataclass
class Certificate:
    n: int | None
    upper: dict[int, Fraction] = field(default_factory=dict)
    lower: dict[int, Fraction] = field(default_factory=dict)

    def scaled(self, lam) -> "Certificate":
        lam = Fraction(lam)
        return Certificate(
            self.n,
            {k: v * lam for k, v in self.upper.items()},
            {k: v * lam for k, v in self.lower.items()},
        )

    def nonzeros(self) -> int:
        return sum(1 for v in self.upper.values() if v) + sum(1 for v in self.lower.values() if v)


# -- text format ---------------------------------------------------------------

_ENTRY = re.compile(
    r"^(?:(?P<idx>\d+)|\(\s*(?P<c>\d+)\s*,\s*(?P<l>\d+)\s*(?:,\s*(?P<s>\d+)\s*)?\))\s+(?P<val>\S+)$")


def _parse_value(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise CertificateFormatError(f"bad value {tok!r}") from exc


def _expand(m: re.Match) -> range:
    if m.group("idx") is not None:
        i = int(m.group("idx"))
        return range(i, i + 1)
    c, l = int(m.group("c")), int(m.group("l"))
    s = int(m.group("s")) if m.group("s") is not None else 1
    if s <= 0:
        raise CertificateFormatError("stride must be positive")
    return range(c, c + l, s)


def parse_certificate(text: str, n: int | None = None) -> Certificate:
    """Parse ``idx value``, ``(c,l) value`` and ``(c,l,s) value`` lines.

    The section before the ``---`` separator is ``upper``, the rest ``lower``.
    """
    sections: list[dict[int, Fraction]] = [{}, {}]
    part = 0
    declared_n = None
    seen_sep = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("n="):
            declared_n = int(line[2:])
            continue
        if set(line) == {"-"} and len(line) >= 3:
            if seen_sep:
                raise CertificateFormatError(f"line {ln}: second separator")
            seen_sep = True
            part = 1
            continue
        m = _ENTRY.match(line)
        if not m:
            raise CertificateFormatError(f"line {ln}: cannot parse {line!r}")
        val = _parse_value(m.group("val"))
        target = sections[part]
        for i in _expand(m):
            if i in target and target[i] != val:
                raise CertificateFormatError(
                    f"line {ln}: index {i} assigned {target[i]} and {val}")
            target[i] = val
    if n is not None and declared_n is not None and n != declared_n:
        raise CertificateFormatError(f"header n={declared_n} but n={n} requested")
    dim = n if n is not None else declared_n
    if dim is not None:
        for sec in sections:
            for i in sec:
                if i >= 1 << dim:
                    raise CertificateFormatError(f"index {i} out of range for n={dim}")
    cert = Certificate(dim, *(dict((k, v) for k, v in s.items() if v) for s in sections))
    if not cert.upper and not cert.lower:
        raise CertificateFormatError("certificate has no nonzero entry")
    return cert


def _runs(entries: dict[int, Fraction]) -> Iterator[tuple[int, int, Fraction]]:
    """Group sorted indices into maximal consecutive runs of equal value."""
    keys = sorted(entries)
    i = 0
    while i < len(keys):
        j = i
        while j + 1 < len(keys) and keys[j + 1] == keys[j] + 1 and entries[keys[j + 1]] == entries[keys[i]]:
            j += 1
        yield keys[i], j - i + 1, entries[keys[i]]
        i = j + 1


def _fmt_value(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_certificate(cert: Certificate) -> str:
    out = []
    if cert.n is not None:
        out.append(f"n={cert.n}")
    for part, entries in enumerate((cert.upper, cert.lower)):
        if part:
            out.append("---")
        for start, length, val in _runs(entries):
            head = str(start) if length == 1 else f"({start},{length})"
            out.append(f"{head} {_fmt_value(val)}")
    return "\n".join(out) + "\n"


# -- dual block system ----------------------------------------------------------

@dataclass
class DualSystem:
    region: Region
    size_A: int
    f_rows: tuple[int, ...]      # x = 0, then (V+V) - 0
    fhat_rows: tuple[int, ...]   # xh = 0, then the nonzero spectrum

    @property
    def n(self) -> int:
        return self.region.n

    @property
    def b(self) -> dict[tuple[str, int], int]:
        return {("f", 0): self.size_A, ("fhat", 0): self.size_A ** 2}

    def row_counts(self) -> dict[str, int]:
        return {
            "transform": 1 << self.n,
            "f0": 1,
            "fhat0": 1,
            "f-sumset": len(self.f_rows) - 1,
            "fhat-spec": len(self.fhat_rows) - 1,
        }

    def column_kind(self, kind: str, x: int) -> str:
        """Which kind of column constraint the column f(x) or fhat(x) gives."""
        if kind == "f":
            if x == 0:
                return "f0"
            return "in-sumset" if x in self._f_set else "outside-sumset"
        if x == 0:
            return "fhat0"
        return "fhat-row" if x in self._fhat_set else "no-fhat-row"

    def __post_init__(self):
        self._f_set = frozenset(self.f_rows)
        self._fhat_set = frozenset(self.fhat_rows)

    def has_f_row(self, x: int) -> bool:
        return x in self._f_set

    def has_fhat_row(self, xh: int) -> bool:
        return xh in self._fhat_set

    def column_values(self, z_hat: dict[int, Fraction], z_f: dict[int, Fraction],
                      z_fhat: dict[int, Fraction]) -> tuple[list[Fraction], list[Fraction]]:
        """Exact values of (A^T z) on the f columns and on the fhat columns."""
        N = 1 << self.n
        dense = [Fraction(0)] * N
        for k, v in z_hat.items():
            dense[k] = Fraction(v)
        trans = _exact_transform(dense)
        f_cols = [trans[x] + z_f.get(x, 0) for x in range(N)]
        fhat_cols = [-dense[x] + z_fhat.get(x, 0) for x in range(N)]
        return f_cols, fhat_cols

    def btz(self, z_f: dict[int, Fraction], z_fhat: dict[int, Fraction]) -> Fraction:
        return self.size_A * Fraction(z_f.get(0, 0)) + self.size_A ** 2 * Fraction(z_fhat.get(0, 0))


def build_dual(V: Region) -> DualSystem:
    N = 1 << V.n
    if N % V.size:
        raise ValueError(f"|V|={V.size} does not divide 2^{V.n}")
    spec = V.spectrum
    f_rows = (0,) + tuple(sorted(V.sumset_support - {0}))
    fhat_rows = (0,) + tuple(int(x) for x in np.flatnonzero(spec[1:] != 0) + 1)
    return DualSystem(V, N // V.size, f_rows, fhat_rows)


def _exact_transform(vals: list[Fraction]) -> list[Fraction]:
    denom = math.lcm(*(v.denominator for v in vals))
    ints = np.array([int(v * denom) for v in vals], dtype=object)
    return [Fraction(int(t), denom) for t in wht(ints)]


# -- verification ------------------------------------------------------------------

@dataclass
class Verdict:
    status: str                       # VALID, INVALID or MALFORMED
    convention: str
    layout: str
    btz: Fraction | None = None
    violation: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.status == "VALID"

    def summary(self) -> str:
        s = f"{self.status} convention={self.convention} layout={self.layout}"
        if self.btz is not None:
            s += f" b^Tz={self.btz}"
        if self.violation:
            s += f" first-violation: {self.violation}"
        return s


def _bitrev(x: int, n: int) -> int:
    return int(format(x, f"0{n}b")[::-1], 2) if n else 0


def _index_map(convention: str, n: int):
    if convention == "bit":
        return lambda i: i
    if convention == "bitrev":
        return lambda i: _bitrev(i, n)
    raise ValueError(f"unknown index convention {convention!r}")


def verify_certificate(V: Region, cert: Certificate, convention: str = "bit",
                       layout: str = "fhat-first", dual: DualSystem | None = None) -> Verdict:
    """Check A^T z >= 0 and b^T z < 0 exactly for one convention and layout."""
    n = V.n
    if cert.n is not None and cert.n != n:
        raise ValueError(f"certificate dimension {cert.n} != region dimension {n}")
    if layout not in LAYOUTS:
        raise ValueError(f"unknown layout {layout!r}")
    dual = dual or build_dual(V)
    idx = _index_map(convention, n)
    fhat_part, f_part = (cert.upper, cert.lower) if layout == "fhat-first" else (cert.lower, cert.upper)
    z_fhat = {idx(i): Fraction(v) for i, v in fhat_part.items() if v}
    z_f = {idx(i): Fraction(v) for i, v in f_part.items() if v}
    verdict = Verdict("VALID", convention, layout, btz=dual.btz(z_f, z_fhat))
    verdict.notes.append(
        "fhat rows exist exactly where the spectrum of V is nonzero: those columns read "
        "-z_xh + z_fhat(xh) >= 0, the others -z_xh >= 0")

    missing_f = sorted(x for x in z_f if not dual.has_f_row(x))
    missing_fhat = sorted(x for x in z_fhat if not dual.has_fhat_row(x))
    if missing_f or missing_fhat:
        verdict.status = "MALFORMED"
        if missing_f:
            verdict.notes.append(f"{len(missing_f)} entries on nonexistent f rows, first x={missing_f[0]}")
        if missing_fhat:
            verdict.notes.append(
                f"{len(missing_fhat)} entries on nonexistent fhat rows, first xh={missing_fhat[0]}")
        # diagnostic reading: fhat entries act as transform-row multipliers only
        z_hat = dict(z_fhat)
        z_fhat_ok = {k: v for k, v in z_fhat.items() if dual.has_fhat_row(k)}
        verdict.violation = _first_violation(dual, z_hat, z_f, z_fhat_ok)
        return verdict

    verdict.violation = _first_violation(dual, z_fhat, z_f, z_fhat)
    if verdict.violation is not None:
        verdict.status = "INVALID"
    elif verdict.btz >= 0:
        verdict.status = "INVALID"
        verdict.violation = f"b^T z = {verdict.btz} is not negative"
    return verdict


def _first_violation(dual, z_hat, z_f, z_fhat) -> str | None:
    f_cols, fhat_cols = dual.column_values(z_hat, z_f, z_fhat)
    for x, v in enumerate(f_cols):
        if v < 0:
            return f"column f({x}) {dual.column_kind('f', x)} = {v}"
    for x, v in enumerate(fhat_cols):
        if v < 0:
            return f"column fhat({x}) {dual.column_kind('fhat', x)} = {v}"
    return None


def verify_auto(V: Region, cert: Certificate, conventions=CONVENTIONS, layouts=LAYOUTS) -> list[Verdict]:
    """Try every (convention, layout) pair; VALID verdicts first."""
    dual = build_dual(V)
    verdicts = [verify_certificate(V, cert, c, lay, dual) for lay in layouts for c in conventions]
    return sorted(verdicts, key=lambda v: not v.valid)


def certificate_scale_check(V: Region, cert: Certificate, lam, convention: str = "bit",
                            layout: str = "fhat-first") -> Verdict:
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("scale must be positive")
    return verify_certificate(V, cert.scaled(lam), convention, layout)
