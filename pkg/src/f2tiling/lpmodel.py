"""Primal feasibility LP for tiling: b_u = (chi_A * chi_A)(u), c_x = chi_A^(x)^2.

Rows link c to b through the Walsh-Hadamard transform, either densely or via
butterfly intermediates t_<i>_<j>. With pass-through, a butterfly whose input
is identically zero forwards the other input (or its negation) instead of
creating a new variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf2core import Region, wht


@dataclass
class LpBuildOptions:
    use_butterfly: bool = True
    use_pass_through: bool = True
    full_rank: bool = False
    halving_equation: bool = False
    integer_markers: bool = False

    def __post_init__(self):
        if self.use_pass_through and not self.use_butterfly:
            raise ValueError("pass-through requires the butterfly formulation")


@dataclass
class Row:
    name: str
    coefs: dict[int, int]
    sense: str          # "=", "<=" or ">="
    rhs: Fraction


@dataclass
class LpModel:
    name: str = "tiling"
    var_names: list[str] = field(default_factory=list)
    lower: list = field(default_factory=list)     # None means -inf
    upper: list = field(default_factory=list)     # None means +inf
    integer: list[bool] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    eliminated: list[str] = field(default_factory=list)
    orientation: str = ""                         # "c->b" or "b->c"
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def add_var(self, name: str, lo=0, hi=None, integer: bool = False) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable {name}")
        self._index[name] = len(self.var_names)
        self.var_names.append(name)
        self.lower.append(lo)
        self.upper.append(hi)
        self.integer.append(integer)
        return self._index[name]

    def add_row(self, name: str, coefs: dict[int, int], sense: str, rhs) -> None:
        coefs = {j: c for j, c in coefs.items() if c}
        self.rows.append(Row(name, coefs, sense, Fraction(rhs)))

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index


def model_stats(model: LpModel) -> tuple[int, int, int]:
    return len(model.rows), len(model.var_names), sum(len(r.coefs) for r in model.rows)


def stats_line(model: LpModel) -> str:
    rows, nvars, nnz = model_stats(model)
    return f"#RESULT rows={rows} vars={nvars} nonzeros={nnz} orientation={model.orientation}"


def _parity(x: int) -> int:
    return x.bit_count() & 1


def orientation_for(V: Region) -> str:
    """Start the transform from whichever side has more variables fixed to zero."""
    spec_support = int(np.count_nonzero(V.spectrum))
    sum_support = len(V.sumset_support)
    return "c->b" if spec_support >= sum_support else "b->c"


def build_primal(V: Region, opts: LpBuildOptions | None = None) -> LpModel:
    opts = opts or LpBuildOptions()
    n = V.n
    N = 1 << n
    if N % V.size:
        raise ValueError(f"|V|={V.size} does not divide 2^{n}")
    size_A = N // V.size
    spec = V.spectrum
    b_zero = set(V.sumset_support) - {0}
    c_zero = {int(x) for x in np.flatnonzero(spec)} - {0}

    model = LpModel(orientation=orientation_for(V))
    ref: dict[str, dict[int, int | None]] = {"b": {}, "c": {}}

    c_hi = size_A * size_A
    if opts.full_rank:
        c_hi_rest = min(c_hi, (size_A - 2) ** 2)
    else:
        c_hi_rest = c_hi
    for u in range(N):
        if u in b_zero and opts.use_pass_through:
            model.eliminated.append(f"b_{u}")
            ref["b"][u] = None
            continue
        if u == 0:
            lo = hi = size_A
        elif u in b_zero:
            lo = hi = 0
        else:
            lo, hi = 0, size_A
        ref["b"][u] = model.add_var(f"b_{u}", lo, hi, integer=opts.integer_markers)
    for x in range(N):
        if x in c_zero and opts.use_pass_through:
            model.eliminated.append(f"c_{x}")
            ref["c"][x] = None
            continue
        if x == 0:
            lo = hi = c_hi
        elif x in c_zero:
            lo = hi = 0
        else:
            lo, hi = 0, c_hi_rest
        ref["c"][x] = model.add_var(f"c_{x}", lo, hi)

    if model.orientation == "c->b":
        src, tgt, scale, tgt0 = "c", "b", N, size_A
    else:
        src, tgt, scale, tgt0 = "b", "c", 1, size_A * size_A

    if opts.use_butterfly:
        _butterfly_rows(model, n, ref[src], ref[tgt], scale)
        if opts.halving_equation:
            model.add_row("sum", {ref[src][s]: 1 for s in range(N) if ref[src][s] is not None},
                          "=", scale * tgt0)
    else:
        _dense_rows(model, n, ref[src], ref[tgt], scale, tgt0, opts.halving_equation)
    return model


def _dense_rows(model, n, src, tgt, scale, tgt0, halving):
    N = 1 << n
    if halving:
        model.add_row("sum", {src[s]: 1 for s in range(N)}, "=", scale * tgt0)
    for j in range(N):
        if halving and j == 0:
            continue
        coefs = {tgt[j]: scale}
        if halving:
            for s in range(N):
                if not _parity(j & s):
                    coefs[src[s]] = coefs.get(src[s], 0) - 2
            model.add_row(f"tr_{j}", coefs, "=", -scale * tgt0)
        else:
            for s in range(N):
                coefs[src[s]] = coefs.get(src[s], 0) - (1 - 2 * _parity(j & s))
            model.add_row(f"tr_{j}", coefs, "=", 0)


def _butterfly_rows(model, n, src, tgt, scale):
    """Layer i combines indices differing in bit n-1-i. A reference is None
    (identically zero) or a signed variable (sign, index)."""
    N = 1 << n
    refs = [None if src[j] is None else (1, src[j]) for j in range(N)]
    for i in range(n):
        h = 1 << (n - i - 1)
        last = i == n - 1
        new = [None] * N
        for start in range(0, N, 2 * h):
            for lo in range(start, start + h):
                hi = lo + h
                p, q = refs[lo], refs[hi]
                if last:
                    _link(model, lo, _combine(p, q, 1), tgt[lo], scale)
                    _link(model, hi, _combine(p, q, -1), tgt[hi], scale)
                    continue
                if q is None:
                    new[lo] = new[hi] = p
                elif p is None:
                    new[lo], new[hi] = q, (-q[0], q[1])
                else:
                    for out, sgn in ((lo, 1), (hi, -1)):
                        v = model.add_var(f"t_{i + 1}_{out}", None, None)
                        coefs = {v: 1}
                        for term in _combine(p, q, sgn):
                            coefs[term[1]] = coefs.get(term[1], 0) - term[0]
                        model.add_row(f"bf_{i + 1}_{out}", coefs, "=", 0)
                        new[out] = (1, v)
        refs = new
    if n == 0:
        _link(model, 0, [refs[0]] if refs[0] else [], tgt[0], scale)


def _combine(p, q, sgn):
    terms = []
    if p is not None:
        terms.append(p)
    if q is not None:
        terms.append((sgn * q[0], q[1]))
    return terms


def _link(model, j, terms, target, scale):
    coefs: dict[int, int] = {}
    for s, v in terms:
        coefs[v] = coefs.get(v, 0) - s
    if target is not None:
        coefs[target] = coefs.get(target, 0) + scale
    if any(coefs.values()):
        model.add_row(f"link_{j}", coefs, "=", 0)


# -- witnesses ---------------------------------------------------------------------

def butterfly_layers(vec: Sequence[int], n: int) -> list[list[int]]:
    """Partial transforms after each butterfly layer (highest bit first)."""
    cur = [int(v) for v in vec]
    layers = [cur]
    for i in range(n):
        h = 1 << (n - i - 1)
        nxt = list(cur)
        for start in range(0, 1 << n, 2 * h):
            for lo in range(start, start + h):
                a, b = cur[lo], cur[lo + h]
                nxt[lo], nxt[lo + h] = a + b, a - b
        layers.append(nxt)
        cur = nxt
    return layers


def assignment(model: LpModel, n: int, b_vals: Sequence[int], c_vals: Sequence[int]) -> dict[str, int]:
    """Values for every model variable induced by b and c."""
    src = c_vals if model.orientation == "c->b" else b_vals
    layers = butterfly_layers(src, n)
    vals = {}
    for name in list(model.var_names) + list(model.eliminated):
        kind, *rest = name.split("_")
        if kind == "b":
            vals[name] = int(b_vals[int(rest[0])])
        elif kind == "c":
            vals[name] = int(c_vals[int(rest[0])])
        else:
            vals[name] = layers[int(rest[0])][int(rest[1])]
    return vals


def violations(model: LpModel, values: dict[str, int]) -> list[str]:
    out = []
    for name in model.eliminated:
        if values[name] != 0:
            out.append(f"eliminated {name} = {values[name]}")
    for j, name in enumerate(model.var_names):
        v = values[name]
        lo, hi = model.lower[j], model.upper[j]
        if (lo is not None and v < lo) or (hi is not None and v > hi):
            out.append(f"bound {name} = {v} not in [{lo}, {hi}]")
    x = [values[nm] for nm in model.var_names]
    for row in model.rows:
        lhs = sum(c * x[j] for j, c in row.coefs.items())
        ok = {"=": lhs == row.rhs, "<=": lhs <= row.rhs, ">=": lhs >= row.rhs}[row.sense]
        if not ok:
            out.append(f"row {row.name}: {lhs} {row.sense} {row.rhs} fails")
    return out


def witness_check(V: Region, A: Region, opts: LpBuildOptions | None = None,
                  model: LpModel | None = None) -> bool:
    """Substitute b = chi_A * chi_A and c = |chi_A^|^2 into the model."""
    if V.n != A.n or V.size * A.size != 1 << V.n:
        raise ValueError("|V||A| must equal 2^n")
    model = model or build_primal(V, opts)
    b_vals = [int(v) for v in A.autocorrelation]
    c_vals = [int(v) ** 2 for v in A.spectrum]
    return not violations(model, assignment(model, V.n, b_vals, c_vals))


def dense_transform_holds(n: int, b_vals: Sequence[int], c_vals: Sequence[int]) -> bool:
    arr = np.array([int(v) for v in b_vals], dtype=object)
    return [int(v) for v in wht(arr)] == [int(v) for v in c_vals]


# -- LP text and free MPS ---------------------------------------------------------

TERMS_PER_LINE = 8
_SENSE_MPS = {"=": "E", "<=": "L", ">=": "G"}
_MPS_SENSE = {v: k for k, v in _SENSE_MPS.items()}


def _num(v) -> str:
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    return repr(v.numerator / v.denominator)


def _parse_num(tok: str) -> Fraction:
    return Fraction(tok)


def _lp_terms(model: LpModel, coefs: dict[int, int]) -> list[str]:
    out = []
    for j in sorted(coefs):
        c = coefs[j]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = model.var_names[j] if mag == 1 else f"{mag} {model.var_names[j]}"
        out.append(f"{sign} {body}")
    if out and out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _lp_bound(name, lo, hi) -> str:
    if lo is None and hi is None:
        return f" {name} free"
    if lo is not None and hi is not None and lo == hi:
        return f" {name} = {_num(lo)}"
    left = "-inf" if lo is None else _num(lo)
    right = "+inf" if hi is None else _num(hi)
    return f" {left} <= {name} <= {right}"


def export_lp(model: LpModel, format: str = "lp") -> str:
    """Deterministic serialization as CPLEX LP text ("lp") or free MPS ("mps")."""
    if format == "lp":
        return _write_lp(model)
    if format == "mps":
        return _write_mps(model)
    raise ValueError(f"unknown format {format!r}; use 'lp' or 'mps'")


def parse_lp(text: str, format: str = "lp") -> LpModel:
    if format == "lp":
        return _read_lp(text)
    if format == "mps":
        return _read_mps(text)
    raise ValueError(f"unknown format {format!r}; use 'lp' or 'mps'")


def _write_lp(model: LpModel) -> str:
    lines = [f"\\ Problem name: {model.name}"]
    if model.orientation:
        lines.append(f"\\ orientation={model.orientation}")
    lines += ["Minimize", " obj:", "Subject To"]
    for row in model.rows:
        terms = _lp_terms(model, row.coefs) or ["0 " + model.var_names[0]]
        chunks = [" ".join(terms[i:i + TERMS_PER_LINE]) for i in range(0, len(terms), TERMS_PER_LINE)]
        lines.append(f" {row.name}: " + chunks[0])
        lines.extend("   " + ch for ch in chunks[1:])
        lines[-1] += f" {row.sense} {_num(row.rhs)}"
    lines.append("Bounds")
    for j, name in enumerate(model.var_names):
        lines.append(_lp_bound(name, model.lower[j], model.upper[j]))
    ints = [nm for nm, flag in zip(model.var_names, model.integer) if flag]
    if ints:
        lines.append("Generals")
        lines.extend(" " + nm for nm in ints)
    lines.append("End")
    return "\n".join(lines) + "\n"


def _read_lp(text: str) -> LpModel:
    model = LpModel()
    section = None
    pending: list[str] = []
    rows: list[tuple[str, list[str]]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            body = line[1:].strip()
            if body.startswith("Problem name:"):
                model.name = body.split(":", 1)[1].strip()
            elif body.startswith("orientation="):
                model.orientation = body.split("=", 1)[1]
            continue
        key = line.lower()
        if key in ("minimize", "maximize", "subject to", "bounds", "generals", "end"):
            section = key
            continue
        if section == "subject to":
            pending.extend(line.split())
            if pending[-2] in ("=", "<=", ">="):
                name = pending[0].rstrip(":")
                rows.append((name, pending[1:]))
                pending = []
        elif section == "bounds":
            _read_lp_bound(model, line.split())
        elif section == "generals":
            model.integer[model.index(line)] = True
    if pending:
        raise ValueError("unterminated constraint in LP text")
    for name, toks in rows:
        sense, rhs = toks[-2], _parse_num(toks[-1])
        coefs: dict[int, int] = {}
        sign, mag = 1, 1
        for tok in toks[:-2]:
            if tok in "+-":
                sign = -1 if tok == "-" else 1
            elif tok[0].isdigit():
                mag = int(tok)
            else:
                if tok not in model:
                    model.add_var(tok)
                j = model.index(tok)
                coefs[j] = coefs.get(j, 0) + sign * mag
                sign, mag = 1, 1
        model.add_row(name, coefs, sense, rhs)
    return model


def _read_lp_bound(model: LpModel, toks: list[str]) -> None:
    def val(t):
        return None if t in ("-inf", "+inf", "inf") else _parse_num(t)

    if len(toks) == 2 and toks[1] == "free":
        lo, hi, name = None, None, toks[0]
    elif len(toks) == 3 and toks[1] == "=":
        name = toks[0]
        lo = hi = _parse_num(toks[2])
    elif len(toks) == 5 and toks[1] == toks[3] == "<=":
        lo, name, hi = val(toks[0]), toks[2], val(toks[4])
    else:
        raise ValueError(f"unsupported bound line: {' '.join(toks)}")
    lo = _intify(lo)
    hi = _intify(hi)
    if name in model:
        j = model.index(name)
        model.lower[j], model.upper[j] = lo, hi
    else:
        model.add_var(name, lo, hi)


def _intify(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def _write_mps(model: LpModel) -> str:
    lines = [f"NAME {model.name}"]
    if model.orientation:
        lines.append(f"* orientation={model.orientation}")
    lines += ["ROWS", " N obj"]
    lines.extend(f" {_SENSE_MPS[r.sense]} {r.name}" for r in model.rows)
    lines.append("COLUMNS")
    cols: list[list[tuple[str, int]]] = [[] for _ in model.var_names]
    for row in model.rows:
        for j, c in sorted(row.coefs.items()):
            cols[j].append((row.name, c))
    in_int = False
    for j, name in enumerate(model.var_names):
        if model.integer[j] != in_int:
            tag = "INTORG" if model.integer[j] else "INTEND"
            lines.append(f" MARKER 'MARKER' '{tag}'")
            in_int = model.integer[j]
        entries = cols[j] or [("obj", 0)]
        lines.extend(f" {name} {rn} {c}" for rn, c in entries)
    if in_int:
        lines.append(" MARKER 'MARKER' 'INTEND'")
    lines.append("RHS")
    lines.extend(f" rhs {r.name} {_num(r.rhs)}" for r in model.rows if r.rhs != 0)
    lines.append("BOUNDS")
    for j, name in enumerate(model.var_names):
        lo, hi = model.lower[j], model.upper[j]
        if lo is None and hi is None:
            lines.append(f" FR bnd {name}")
        elif lo is not None and hi is not None and lo == hi:
            lines.append(f" FX bnd {name} {_num(lo)}")
        else:
            if lo is None:
                lines.append(f" MI bnd {name}")
            elif lo != 0:
                lines.append(f" LO bnd {name} {_num(lo)}")
            if hi is not None:
                lines.append(f" UP bnd {name} {_num(hi)}")
            elif model.integer[j]:
                lines.append(f" PL bnd {name}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def _read_mps(text: str) -> LpModel:
    model = LpModel()
    section = None
    senses: dict[str, str] = {}
    order: list[str] = []
    coefs: dict[str, dict[int, int]] = {}
    rhs: dict[str, Fraction] = {}
    integer = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            if line[1:].strip().startswith("orientation="):
                model.orientation = line.split("=", 1)[1]
            continue
        toks = line.split()
        if not raw[0].isspace():
            section = toks[0]
            if section == "NAME" and len(toks) > 1:
                model.name = toks[1]
            continue
        if section == "ROWS":
            kind, name = toks
            if kind != "N":
                senses[name] = _MPS_SENSE[kind]
                order.append(name)
                coefs[name] = {}
        elif section == "COLUMNS":
            if len(toks) == 3 and toks[1] == "'MARKER'":
                integer = toks[2] == "'INTORG'"
                continue
            name = toks[0]
            if name not in model:
                model.add_var(name, integer=integer)
            j = model.index(name)
            for rn, val in zip(toks[1::2], toks[2::2]):
                if rn in coefs:
                    coefs[rn][j] = coefs[rn].get(j, 0) + int(val)
        elif section == "RHS":
            for rn, val in zip(toks[1::2], toks[2::2]):
                rhs[rn] = _parse_num(val)
        elif section == "BOUNDS":
            kind, name = toks[0], toks[2]
            j = model.index(name)
            val = _intify(_parse_num(toks[3])) if len(toks) > 3 else None
            if kind == "FR":
                model.lower[j] = model.upper[j] = None
            elif kind == "FX":
                model.lower[j] = model.upper[j] = val
            elif kind == "MI":
                model.lower[j] = None
            elif kind == "LO":
                model.lower[j] = val
            elif kind == "UP":
                model.upper[j] = val
            elif kind == "PL":
                model.upper[j] = None
            else:
                raise ValueError(f"unsupported bound type {kind}")
        elif section not in ("ENDATA",):
            raise ValueError(f"unexpected line in section {section}: {line}")
    for name in order:
        model.add_row(name, coefs[name], senses[name], rhs.get(name, 0))
    return model
