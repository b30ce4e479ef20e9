import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from f2tiling.exactlp import decide_tiling_lp, to_dual_certificate
from f2tiling.farkas import (
    CertificateFormatError, build_dual, certificate_scale_check, format_certificate,
    parse_certificate, verify_auto, verify_certificate,
)
from f2tiling.gf2core import Region
from f2tiling.ideal import table1_region
from f2tiling.oracle import find_complement

from conftest import data_text, random_region


@pytest.fixture(scope="module")
def nontile_cert(nontile6):
    res, ts = decide_tiling_lp(nontile6)
    return to_dual_certificate(res.dual, ts)


def test_dual_smallest_instance():
    d = build_dual(Region.of(1, [0]))
    assert d.row_counts()["transform"] == 2
    assert d.b == {("f", 0): 2, ("fhat", 0): 4}
    assert sum(1 for v in d.b.values() if v) == 2


def test_dual_row_counts_k6():
    V = table1_region(6)
    counts = build_dual(V).row_counts()
    assert counts["f-sumset"] == len(V.sumset_support) - 1
    assert counts["fhat-spec"] == int(np.count_nonzero(V.spectrum[1:]))
    assert counts["f0"] == counts["fhat0"] == 1


def test_dual_column_tags():
    d = build_dual(Region.of(2, [0, 1]))
    assert [d.column_kind("f", x) for x in range(4)] == ["f0", "in-sumset", "outside-sumset", "outside-sumset"]
    assert [d.column_kind("fhat", x) for x in range(4)] == ["fhat0", "no-fhat-row", "fhat-row", "no-fhat-row"]


def test_parse_segments():
    c = parse_certificate("1 3\n---\n(5,3) 2.0\n(8,5,2) -1/2\n0 0.0\n")
    assert c.upper == {1: 3}
    assert c.lower == {5: 2, 6: 2, 7: 2, 8: Fraction(-1, 2), 10: Fraction(-1, 2), 12: Fraction(-1, 2)}


def test_parse_published_certificates():
    first = parse_certificate(data_text("cert_first.txt"))
    assert first.n == 12
    assert first.upper == {0: -1024, 320: 1024, 640: 1024}
    assert len(first.lower) == 16 * 64 and set(first.lower.values()) == {1}
    bases = sorted(i for i in first.lower if i - 1 not in first.lower)
    assert len(bases) == 16 and all(i + 63 in first.lower for i in bases)
    third = parse_certificate(data_text("cert_third.txt"))
    assert third.upper == {0: -8192}
    assert third.lower == {i: 1 for i in range(0, 1 << 14, 2)}


@pytest.mark.parametrize("text", [
    "garbage\n",
    "0 1\n---\n1 2\n---\n3 4\n",
    "0 1\n0 2\n",
    "(0,4,0) 1\n",
    "0 x\n",
    "0 0\n---\n",
])
def test_parse_errors(text):
    with pytest.raises(CertificateFormatError):
        parse_certificate(text)


def test_parse_range_and_header():
    with pytest.raises(CertificateFormatError):
        parse_certificate("4 1\n", n=2)
    with pytest.raises(CertificateFormatError):
        parse_certificate("n=3\n0 1\n", n=2)
    assert parse_certificate("0 1\n(0,2) 1\n").upper == {0: 1, 1: 1}


@given(st.dictionaries(st.integers(0, 63), st.fractions(max_denominator=7).filter(bool), max_size=12),
       st.dictionaries(st.integers(0, 63), st.integers(-5, 5).filter(bool), min_size=1, max_size=12))
def test_format_round_trip(upper, lower):
    from f2tiling.farkas import Certificate
    c = Certificate(6, upper, lower)
    back = parse_certificate(format_certificate(c))
    assert (back.n, back.upper, back.lower) == (6, c.upper, c.lower)


def test_verify_dimension_mismatch():
    cert = parse_certificate("0 1\n", n=3)
    with pytest.raises(ValueError):
        verify_certificate(Region.of(2, [0, 1]), cert)


def test_nontile_certificate_valid(nontile6, nontile_cert):
    v = verify_certificate(nontile6, nontile_cert)
    assert v.valid and v.btz < 0
    assert v.btz == 8 * nontile_cert.lower.get(0, 0) + 64 * nontile_cert.upper.get(0, 0)  # |A| = 8


def test_published_first_certificate():
    V = table1_region(6)
    cert = parse_certificate(data_text("cert_first.txt"), n=12)
    verdicts = verify_auto(V, cert)
    assert verdicts[0].valid
    assert (verdicts[0].convention, verdicts[0].layout) == ("bit", "f-first")
    literal = verify_certificate(V, cert, "bit", "fhat-first")
    assert literal.btz == -(2 ** 22)


def test_published_third_certificate_diagnostics():
    V = table1_region(8)
    cert = parse_certificate(data_text("cert_third.txt"), n=14)
    verdicts = verify_auto(V, cert)
    assert {v.status for v in verdicts} == {"MALFORMED"}
    assert verify_certificate(V, cert, "bit", "fhat-first").btz == 256 - 2 ** 29
    for v in verdicts:
        assert v.violation is not None and v.notes


def test_scaling(nontile6, nontile_cert):
    for lam in (1, 2, Fraction(1, 3)):
        assert certificate_scale_check(nontile6, nontile_cert, lam).valid
    V = table1_region(8)
    third = parse_certificate(data_text("cert_third.txt"), n=14)
    base = verify_certificate(V, third).status
    for lam in (2, Fraction(1, 3)):
        assert certificate_scale_check(V, third, lam).status == base
    with pytest.raises(ValueError):
        certificate_scale_check(nontile6, nontile_cert, 0)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000))
def test_scaling_property(nontile6, nontile_cert, lam):
    assert certificate_scale_check(nontile6, nontile_cert, lam).valid


def _random_sparse_cert(rng, dual, n):
    from f2tiling.farkas import Certificate
    upper = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 4))
             for x in rng.sample(dual.fhat_rows, min(len(dual.fhat_rows), rng.randint(1, 4)))}
    lower = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 4))
             for x in rng.sample(dual.f_rows, min(len(dual.f_rows), rng.randint(1, 4)))}
    upper = {k: v for k, v in upper.items() if v}
    lower = {k: v for k, v in lower.items() if v} or {0: Fraction(-1)}
    return Certificate(n, upper, lower)


def test_no_certificate_for_tiles():
    rng = random.Random(1000)
    tiles = []
    while len(tiles) < 10:
        n = rng.randint(2, 6)
        V = random_region(rng, n, 1 << rng.randint(1, n - 1))
        if find_complement(V) is not None:
            tiles.append(V)
    for i in range(1000):
        V = tiles[i % len(tiles)]
        dual = build_dual(V)
        cert = _random_sparse_cert(rng, dual, V.n)
        v = verify_certificate(V, cert, dual=dual)
        assert v.status == "INVALID"


def test_valid_implies_lp_infeasible_small():
    rng = random.Random(4)
    hits = 0
    for _ in range(40):
        n = rng.randint(2, 5)
        V = random_region(rng, n, 1 << rng.randint(1, n - 1))
        res, ts = decide_tiling_lp(V)
        if res.feasible:
            continue
        hits += 1
        cert = to_dual_certificate(res.dual, ts)
        assert verify_certificate(V, cert).valid
        assert find_complement(V) is None
    assert hits >= 3
