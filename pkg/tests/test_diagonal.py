import numpy as np
import pytest
from hypothesis import given, strategies as st

from kvn import diagonal as dg, extension as ext
from kvn.diagonal import DiagonalOperator, Tail
from kvn.errors import InvalidInput

DECAY = DiagonalOperator((), (), Tail("decay", 1.0))
PREFIX = DiagonalOperator((0, 1), (5, 3), Tail("zero", 0.0, "empty"))
ONES = DiagonalOperator((), (), Tail("constant", 1.0))
ZERO = DiagonalOperator((), (), Tail("zero"))


def test_extendable_examples():
    assert dg.is_extendable(ZERO) == (True, 0.0)
    assert dg.is_extendable(DECAY) == (True, 1.0)
    assert dg.is_extendable(PREFIX) == (True, 5.0)


@pytest.mark.parametrize("d,sup_s", [(DECAY, 1.0), (PREFIX, 5.0)])
def test_truncated_schwarz_bound_converges(d, sup_s):
    vals = [ext.schwarz_bound(dg.truncate(d, n)) for n in (4, 8, 16)]
    assert vals == sorted(vals)
    assert vals[-1] == pytest.approx(sup_s)


def test_compactness_examples():
    assert dg.is_compact_extension(DECAY)
    stable, counts = dg.net_stabilizes(DECAY, 0.5)
    assert stable and counts[-1] > 1
    assert dg.net_stabilizes(DECAY, 0.25)[0]
    assert not dg.is_compact_extension(ONES)
    phis, dist = dg.separated_family(ONES, 12)
    assert len(phis) == 12 and dist >= 1 - 1e-12
    assert dg.is_compact_extension(PREFIX)


def test_constant_tail_net_keeps_growing():
    stable, counts = dg.net_stabilizes(ONES, 0.5)
    assert not stable and counts == sorted(counts) and counts[-1] > counts[0]


def test_closed_range_examples():
    assert dg.has_closed_range_extension(PREFIX)
    assert not dg.has_closed_range_extension(ONES)
    assert dg.has_closed_range_extension(ZERO)
    assert not dg.has_closed_range_extension(DECAY)


def test_mprime_grows_linearly_for_constant_tail():
    vals = [dg.truncated_mprime(ONES, m) for m in (4, 8, 16, 32)]
    assert vals == [4.0, 8.0, 16.0, 32.0]
    # the equal-mass vector attains the ratio m
    m = 8
    op = dg.truncate(ONES, m)
    x = np.full(m, 1.0 / m)
    ratio = (x @ op.B.real @ x) / np.max(np.abs(op.B.real @ x)) ** 2
    assert ratio == pytest.approx(m)


def test_truncated_mprime_bracketed_by_engine():
    for d in (PREFIX, ONES):
        op = dg.truncate(d, 5)
        Mp = ext.krein_von_neumann(op).Mprime_min
        exact = dg.truncated_mprime(d, 5)
        assert Mp.lo <= exact * (1 + 1e-9) and exact <= Mp.hi * (1 + 1e-9)


def test_truncate_examples():
    op = dg.truncate(PREFIX, 1)
    assert np.allclose(ext.krein_von_neumann(op).A_N, [[5]])
    assert np.allclose(ext.krein_von_neumann(dg.truncate(PREFIX, 4)).A_N, np.diag([5, 3, 0, 0]))
    z = dg.truncate(ZERO, 3)
    assert np.allclose(ext.krein_von_neumann(z).A_N, 0)


def test_finite_support_outside_domain():
    d = DiagonalOperator((2,), (7,), Tail("zero", 0, "empty"))
    op = dg.truncate(d, 4)
    assert op.k == 1
    assert np.allclose(ext.krein_von_neumann(op).A_N, np.diag([0, 0, 7, 0]))
    assert dg.truncate(d, 1).k == 0


def test_rational_strings_and_validation():
    d = DiagonalOperator((0,), ("3/2",), Tail("decay", "1/2"))
    assert d.s(0) == 1.5 and d.s(3) == pytest.approx(0.125)
    with pytest.raises(InvalidInput):
        DiagonalOperator((0,), (-1,))
    with pytest.raises(InvalidInput):
        DiagonalOperator((0, 0), (1, 2))
    with pytest.raises(InvalidInput):
        Tail("geometric")
    with pytest.raises(InvalidInput):
        dg.truncate(DECAY, 0)


def test_json_roundtrip():
    for d in (DECAY, PREFIX, ONES):
        assert DiagonalOperator.from_json(d.to_json()) == d


SEQ = st.lists(st.integers(0, 20), max_size=4)
TAILS = st.builds(Tail, st.sampled_from(["zero", "constant", "decay"]),
                  st.integers(0, 5), st.sampled_from(["all", "empty"]))


@given(SEQ, TAILS, st.integers(1, 12))
def test_truncation_consistency(vals, tail, n):
    d = DiagonalOperator(tuple(range(len(vals))), tuple(vals), tail)
    res = ext.krein_von_neumann(dg.truncate(d, n))
    diag = np.array([d.s(j) for j in range(n)])
    assert np.allclose(res.A_N, np.diag(diag), atol=1e-12)
    M = ext.schwarz_bound(dg.truncate(d, n))
    assert M == pytest.approx(max(diag, default=0.0), abs=1e-12)
    assert M <= ext.schwarz_bound(dg.truncate(d, n + 1)) + 1e-12
    assert M <= dg.is_extendable(d)[1] + 1e-12


@given(SEQ, TAILS)
def test_mprime_unbounded_iff_no_closed_range(vals, tail):
    d = DiagonalOperator(tuple(range(len(vals))), tuple(vals), tail)
    a, b = dg.truncated_mprime(d, 40), dg.truncated_mprime(d, 80)
    grows = b > a + 1e-9
    assert grows == (not dg.has_closed_range_extension(d))
