import numpy as np
import pytest

from kvn import algebra as alg, extension as ext, gns, normed
from kvn._linalg import random_complex
from kvn.bounds import upper
from kvn.errors import (BadCandidate, BadIndicator, InvalidInput, NotCStarInstance, NotLeftUnit,
                        NotRepresentable, UnboundedNet)
from kvn.fixtures import (block_state, block_trace, discrete_measure, gns_fixtures, m2_column_state,
                          m2_counterexample, m2_state, representable_fixtures, s3_functional,
                          z2_functional)
from kvn.gns import IdealFunctional

FIXTURES = representable_fixtures()
IDS = [f.name for f in FIXTURES]


def zero_functional(a=None):
    a = a or alg.matrix_algebra(2)
    return IdealFunctional.total(a, np.zeros(a.dim))


def empty_ideal(a=None):
    a = a or alg.matrix_algebra(2)
    return IdealFunctional.from_generators(a, [np.zeros(a.dim)], values=[])


# ---------------------------------------------------------------- construction

def test_ideal_functional_construction():
    F = m2_column_state().F
    assert F.k == 2
    assert F([[3, 0, 5, 0]][0]) == pytest.approx(3)
    with pytest.raises(InvalidInput):
        F.coefficients([0, 1, 0, 0])
    with pytest.raises(InvalidInput):
        IdealFunctional(alg.matrix_algebra(2), np.eye(4)[:, :1], [1])
    with pytest.raises(InvalidInput):
        IdealFunctional.from_generators(alg.matrix_algebra(2), [[1, 0, 0, 0]])


def test_non_positive_functional_refused():
    a = alg.cyclic_group(2)
    with pytest.raises(NotRepresentable):
        IdealFunctional.total(a, [-1, 0]).gram()
    with pytest.raises(NotRepresentable):
        IdealFunctional.total(a, [1, 1j]).gram()


# ---------------------------------------------------------------- representability

def test_representability_examples():
    with pytest.raises(NotRepresentable) as exc:
        gns.representability_check(m2_counterexample().F)
    w = exc.value.witness
    assert abs(w["f(a)"]) > 0.5 and abs(w["f(a*a)"]) < 1e-12
    assert gns.representability_check(zero_functional()).C_min == 0
    rep = gns.representability_check(z2_functional().F)
    assert rep.C_min == pytest.approx(1.0, abs=1e-12)
    assert rep.oracle == pytest.approx(1.0, abs=1e-9)


def test_z2_c_min_by_grid():
    G = np.array([[1, 0.5], [0.5, 1]])
    v = np.array([1, 0.5])
    t = np.linspace(0, np.pi, 100001)
    C = np.vstack([np.cos(t), np.sin(t)])
    ratio = (v @ C) ** 2 / np.einsum("it,ij,jt->t", C, G, C)
    assert ratio.max() == pytest.approx(1.0, rel=1e-8)


def test_counterexample_witness_is_deterministic():
    w1 = pytest.raises(NotRepresentable, gns.representability_check, m2_counterexample().F).value.witness
    w2 = pytest.raises(NotRepresentable, gns.representability_check, m2_counterexample().F).value.witness
    assert np.array_equal(w1["a"], w2["a"])
    F = m2_counterexample().F
    a, aa = F.algebra, w1["a"]
    assert abs(F(a.multiply(a.involute(aa), aa))) < 1e-12 and abs(F(aa)) > 0.5


# ---------------------------------------------------------------- Schwarz bound

def test_schwarz_functional_examples():
    assert gns.schwarz_functional_bound(zero_functional()) == 0
    F = z2_functional().F
    M = gns.schwarz_functional_bound(F)
    assert M <= 1 + 1e-9
    # the l1 unit ball has extreme points phase * delta_h
    a = F.algebra
    oracle = 0.0
    for h in range(2):
        num = np.array([F(a.multiply(a.involute(a.basis(h)), a.basis(j))) for j in range(2)])
        oracle = max(oracle, ext.rayleigh_sup(np.conj(num), F.gram()))
    assert M == pytest.approx(oracle, rel=1e-9)
    M = gns.schwarz_functional_bound(block_trace().F)
    assert upper(M) == pytest.approx(2, rel=1e-6)


@pytest.mark.parametrize("fx", [f for f in FIXTURES if f.F.k == f.F.algebra.dim], ids=lambda f: f.name)
def test_total_functionals_continuous(fx):
    M = gns.schwarz_functional_bound(fx.F)
    res = ext.krein_von_neumann(fx.F.operator())
    assert upper(M) <= upper(normed.operator_norm(res.A_N, fx.F.algebra.normed_space())) * (1 + 1e-9)


@pytest.mark.parametrize("fx", [f for f in FIXTURES if f.F.algebra.involution_isometric], ids=lambda f: f.name)
def test_schwarz_constant_below_c_min(fx):
    M = gns.schwarz_functional_bound(fx.F)
    C = gns.representability_check(fx.F).C_min
    assert M <= C + 1e-9 if not hasattr(M, "lo") else M.lo <= C + 1e-9


# ---------------------------------------------------------------- GNS

def test_gns_examples():
    d = gns.gns(zero_functional())
    assert d.H_dim == 0 and d.zeta.size == 0 and not np.any(d.fN)
    F = z2_functional().F
    d = gns.gns(F)
    assert d.H_dim == 2
    swap = d.pi[1]
    assert np.allclose(swap @ swap, np.eye(2), atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(swap), [-1, 1])
    for j in range(2):
        assert d.state(F.D[:, j]) == pytest.approx(F.values[j], abs=1e-9)
    F = m2_state().F
    d = gns.gns(F)
    assert d.H_dim == 2
    for i in range(4):
        # pi(x) is unitarily equivalent to x on C^2, so traces agree
        assert np.trace(d.pi[i]) == pytest.approx(np.trace(F.algebra.represent(F.algebra.basis(i))), abs=1e-12)


@pytest.mark.parametrize("fx", gns_fixtures(), ids=lambda f: f.name)
def test_gns_invariants(fx):
    F = fx.F
    d = gns.gns(F, check=False)
    assert gns.check_gns(F, d)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = random_complex(rng, F.algebra.dim)
        lhs, rhs = gns.cyclic_vector_identity(F, d, x)
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_gns_refuses_counterexample():
    with pytest.raises(NotRepresentable):
        gns.gns(m2_counterexample().F)


# ---------------------------------------------------------------- minimal extension

def test_minimal_extension_examples():
    fN, _, cert = gns.minimal_extension(zero_functional())
    assert not np.any(fN) and cert.ok
    for fx in (z2_functional(), m2_state()):
        fN, _, _ = gns.minimal_extension(fx.F)
        assert np.allclose(fN, fx.F.values, atol=1e-9)
    fN, _, _ = gns.minimal_extension(block_trace().F)
    assert np.allclose(fN, [1, 0, 0, 1, 0], atol=1e-9)


@pytest.mark.parametrize("fx", FIXTURES, ids=IDS)
def test_minimal_extension_certificate(fx):
    fN, _, cert = gns.minimal_extension(fx.F, samples=20)
    assert cert.ok and cert.representable
    if fx.expected_fN is not None:
        assert np.allclose(fN, fx.expected_fN, atol=1e-9)


def test_functional_minimality_examples():
    F = block_trace().F
    fN, _, _ = gns.minimal_extension(F)
    assert gns.verify_functional_minimality(F, fN, fN)
    for lam in (0.1, 1.0, 5.0):
        assert gns.verify_functional_minimality(F, fN, fN + lam * np.array([0, 0, 0, 0, 1]))
    bad = m2_counterexample().F
    for extra in ([0, 0, 0, 0], [1, 2, 0, -1], [0, 1j, 0, 3]):
        cand = np.array(extra, complex)
        cand[2] = 1      # f([[u, 0], [v, 0]]) = v fixes the E21 coordinate
        with pytest.raises(BadCandidate):
            gns.verify_functional_minimality(bad, np.zeros(4), cand)


def test_minimality_rejects_non_extensions():
    F = block_trace().F
    fN, _, _ = gns.minimal_extension(F)
    with pytest.raises(BadCandidate):
        gns.verify_functional_minimality(F, fN, fN + np.array([0.1, 0, 0, 0, 0]))


def test_minimal_extension_below_larger_one_but_not_above():
    F = block_trace().F
    fN, _, _ = gns.minimal_extension(F)
    bigger = fN + np.array([0, 0, 0, 0, 1.0])
    assert not gns.verify_functional_minimality(F, bigger, fN)


@pytest.mark.parametrize("fx", [f for f in FIXTURES if f.F.algebra.rep is not None], ids=lambda f: f.name)
def test_generated_candidates_are_representable_extensions(fx):
    fN, _, _ = gns.minimal_extension(fx.F, samples=0, check=False)
    for cand in gns.representable_candidates(fx.F, fN, count=10, seed=4):
        assert gns.verify_functional_minimality(fx.F, fN, cand, samples=20)


# ---------------------------------------------------------------- unital and approximate units

def test_unital_examples():
    fx = m2_state()
    assert np.allclose(gns.unital_minimal_extension(fx.F, fx.left_unit), fx.F.values, atol=1e-9)
    fx = m2_column_state()
    assert np.allclose(gns.unital_minimal_extension(fx.F, np.eye(2).ravel()), [1, 0, 0, 0], atol=1e-9)
    with pytest.raises(NotRepresentable):
        gns.unital_minimal_extension(m2_counterexample().F, np.eye(2).ravel())


@pytest.mark.parametrize("fx", FIXTURES, ids=IDS)
def test_unital_agrees_with_gns(fx):
    fN = gns.unital_minimal_extension(fx.F, fx.left_unit)
    ref, _, _ = gns.minimal_extension(fx.F, samples=0, check=False)
    assert np.max(np.abs(fN - ref)) <= 1e-9


def test_left_unit_validated():
    fx = block_trace()
    with pytest.raises(NotLeftUnit):
        gns.unital_minimal_extension(fx.F, [1, 0, 0, 0, 0])


def test_approximate_unit_examples():
    fx = block_trace()
    rep = gns.approximate_unit_limit(fx.F, [fx.left_unit] * 4)
    assert rep.deviations == pytest.approx([0] * 4, abs=1e-12)
    fx = discrete_measure()
    rep = gns.approximate_unit_limit(fx.F, gns.indicator_net(3, [0, 1]))
    assert rep.monotone and rep.final < 1e-9
    assert rep.deviations[0] > rep.deviations[-1]
    F = empty_ideal()
    units = [np.eye(2).ravel(), 0.5 * np.eye(2).ravel()]
    rep = gns.approximate_unit_limit(F, units)
    assert not np.any(rep.fN) and rep.deviations == [0.0, 0.0]


def test_unbounded_net_refused():
    fx = discrete_measure()
    with pytest.raises(UnboundedNet):
        gns.approximate_unit_limit(fx.F, [np.array([2.0, 2.0, 0])])


# ---------------------------------------------------------------- unitization

def test_unitization_examples():
    a = alg.cyclic_group(2)
    rep = gns.unitization_extension(a, [0, 0], samples=5)
    assert not np.any(rep.fN)
    rep = gns.unitization_extension(a, [1, 0.5], samples=10)
    assert rep.unit_value == pytest.approx(1.0, abs=1e-9)
    assert rep.sup_formula_error <= 1e-8
    # A is unital, so f_N(l, b) = f(l u + b)
    assert np.allclose(rep.fN, [1, 1, 0.5], atol=1e-9)
    fN = gns.unital_minimal_extension(IdealFunctional(rep.algebra, np.eye(3)[:, 1:], [1, 0.5]), [1, 0, 0])
    assert np.allclose(fN, rep.fN, atol=1e-9)


def test_unitization_of_non_unital_algebra():
    # l1 of the zero-product algebra C: x*y = 0, f = identity coordinate is positive (f(a*a) = 0)
    a = alg.StarAlgebra(np.zeros((1, 1, 1)), np.eye(1), {"kind": "l1"})
    with pytest.raises(NotRepresentable):
        gns.unitization_extension(a, [1])
    rep = gns.unitization_extension(a, [0])
    assert not np.any(rep.fN)


# ---------------------------------------------------------------- C*-instances

def test_norm_chain_examples():
    chain = gns.cstar_ideal_norm_check(block_trace().F)
    assert chain.consistent() and chain.f_norm == pytest.approx(2)
    a = alg.block_algebra((2, 1))
    F = IdealFunctional.from_generators(a, [[1, 0, 0, 1, 0]], functional=np.zeros(5))
    chain = gns.cstar_ideal_norm_check(F)
    assert chain.consistent() and chain.f_norm == 0
    chain = gns.cstar_ideal_norm_check(block_state().F)
    assert chain.consistent() and chain.fN_norm == pytest.approx(1)


def test_norm_chain_preconditions():
    with pytest.raises(NotCStarInstance):
        gns.cstar_ideal_norm_check(z2_functional().F)
    with pytest.raises(NotCStarInstance):
        gns.cstar_ideal_norm_check(m2_column_state().F)


def test_completeness_examples():
    assert gns.completeness_bound(alg.cyclic_group(2), [0, 0]) == (0.0, True)
    L, empty = gns.completeness_bound(alg.cyclic_group(2), [1, 0.5])
    assert not empty and np.isfinite(upper(L)) and L.lo > 0
    L, _ = gns.completeness_bound(alg.matrix_algebra(2), [1, 0, 0, 0])
    assert L.lo == pytest.approx(1, rel=1e-6) and L.hi == pytest.approx(1, rel=1e-6)


def test_completeness_bound_is_least_constant():
    a = alg.cyclic_group(2)
    F = IdealFunctional.total(a, [1, 0.5])
    L, _ = gns.completeness_bound(a, [1, 0.5])
    rng = np.random.default_rng(0)
    M = gns.schwarz_functional_bound(F)
    for _ in range(50):
        c = random_complex(rng, 2)
        q = (c.conj() @ F.gram() @ c).real
        s = max(abs(F(a.multiply(a.involute(x), c))) ** 2 for x in (np.array([1, 0]), np.array([0, 1])))
        assert q <= upper(L) * s * (1 + 1e-9)
        assert s <= M * q * (1 + 1e-9)


# ---------------------------------------------------------------- discrete measures

def test_discrete_measure_examples():
    rep = gns.discrete_measure_scenario([0, 0, 0], [0, 1], [1, 1, 0])
    assert rep.mu_K_norm == 0 and rep.fN_norm == 0 and rep.competitor_norm == 0
    rep = gns.discrete_measure_scenario([1, 2, 4], [0, 1], [1, 1, 0])
    assert rep.mu_K_norm == 3 and rep.fN_norm == pytest.approx(3) and rep.chain_ok
    assert np.allclose(rep.fN, rep.competitor) and not rep.strict
    rep = gns.discrete_measure_scenario([1, 2, 4], [0, 1], [1, 1, 0.5])
    assert rep.competitor_extends and rep.competitor_norm == pytest.approx(5)
    assert rep.mu_eK == pytest.approx(5) and rep.sup_side == 3 and rep.strict


@pytest.mark.parametrize("eK", [[1, 0.5, 0], [1, 1, 1.5], [1, 1, -0.1], [1, 1]])
def test_bad_indicator(eK):
    with pytest.raises(BadIndicator):
        gns.discrete_measure_scenario([1, 2, 4], [0, 1], eK)


def test_measure_ideal_validation():
    with pytest.raises(InvalidInput):
        gns.discrete_measure_functional([1, -1], [0])
    with pytest.raises(InvalidInput):
        gns.discrete_measure_functional([1, 1], [2])


# ---------------------------------------------------------------- S3 specifics

def test_s3_extension_is_the_symmetrizer():
    # the ideal l1(S3) p carries the permutation representation on S3 / {e, t}
    fx = s3_functional()
    fN, data, _ = gns.minimal_extension(fx.F)
    assert data.H_dim == 3
    assert sorted(np.round(np.trace(data.pi, axis1=1, axis2=2).real, 9)) == [0, 0, 1, 1, 1, 3]
    assert np.allclose(fN, fx.expected_fN, atol=1e-9)
