import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from degone.errors import BudgetExceeded, EqualPoints, NotOnCurve, OnSupport, TorsionPoint
from degone.ellcurve import (
    INFINITY, DivisorSpecEll, EllCurve, FieldExtension, HalfExponentIdeal, apply_sigma,
    curve_automorphisms, ell_add, ell_height_report, ell_mul, ell_neg, ell_place_set, ideal_ID,
    ideal_IQ, ideal_JD, ideal_sigma_stable, is_exceptional_ell, is_torsion, run_ell_family,
    search_points,
)
from degone.heights import ArchPlace, abs_height
from degone.idealfact import split_prime
from degone.qfield import make_field


@pytest.fixture(scope="module")
def over_Q(QQ):
    rel = FieldExtension(QQ, QQ)
    E = EllCurve(0, -2, rel)
    return E, rel, E.point(3, 5)


@pytest.fixture(scope="module")
def over_Qi(QQ, Qi):
    rel = FieldExtension(QQ, Qi)
    E = EllCurve(0, -2, rel)
    return E, rel, E.point(3, 5), E.point(1, Qi.gen())


def _pool(E, P, P1, r=3):
    return [ell_add(E, ell_mul(E, a, P), ell_mul(E, b, P1)) for a in range(-r, r + 1) for b in range(-r, r + 1)]


# -- group law


def test_doubling_by_hand(over_Q):
    E, _, P = over_Q
    two = ell_add(E, P, P)
    assert (two.x, two.y) == (Fraction(129, 100), Fraction(-383, 1000))
    assert ell_mul(E, 2, P) == two


def test_special_cases(over_Q):
    E, _, P = over_Q
    assert ell_add(E, P, INFINITY) == P
    assert ell_add(E, INFINITY, P) == P
    assert ell_add(E, P, ell_neg(E, P)) == INFINITY
    assert ell_mul(E, 0, P) == INFINITY
    assert ell_mul(E, 1, P) == P
    assert ell_mul(E, -1, P) == ell_neg(E, P)


def test_not_on_curve(over_Q):
    E, rel, P = over_Q
    with pytest.raises(NotOnCurve):
        E.point(1, 1)
    bogus = P._replace(y=P.y + 1)
    with pytest.raises(NotOnCurve):
        ell_add(E, P, bogus)


def test_curve_validation(QQ):
    rel = FieldExtension(QQ, QQ)
    with pytest.raises(ValueError):
        EllCurve(0, 0, rel)  # singular
    with pytest.raises(ValueError):
        EllCurve(Fraction(1, 2), 1, rel)


def test_associativity_200_triples(over_Qi):
    E, _, P, P1 = over_Qi
    pool = _pool(E, P, P1, r=2)
    rng = random.Random(20)
    for _ in range(200):
        A, B, C = (rng.choice(pool) for _ in range(3))
        assert ell_add(E, ell_add(E, A, B), C) == ell_add(E, A, ell_add(E, B, C))


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_group_axioms_property(a, b, c, d):
    K = make_field("x^2+1")
    rel = FieldExtension(make_field("x"), K)
    E = EllCurve(0, -2, rel)
    P, P1 = E.point(3, 5), E.point(1, K.gen())
    A = ell_add(E, ell_mul(E, a, P), ell_mul(E, b, P1))
    B = ell_add(E, ell_mul(E, c, P), ell_mul(E, d, P1))
    assert ell_add(E, A, B) == ell_add(E, B, A)
    assert ell_add(E, A, ell_neg(E, A)) == INFINITY
    assert E.contains(ell_add(E, A, B))


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_mul_is_additive(m, n):
    QQ = make_field("x")
    E = EllCurve(0, -2, FieldExtension(QQ, QQ))
    P = E.point(3, 5)
    assert ell_mul(E, m + n, P) == ell_add(E, ell_mul(E, m, P), ell_mul(E, n, P))


def test_torsion_detection(QQ):
    E = EllCurve(0, 1, FieldExtension(QQ, QQ))
    assert is_torsion(E, E.point(2, 3)) == 6
    assert is_torsion(E, E.point(-1, 0)) == 2
    E2 = EllCurve(0, -2, FieldExtension(QQ, QQ))
    assert is_torsion(E2, E2.point(3, 5)) is None


# -- automorphisms


def test_aut_generic_curve(over_Qi):
    E = over_Qi[0]
    # a = 0 but Q(i) lacks zeta_3, so only +-1
    assert [nu.label for nu in curve_automorphisms(E)] == ["id", "neg"]


def test_aut_b_zero_curve(Qi, QQ):
    E = EllCurve(-1, 0, FieldExtension(QQ, Qi))
    auts = curve_automorphisms(E)
    assert [nu.kind for nu in auts] == ["id", "neg", "i_twist", "i_twist"]
    P = E.point(Qi.element("2"), None) if False else None
    for pt in search_points(E, bound=2, limit=8):
        for nu in auts:
            assert E.contains(nu(pt))


def test_aut_a_zero_curve_with_zeta3(QQ):
    L = make_field("x^2+x+1")
    E = EllCurve(0, 1, FieldExtension(QQ, L))
    auts = curve_automorphisms(E)
    assert len(auts) == 6
    assert sum(nu.kind == "zeta3_twist" for nu in auts) == 4
    pt = E.point(2, 3)
    assert all(E.contains(nu(pt)) for nu in auts)


# -- ideals


def test_ideal_IQ_over_Q(over_Q):
    E, _, P = over_Q
    two = ell_mul(E, 2, P)
    I = ideal_IQ(E, INFINITY, two)
    assert [(q.p, v) for q, v in I.items()] == [(2, 1), (5, 1)]
    assert I.norm() == 10
    assert not ideal_IQ(E, INFINITY, P)
    assert ideal_IQ(E, INFINITY, P).norm() == 1
    with pytest.raises(EqualPoints):
        ideal_IQ(E, P, P)


def test_half_exponent_norm(Qi):
    q = split_prime(Qi, 5)[0]
    I = HalfExponentIdeal(Qi, {q: Fraction(1, 2)})
    assert I.has_half_exponent()
    assert abs(I.norm() - math.sqrt(5)) < 1e-15
    assert I.norm_squared() == 5
    assert (I * I).norm() == 5
    assert I.to_json()[0]["exp"] == "1/2"


def test_integral_model_gives_integer_exponents(over_Qi):
    # 2 ord(y) = 3 ord(x) forces even ord(x) when a, b are integral
    E, _, P, P1 = over_Qi
    for R in _pool(E, P, P1, r=2):
        if R != INFINITY:
            assert not ideal_IQ(E, INFINITY, R).has_half_exponent()


def test_ideal_ID_components(over_Qi):
    E, rel, P, P1 = over_Qi
    R = ell_mul(E, 2, P)
    D1 = DivisorSpecEll([(INFINITY, 1)])
    assert ideal_ID(E, D1, R) == ideal_IQ(E, INFINITY, R)
    D2 = DivisorSpecEll([(INFINITY, 2)])
    assert ideal_ID(E, D2, R) == ideal_IQ(E, INFINITY, R) ** 2
    D3 = DivisorSpecEll([(INFINITY, 1), (P1, 1)])
    assert ideal_ID(E, D3, R) == ideal_IQ(E, INFINITY, R) * ideal_IQ(E, P1, R)
    assert ideal_ID(E, D1 + D3, R) == ideal_ID(E, D1, R) * ideal_ID(E, D3, R)
    with pytest.raises(OnSupport):
        ideal_ID(E, D3, P1)


def test_ideal_JD_relative_degrees(over_Qi):
    E, rel, P, _ = over_Qi
    D = DivisorSpecEll([(INFINITY, 1)])
    two = ell_mul(E, 2, P)
    assert not ideal_JD(E, D, two, rel)  # 2 ramifies, 5 splits
    I3 = ideal_ID(E, D, ell_mul(E, 3, P))
    J3 = ideal_JD(E, D, ell_mul(E, 3, P), rel)
    assert sorted({q.p for q, _ in I3.items()}) == [3, 19]
    assert J3 == I3  # 3 and 19 are inert in Q(i)
    assert all(rel.rel_residue_degree(q) == 2 for q, _ in J3.items())


def test_ideal_JD_trivial_when_l_equals_k(over_Q):
    E, rel, P = over_Q
    D = DivisorSpecEll([(INFINITY, 1)])
    for n in range(1, 6):
        assert not ideal_JD(E, D, ell_mul(E, n, P), rel)


def test_relative_degree_in_a_tower():
    # k = Q(sqrt 2) inside l = Q(zeta_8), sqrt 2 = z + z^7 = z - z^3
    k = make_field("x^2-2")
    l = make_field("x^4+1", automorphisms=["-t^3", "t^3", "-t"])
    rel = FieldExtension(k, l, l.element("t - t^3"))
    assert [s.label for s in rel.sigmas] == ["sigma1"]
    expect = {3: 1, 5: 1, 7: 2, 17: 1, 23: 2}
    for p, f in expect.items():
        assert {rel.rel_residue_degree(w) for w in split_prime(l, p)} == {f}, p
    with pytest.raises(ValueError):
        FieldExtension(k, l, l.element("t"))


# -- heights


def test_height_report_finite_part(over_Qi):
    E, rel, P, _ = over_Qi
    D = DivisorSpecEll([(INFINITY, 1)])
    rep = ell_height_report(E, D, rel, ell_mul(E, 2, P))
    finite = mpmath.fsum(lh.value for lh in rep.local_heights if not isinstance(lh.place, ArchPlace))
    # absolute normalization: log N_l(I) / [l:Q] = log 100 / 2
    assert abs(finite - math.log(10)) < 1e-15
    assert rep.norm_I == 100 and rep.norm_J == 1
    assert rep.partition_residual() == 0
    assert rep.h_deg_gt1 == 0 and rep.ratio == 0


def test_height_report_integral_point(over_Qi):
    E, rel, P, _ = over_Qi
    rep = ell_height_report(E, DivisorSpecEll([(INFINITY, 1)]), rel, P)
    assert all(isinstance(lh.place, ArchPlace) for lh in rep.local_heights)
    assert abs(rep.h_D - 0.5 * math.log(3)) < 1e-15


@pytest.mark.parametrize("n", range(1, 8))
def test_nonarchimedean_bookkeeping_exact(over_Qi, n):
    E, rel, P, P1 = over_Qi
    D = DivisorSpecEll([(INFINITY, 1), (P1, 2)])
    R = ell_mul(E, n, P)
    rep = ell_height_report(E, D, rel, R)
    I = ideal_ID(E, D, R)
    assert rep.finite_log_coefficients == I.log_coefficients()
    assert rep.partition_residual() == 0
    J = ideal_JD(E, D, R, rel)
    gt1 = mpmath.fsum(lh.value for lh in rep.local_heights if lh.f_v > 1)
    assert abs(gt1 - J.log_norm() / 2) < 1e-12


def test_naive_height_growth(over_Qi):
    E, rel, P, _ = over_Qi
    ratios = [abs_height(E.ext_field, ell_mul(E, n, P).x) / n ** 2 for n in (2, 4, 6, 8)]
    for a, b in zip(ratios, ratios[1:]):
        assert abs(b / a - 1) < 0.25


# -- exceptional sets


def test_exceptional_rational_point(over_Qi):
    E, rel, P, _ = over_Qi
    w = is_exceptional_ell(E, rel, None, P)
    assert (w.exceptional, w.m, w.nu, w.sigma) == (True, 1, "id", "conj")


def test_exceptional_anti_invariant_point(over_Qi):
    E, rel, _, P1 = over_Qi
    sigma = rel.sigmas[0]
    assert apply_sigma(sigma, P1) == ell_neg(E, P1)
    w = is_exceptional_ell(E, rel, sigma, P1)
    assert (w.exceptional, w.m, w.nu) == (True, 1, "neg")


def test_non_exceptional_sum(over_Qi):
    # sigma(m(P + P1)) = mP - mP1, which equals +-m(P + P1) only if 2mP1 or 2mP is 0
    E, rel, P, P1 = over_Qi
    Q = ell_add(E, P, P1)
    assert not is_exceptional_ell(E, rel, None, Q, m_max=8).exceptional


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exceptional_invariant_under_fixed_translation(over_Qi, k):
    E, rel, P, P1 = over_Qi
    # R = kP1 satisfies neg(sigma(R)) = R; R = kP is fixed by id o sigma
    w1 = is_exceptional_ell(E, rel, None, P1)
    w2 = is_exceptional_ell(E, rel, None, ell_add(E, P1, ell_mul(E, k, P1)))
    assert (w1.exceptional, w1.nu) == (w2.exceptional, w2.nu)
    v1 = is_exceptional_ell(E, rel, None, P)
    v2 = is_exceptional_ell(E, rel, None, ell_add(E, P, ell_mul(E, k, P)))
    assert (v1.exceptional, v1.nu) == (v2.exceptional, v2.nu)


def test_exceptional_needs_nontrivial_sigma(over_Qi, Qi):
    E, rel, P, _ = over_Qi
    from degone.qfield import Automorphism
    with pytest.raises(ValueError):
        is_exceptional_ell(E, rel, Automorphism(Qi.gen(), 1, "id"), P)


# -- families


def test_family_scan_rational_point(over_Qi):
    E, rel, P, _ = over_Qi
    D = DivisorSpecEll([(INFINITY, 1)])
    rows = run_ell_family(E, D, rel, P, range(1, 11), 0.1)
    assert [r.n for r in rows] == list(range(1, 11))
    assert all(r.exceptional and r.m_witness == 1 and r.nu_witness == "id" for r in rows)
    assert all(r.skip == "" for r in rows)
    for r in rows:
        assert r.report.partition_residual() == 0
        assert (r.norm_I / r.norm_J).denominator == 1


def test_family_scan_torsion(QQ, Qi):
    E = EllCurve(0, 1, FieldExtension(QQ, Qi))
    with pytest.raises(TorsionPoint):
        run_ell_family(E, DivisorSpecEll([(INFINITY, 1)]), E.rel, E.point(2, 3), range(1, 4), 0.1)


def test_family_budget(over_Qi):
    E, rel, P, _ = over_Qi
    D = DivisorSpecEll([(INFINITY, 1)])
    rows = run_ell_family(E, D, rel, P, range(1, 10), 0.1, height_budget=30)
    assert rows[-1].skip == "budget" and rows[-1].n == 5 and len(rows) == 5
    rows = run_ell_family(E, D, rel, P, range(1, 7), 0.1, height_budget=30, on_budget="continue")
    assert [r.skip for r in rows] == ["", "", "", "", "budget", "budget"]
    with pytest.raises(BudgetExceeded):
        run_ell_family(E, D, rel, P, range(1, 10), 0.1, height_budget=30, on_budget="raise")


def test_family_on_support(over_Qi):
    E, rel, P, _ = over_Qi
    D = DivisorSpecEll([(ell_mul(E, 2, P), 1)])
    rows = run_ell_family(E, D, rel, P, range(1, 4), 0.1)
    assert [r.skip for r in rows] == ["", "on_support", ""]


# -- search, S and stability


def test_point_search(over_Qi, Qi):
    E, rel, _, P1 = over_Qi
    found = search_points(E, bound=2)
    assert P1 in found and ell_neg(E, P1) in found
    assert all(E.contains(pt) for pt in found)
    irrational = [pt for pt in found if not pt.x.is_rational()]
    assert irrational
    for pt in irrational:
        assert is_torsion(E, pt) is None


def test_ramified_place_set(over_Qi):
    rel = over_Qi[1]
    S = ell_place_set(rel)
    assert [q.p for q in S.finite_places] == [2]


def test_sigma_stability(over_Qi):
    E, rel, P, P1 = over_Qi
    D = DivisorSpecEll([(INFINITY, 1)])
    sigma = rel.sigmas[0]
    assert ideal_sigma_stable(ideal_ID(E, D, ell_mul(E, 4, P)), sigma)
    # a point whose denominator sits on one split prime above 5 only
    I = HalfExponentIdeal(rel.l, {split_prime(rel.l, 5)[0]: 1})
    assert not ideal_sigma_stable(I, sigma)
    assert ideal_sigma_stable(I, sigma, S=set(split_prime(rel.l, 5)))
