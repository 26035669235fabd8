import random

import numpy as np
import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from cmjets.jets import (JetMap, check_first_order, check_flat2_conditions, check_lemma_2flat,
                         check_second_order, classify_contact, construct_2flat_germ, construct_first_order_germ,
                         expand_basic, parabolic_automorphism, siegel_automorphism, diagonal_quadratic_form)
from cmjets.normalform import HypersurfaceModel, cm_normalize
from cmjets.scalars import I, GaussQ
from cmjets.selftest import (NECESSITY_KINDS, cayley_unitary, necessity_violation, random_a,
                             random_admissible_differential, random_block_change, random_normal_pair,
                             random_strict_second_order)
from cmjets.verdict import PreconditionError, Status
from cmjets.wpoly import HoloPoly, WPoly, restrict_diagonal

from conftest import holo_to_sympy, seeds, symbols, to_sympy_scalar


def quadric(n, K=6):
    return HypersurfaceModel.quadric(n, K)


def jet(n, K, extra_z=None, extra_w=None):
    fz = [HoloPoly.z(n, j) + (extra_z[j] if extra_z else HoloPoly.zero(n)) for j in range(n)]
    fw = HoloPoly.w(n) + (extra_w if extra_w is not None else HoloPoly.zero(n))
    return JetMap(n, K, fz, fw)


# --- automorphisms ---------------------------------------------------------------

@pytest.mark.parametrize("a", [GaussQ(1), GaussQ(mpq(1, 2), mpq(-1, 3)), GaussQ(0, mpq(3, 4))])
def test_siegel_expansion_matches_sympy_series(a):
    K = 6
    (z,), _, _, w = symbols(1)
    eps = sp.Symbol("eps")
    A = to_sympy_scalar(a)
    den = 1 - 2 * sp.I * z * sp.conjugate(A) - sp.I * A * sp.conjugate(A) * w
    scaled = {z: eps * z, w: eps ** 2 * w}
    F = siegel_automorphism([a], K)
    for got, expr in ((F.fz[0], (z + A * w) / den), (F.fw, w / den)):
        ser = sp.series(expr.subs(scaled, simultaneous=True), eps, 0, K + 1).removeO().subs(eps, 1)
        assert sp.expand(holo_to_sympy(got) - sp.expand(ser)) == 0


def test_siegel_a1_second_order_coefficient():
    F = siegel_automorphism([GaussQ(1)], 4)
    assert F.Fz(1, 1)[0] == (HoloPoly.z(1, 0) * HoloPoly.w(1)).scale(GaussQ(0, 3))


@settings(max_examples=10)
@given(seeds, st.integers(1, 3))
def test_quadric_automorphisms_are_flat(seed, n):
    a = random_a(random.Random(seed), n)
    rep = expand_basic(quadric(n, 6), quadric(n, 6), siegel_automorphism(a, 6), 6)
    assert rep.tangency_order == 6


@settings(max_examples=10)
@given(seeds, st.integers(1, 2))
def test_compositions_of_automorphisms_are_flat(seed, n):
    rng = random.Random(seed)
    K = 6
    F = siegel_automorphism(random_a(rng, n), K).compose(parabolic_automorphism(n, mpq(rng.randint(-3, 3), 2), K), K)
    G = siegel_automorphism(random_a(rng, n), K).compose(F, K)
    assert expand_basic(quadric(n, K), quadric(n, K), G, K).tangency_order == K


@settings(max_examples=10)
@given(seeds)
def test_compose_is_associative(seed):
    rng = random.Random(seed)
    K = 5
    maps = [siegel_automorphism(random_a(rng, 2), K) for _ in range(3)]
    f, g, h = maps
    assert f.compose(g, K).compose(h, K) == f.compose(g.compose(h, K), K)


# --- basic expression -----------------------------------------------------------

def test_identity_is_flat():
    rep = expand_basic(quadric(2), quadric(2), JetMap.identity(2, 6), 6)
    order, sign = classify_contact(rep)
    assert order == 6 and sign.is_holds


def test_iw2_contact():
    n = 1
    w = HoloPoly.w(n)
    F = jet(n, 4, extra_w=(w * w).scale(I))
    rep = expand_basic(quadric(n), quadric(n), F, 4)
    r = WPoly.norm2(n)
    assert rep.component(4) == WPoly.u(n) * WPoly.u(n) - r * r
    order, sign = classify_contact(rep)
    assert order == 3 and sign.status is Status.VIOLATED
    assert rep.component(4).evaluate(sign.witness["z"], sign.witness["u"]).re < 0


def test_positive_weight4_component():
    n = 2
    w = HoloPoly.w(n)
    F = jet(n, 4, extra_z=[(HoloPoly.z(n, j) * w).scale(GaussQ(0, 2)) for j in range(n)],
            extra_w=(w * w).scale(I))
    order, sign = classify_contact(expand_basic(quadric(n), quadric(n), F, 4))
    assert order == 3 and sign.is_holds


@pytest.mark.parametrize("kind", NECESSITY_KINDS)
def test_necessity_detected(kind):
    F, weight = necessity_violation(random.Random(5), 2, kind)
    rep = expand_basic(quadric(2, 4), quadric(2, 4), F, 4, samples=2000)
    order, sign = classify_contact(rep)
    assert order + 1 == weight
    assert sign.is_violated
    e = rep.component(weight)
    assert e.evaluate(sign.witness["z"], sign.witness["u"]).re < 0


def test_expand_basic_dimension_mismatch():
    with pytest.raises(ValueError):
        expand_basic(quadric(1), quadric(2), JetMap.identity(2, 4), 4)


# --- first order -------------------------------------------------------------------

def test_first_order_examples():
    v, d = check_first_order([[1, 0], [0, 1]])
    assert v.is_holds and [float(a) for a in d.alpha] == [1.0]
    v, _ = check_first_order([[2, 0], [0, 1]])
    assert v.is_violated
    v, d = check_first_order([[1, 3], [0, 4]])
    assert v.is_holds and d.charpoly == [1, mpq(-1, 4)]
    v, _ = check_first_order([[1, 0], [1, 1]])
    assert v.is_violated


@given(seeds, st.integers(1, 3))
def test_first_order_matches_svd(seed, n):
    rng = random.Random(seed)
    C = [[GaussQ(mpq(rng.randint(-3, 3), 4), mpq(rng.randint(-3, 3), 4)) for _ in range(n)] for _ in range(n)]
    lam = mpq(rng.randint(1, 6), 2)
    L = [row + [GaussQ(rng.randint(-2, 2))] for row in C] + [[GaussQ(0)] * n + [GaussQ(lam)]]
    v, d = check_first_order(L)
    sv = np.linalg.svd(np.array([[complex(x) for x in row] for row in C]), compute_uv=False)
    smax2 = float(sv.max() ** 2)
    if abs(smax2 - float(lam)) > 1e-9:
        assert v.is_holds == (smax2 < float(lam))
    if v.is_holds:
        assert np.allclose(sorted(np.array(d.alpha, dtype=float)), sorted(sv / np.sqrt(float(lam))), atol=1e-12)


@settings(max_examples=20)
@given(seeds, st.integers(1, 3))
def test_alpha_invariant_under_block_changes(seed, n):
    rng = random.Random(seed)
    L = random_admissible_differential(rng, n)
    v, d = check_first_order(L)
    v2, d2 = check_first_order(random_block_change(rng, L))
    assert v.is_holds and v2.is_holds
    assert d.charpoly == d2.charpoly
    assert np.allclose(sorted(np.array(d.alpha, float)), sorted(np.array(d2.alpha, float)), atol=1e-12)


def test_cayley_transform_is_unitary():
    U = cayley_unitary(random.Random(2), 3)
    for i in range(3):
        for j in range(3):
            dot = sum((U[k][i].conjugate() * U[k][j] for k in range(3)), GaussQ(0))
            assert dot == GaussQ(int(i == j))


# --- second order -------------------------------------------------------------------

def test_second_order_examples():
    n = 1
    z, w = HoloPoly.z(n, 0), HoloPoly.w(n)
    assert check_second_order(JetMap.identity(n, 4)).is_holds
    assert not check_second_order(JetMap.identity(n, 4)).strict
    v = check_second_order(jet(n, 4, extra_z=[(z * w).scale(I)], extra_w=(w * w).scale(I)))
    assert v.is_holds and v.strict
    v = check_second_order(jet(n, 4, extra_w=(w * w).scale(I)))
    assert v.is_violated
    # izw alone: both inequalities hold with equality in the discriminant
    v = check_second_order(jet(n, 4, extra_z=[(z * w).scale(I)]))
    assert v.is_holds and not v.strict
    with pytest.raises(PreconditionError):
        check_second_order(JetMap(1, 4, [z.scale(GaussQ(2))], w))


@settings(max_examples=10)
@given(seeds, st.integers(1, 2))
def test_diagonal_quadratic_is_the_diagonal_restriction_of_e4(seed, n):
    rng = random.Random(seed)
    H, Hp = random_normal_pair(rng, n, quadric=False)
    F = random_strict_second_order(rng, n, H.get(4), Hp.get(4))
    e4 = expand_basic(H, Hp, F, 4).component(4)
    q = diagonal_quadratic_form(F, H.get(4), Hp.get(4))
    diag = restrict_diagonal(e4)
    for l in (0, 1, 2):
        assert diag.get(l, WPoly.zero(n)).bidegree_part(2, 2, 0) == q[l]


@settings(max_examples=10)
@given(seeds, st.integers(1, 2))
def test_strict_second_order_jets_hold_strictly(seed, n):
    rng = random.Random(seed)
    H, Hp = random_normal_pair(rng, n, quadric=rng.random() < 0.5)
    F = random_strict_second_order(rng, n, H.get(4), Hp.get(4))
    v = check_second_order(F, H.get(4), Hp.get(4), samples=2000)
    assert v.is_holds and v.strict
    order, sign = classify_contact(expand_basic(H, Hp, F, 4, samples=2000))
    assert order == 3 and not sign.is_violated


# --- 2-flat germs ----------------------------------------------------------------

def test_flat2_examples():
    n = 1
    z, w = HoloPoly.z(n, 0), HoloPoly.w(n)
    Q = quadric(n)
    rep = check_flat2_conditions(jet(n, 4, extra_z=[(z * w).scale(I)]), Q, Q)
    assert rep.as_tuple() == (False, False, False)
    rep = check_flat2_conditions(jet(n, 4, extra_z=[(z * w).scale(GaussQ(3))], extra_w=(w * w).scale(GaussQ(3))), Q, Q)
    assert rep.as_tuple() == (True, True, True)
    with pytest.raises(PreconditionError):
        check_flat2_conditions(jet(n, 4, extra_w=z * z), Q, Q)


def test_quadric_2flat_germ():
    n = 1
    Q = quadric(n)
    F = construct_2flat_germ(Q, Q)
    z, w = HoloPoly.z(n, 0), HoloPoly.w(n)
    assert F.fz[0] == z + z * w * w
    assert F.fw == w + w * w * w + (w * w * w * w).scale(I)
    assert check_lemma_2flat(F, Q, Q).is_holds
    assert check_flat2_conditions(F, Q, Q).as_tuple() == (True, True, True)


@settings(max_examples=5)
@given(seeds, st.integers(1, 2))
def test_constructed_2flat_germs(seed, n):
    rng = random.Random(seed)
    H, Hp = random_normal_pair(rng, n)
    F = construct_2flat_germ(H, Hp, samples=2000)
    assert F.has_identity_linear_part()
    assert check_lemma_2flat(F, H, Hp, samples=2000).is_holds
    rep = check_flat2_conditions(F, H, Hp)
    assert rep.agree and rep.flat2
    assert expand_basic(H, Hp, F, 8, allow_truncated_models=True).tangency_order >= 5


def test_2flat_requires_weighted_equivalence():
    z1, z2 = WPoly.z(2, 0), WPoly.z(2, 1)
    mixed = z1 * z1 * z2.conjugate() * z2.conjugate()
    H = HypersurfaceModel(2, 6, {4: mixed + mixed.conjugate()})
    with pytest.raises(PreconditionError, match="weight"):
        construct_2flat_germ(H, quadric(2))


def test_one_dimensional_pairs_always_admit_2flat_germs():
    rng = random.Random(11)
    from cmjets.selftest import random_model
    H, Hp = random_model(rng, 1), random_model(rng, 1)
    F = construct_2flat_germ(H, Hp, samples=2000)
    N, _ = cm_normalize(H)
    Np, _ = cm_normalize(Hp)
    assert check_lemma_2flat(F, N, Np, samples=2000).is_holds


# --- first-order germs ------------------------------------------------------------

@pytest.mark.parametrize("alpha", [["1/2"], ["1/2", "1/3"], ["1", "1/2"], ["1", "0"], ["1", "1"]])
def test_first_order_germs(alpha):
    al = [GaussQ(mpq(a)) for a in alpha]
    n = len(al)
    F = construct_first_order_germ(al, quadric(n), quadric(n), samples=2000)
    v, d = check_first_order(F.to_differential())
    assert v.is_holds
    assert sorted(float(a) for a in d.alpha) == sorted(float(a.re) for a in al)


def test_first_order_germ_has_requested_linear_part():
    F = construct_first_order_germ([GaussQ(mpq(1, 2))], quadric(1), quadric(1))
    assert F.fz[0].degree_part(1) == HoloPoly.z(1, 0).scale(GaussQ(mpq(1, 2)))
    assert F.fw.degree_part(1) == HoloPoly.w(1)


def test_first_order_germ_rejects_bad_alpha():
    with pytest.raises(ValueError):
        construct_first_order_germ([GaussQ(2)], quadric(1), quadric(1))
    with pytest.raises(ValueError):
        construct_first_order_germ([GaussQ(mpq(1, 3)), GaussQ(mpq(1, 2))], quadric(2), quadric(2))
