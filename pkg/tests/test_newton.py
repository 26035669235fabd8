import random
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from cmjets.newton import (ExtendedPolytope, RemainderSpec, cancel_weighted, fourier_middle, nonneg_check_bihom,
                           polytope_disjoint, reduce_1d, sample_minimum, types_lemma)
from cmjets.scalars import GaussQ
from cmjets.selftest import polytope_oracle, random_traceless_one_var, reduce_1d_oracle
from cmjets.verdict import Status
from cmjets.wpoly import HoloPoly, WPoly

from conftest import seeds


# --- one-variable reduction ---------------------------------------------------

def test_reduce_1d_examples():
    assert reduce_1d([0, 0, 3, -100]).status is Status.HOLDS
    v = reduce_1d([0, -1, 5])
    assert v.status is Status.VIOLATED
    assert -v.witness + 5 * v.witness ** 2 < 0
    assert reduce_1d([]).status is Status.HOLDS
    # terms beyond d belong to the remainder
    assert reduce_1d([0, 0, 0, -1], d=2).status is Status.HOLDS


@given(st.lists(st.integers(-4, 4), max_size=8))
def test_reduce_1d_matches_dense_evaluation(coeffs):
    v = reduce_1d(coeffs)
    oracle = reduce_1d_oracle(coeffs)
    if v.is_violated:
        assert oracle == "neg"
        x = v.witness
        assert all(sum(Fraction(a) * (x * Fraction(i, 40)) ** k for k, a in enumerate(coeffs)) < 0
                   for i in range(1, 41))
    elif v.strict:
        assert oracle == "pos"
    else:
        assert oracle == "zero"


# --- Newton polytope -------------------------------------------------------------

def test_extended_polytope_shape():
    E = ExtendedPolytope.of([(2, 2)])
    assert E.dimension == 2
    assert E.contains((1, 1), strict=True)
    assert not E.contains((2, 2), strict=True)
    assert E.contains((2, 2))
    assert not E.contains((3, 0))
    axis = ExtendedPolytope.of([(3, 0)])
    assert axis.dimension == 1
    assert axis.contains((1, 0), strict=True) and not axis.contains((3, 0), strict=True)


def test_polytope_disjoint_examples():
    assert polytope_disjoint({(2, 2): 1}, RemainderSpec(((3, 3), (4, 1))))
    assert not polytope_disjoint({(2, 2): 1}, RemainderSpec(((1, 1),)))
    # a segment crossing the interior
    assert not polytope_disjoint({(2, 2): 1}, RemainderSpec(((0, 3), (3, 0))))


points = st.tuples(st.integers(0, 4), st.integers(0, 4))


@given(st.lists(points, min_size=1, max_size=3), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)),
                                                           min_size=1, max_size=3))
def test_polytope_disjoint_matches_lp(support, rem):
    assert polytope_disjoint({s: 1 for s in support}, RemainderSpec(tuple(rem))) == polytope_oracle(support, rem)


def test_remainder_spec_validation():
    with pytest.raises(ValueError):
        RemainderSpec(((1, -1),))


# --- circle forms -----------------------------------------------------------------

def test_fourier_middle_example():
    z = WPoly.z(1, 0)
    p = (z * z.conjugate()).scale(3) + (z * z).scale(GaussQ(1, 1)) + (z * z).conjugate().scale(GaussQ(1, -1))
    assert fourier_middle(p) == 3


@given(seeds)
def test_types_lemma_finds_negative_values(seed):
    p = random_traceless_one_var(random.Random(seed))
    v = types_lemma(p)
    assert v.is_violated
    val = p.to_float().numeric()(np.array([[np.exp(1j * v.witness)]]), np.zeros(1)).real[0]
    assert val < 0


def test_types_lemma_positive_middle_not_applicable():
    z = WPoly.z(1, 0)
    assert types_lemma((z * z.conjugate()).scale(2)).status is Status.NOT_APPLICABLE
    assert types_lemma(WPoly.zero(1)).status is Status.HOLDS


# --- nonnegativity -------------------------------------------------------------------

def test_nonneg_examples():
    n = 2
    r = WPoly.norm2(n)
    u = WPoly.u(n)
    v = nonneg_check_bihom(r * r + u * u, n)
    assert v.status is Status.HOLDS and v.certificate["certificate"] == "gram"
    bad = u * u - r * r
    v = nonneg_check_bihom(bad, n)
    assert v.status is Status.VIOLATED
    w = v.witness
    assert bad.evaluate(w["z"], w["u"]).re < 0
    assert nonneg_check_bihom(WPoly.zero(n), n).is_holds


@given(seeds, st.integers(1, 2))
def test_sums_of_squares_never_violated(seed, n):
    rng = random.Random(seed)
    p = WPoly.zero(n)
    for _ in range(rng.randint(1, 3)):
        q = HoloPoly.zero(n)
        for _ in range(2):
            kz = [0] * n
            kz[rng.randrange(n)] = rng.randint(1, 2)
            q = q + HoloPoly(n, {(tuple(kz), 0): GaussQ(mpq(rng.randint(-3, 3)), mpq(rng.randint(-3, 3)))})
        qw = q.to_wpoly()
        p = p + qw * qw.conjugate()
    assert not nonneg_check_bihom(p, n, samples=2000).is_violated
    if p:
        v = nonneg_check_bihom(-p, n, samples=2000)
        assert v.is_violated
        assert (-p).evaluate(v.witness["z"], v.witness["u"]).re < 0


def test_sample_minimum_of_definite_form():
    r = WPoly.norm2(2)
    val, z, u = sample_minimum(r * r + WPoly.u(2) * WPoly.u(2), samples=2000)
    assert val > 0


def test_cancel_weighted_takes_lowest_z_degree():
    r = WPoly.norm2(1)
    u = WPoly.u(1)
    res = cancel_weighted(u * u - r * r)
    assert res.z_degree == 0
    assert res.component == u * u
    assert res.verdict.is_holds
