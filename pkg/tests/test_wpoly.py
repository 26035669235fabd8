import numpy as np
import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from cmjets.scalars import I, GaussQ, format_rational, parse_scalar
from cmjets.wpoly import (HoloPoly, Monomial, WPoly, compose_holo, hermitian_pair, monomials_of_weight,
                          restrict_diagonal, substitute)

from conftest import (gaussq, holo_to_sympy, holopolys, symbols, sympy_weight_truncate, to_sympy_scalar,
                      wpoly_to_sympy, wpolys)


# --- scalars ----------------------------------------------------------------

@given(gaussq(), gaussq(), gaussq())
def test_gaussq_field_ops_match_sympy(a, b, c):
    A, B, C = map(to_sympy_scalar, (a, b, c))
    assert to_sympy_scalar(a * b + c) == sp.expand(A * B + C)
    assert to_sympy_scalar(a - b * c) == sp.expand(A - B * C)
    if b:
        assert sp.simplify(to_sympy_scalar(a / b) - A / B) == 0


@given(gaussq(), gaussq())
def test_conjugate_is_multiplicative(a, b):
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert a * a.conjugate() == GaussQ(a.abs2())


@pytest.mark.parametrize("text,re,im", [
    ("1/2", mpq(1, 2), 0), ("3i", 0, 3), ("1/2+3i", mpq(1, 2), 3), ("-2-i", -2, -1), ("i", 0, 1),
    ("-3/4i", 0, mpq(-3, 4)),
])
def test_parse_scalar(text, re, im):
    assert parse_scalar(text) == GaussQ(re, im)


def test_format_rational():
    assert format_rational(mpq(-6, 4)) == "-3/2"
    assert format_rational(mpq(4)) == "4"


def test_mixed_backend_promotes_to_float():
    p = WPoly.z(1, 0) + WPoly.u(1)
    q = p.to_float()
    r = p * q
    assert r.backend == "float"
    assert (r - (p * p).to_float()).max_abs() == 0


# --- WPoly ------------------------------------------------------------------

@given(wpolys(), wpolys())
def test_product_matches_sympy(p, q):
    assert wpoly_to_sympy(p * q) == sp.expand(wpoly_to_sympy(p) * wpoly_to_sympy(q))
    assert wpoly_to_sympy(p + q) == sp.expand(wpoly_to_sympy(p) + wpoly_to_sympy(q))


@given(wpolys(), wpolys(), wpolys())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == WPoly.zero(2)


@given(wpolys())
def test_conjugate_involution_and_real_part(p):
    assert p.conjugate().conjugate() == p
    assert (p + p.conjugate()).is_real()
    assert p.real_part() + p.imag_part().scale(I) == p


@given(wpolys())
def test_weight_decompose_sums_back(p):
    total = WPoly.zero(2)
    for mu, part in p.weight_decompose():
        assert part.is_homogeneous(mu)
        total = total + part
    assert total == p


@given(wpolys(), st.integers(0, 6))
def test_truncate_keeps_low_weights(p, K):
    t = p.truncate(K)
    assert all(m.weight <= K for m, _ in t.items())
    assert all(m.weight > K for m, _ in (p - t).items())


@given(wpolys(max_terms=4))
def test_numeric_matches_exact_evaluation(p):
    z = [GaussQ(mpq(1, 2), mpq(-1, 3)), GaussQ(mpq(2, 3), mpq(1, 5))]
    u = GaussQ(mpq(-3, 7))
    exact = complex(p.evaluate(z, u))
    num = p.to_float().numeric()(np.array([[complex(x) for x in z]]), np.array([float(complex(u).real)]))[0]
    assert abs(exact - num) <= 1e-12 * max(1.0, abs(exact))


def test_monomial_weights():
    m = Monomial((1, 0), (0, 2), 1)
    assert m.weight == 5
    assert m.bidegree == (1, 2, 1)
    assert m.conjugate() == Monomial((0, 2), (1, 0), 1)
    assert all(m.weight == 4 for m in monomials_of_weight(2, 4))


def test_norm2_and_hermitian_pair():
    z = [WPoly.z(2, 0), WPoly.z(2, 1)]
    assert hermitian_pair(z, z) == WPoly.norm2(2)


@given(wpolys(max_u=2))
def test_restrict_diagonal_is_substitution(p):
    z, zb, u, _ = symbols(2)
    t = sp.Symbol("t")
    r = z[0] * zb[0] + z[1] * zb[1]
    expected = sp.expand(wpoly_to_sympy(p).subs(u, t * r))
    got = sum((sp.expand(wpoly_to_sympy(q) * t ** l) for l, q in restrict_diagonal(p).items()), sp.Integer(0))
    assert sp.expand(got - expected) == 0


# --- HoloPoly and composition ------------------------------------------------

@given(holopolys(), holopolys())
def test_holo_product_matches_sympy(p, q):
    assert holo_to_sympy(p * q) == sp.expand(holo_to_sympy(p) * holo_to_sympy(q))


def test_holo_components():
    z = HoloPoly.z(2, 0)
    w = HoloPoly.w(2)
    p = z * w + w * w + z * z * z
    assert p.component(1, 1) == z * w
    assert p.component(0, 2) == w * w
    assert p.component(3, 0) == z * z * z
    assert p.at_w(1) == z + HoloPoly.constant(2, 1) + z * z * z


@given(holopolys(n=1, max_deg=2, max_w=3), st.integers(2, 6))
def test_compose_holo_matches_sympy_series(h, K):
    z, zb, u, w = symbols(1)
    W = WPoly.u(1) + WPoly.norm2(1).scale(I)
    got = compose_holo(h, W, K)
    expr = holo_to_sympy(h).subs(w, u + sp.I * z[0] * zb[0])
    expected = sympy_weight_truncate(expr, [z[0], zb[0], u], [1, 1, 2], K)
    assert sp.expand(wpoly_to_sympy(got) - expected) == 0


@given(wpolys(n=1, max_deg=2, max_u=1, max_terms=3), holopolys(n=1, max_deg=2, max_w=1, max_terms=2))
def test_substitute_matches_sympy(target, g):
    z, zb, u, w = symbols(1)
    K = 6
    W = WPoly.u(1) + WPoly.norm2(1).scale(I)
    fz = compose_holo(HoloPoly.z(1, 0) + g, W, K)
    fu = WPoly.u(1)
    got = substitute(target, [fz], fu, K)
    fz_s = wpoly_to_sympy(fz)
    # conj(f)(z, zb, u) = conjugated coefficients with z and zb swapped
    fzb_s = sp.expand(sp.conjugate(fz_s)).subs({sp.conjugate(z[0]): zb[0], sp.conjugate(zb[0]): z[0],
                                                sp.conjugate(u): u}, simultaneous=True)
    A, B = sp.symbols("A B")
    expr = wpoly_to_sympy(target).subs({z[0]: A, zb[0]: B}, simultaneous=True)
    expr = expr.subs({A: fz_s, B: fzb_s}, simultaneous=True)
    expected = sympy_weight_truncate(expr, [z[0], zb[0], u], [1, 1, 2], K)
    assert sp.expand(wpoly_to_sympy(got) - expected) == 0
