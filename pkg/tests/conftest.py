import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cmjets.scalars import GaussQ
from cmjets.wpoly import HoloPoly, WPoly

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-5, hi=5, max_den=6):
    return st.builds(lambda p, q: mpq(p, q), st.integers(lo, hi), st.integers(1, max_den))


def gaussq(lo=-5, hi=5, max_den=6):
    return st.builds(GaussQ, rationals(lo, hi, max_den), rationals(lo, hi, max_den))


def wpolys(n=2, max_deg=3, max_u=1, max_terms=5):
    mono = st.tuples(st.lists(st.integers(0, max_deg), min_size=n, max_size=n),
                     st.lists(st.integers(0, max_deg), min_size=n, max_size=n),
                     st.integers(0, max_u))
    terms = st.lists(st.tuples(mono, gaussq()), max_size=max_terms)
    return terms.map(lambda ts: sum((WPoly(n, {(tuple(a), tuple(b), c): g}) for (a, b, c), g in ts),
                                    WPoly.zero(n)))


def holopolys(n=2, max_deg=2, max_w=2, max_terms=4):
    mono = st.tuples(st.lists(st.integers(0, max_deg), min_size=n, max_size=n), st.integers(0, max_w))
    terms = st.lists(st.tuples(mono, gaussq()), max_size=max_terms)
    return terms.map(lambda ts: sum((HoloPoly(n, {(tuple(a), k): g}) for (a, k), g in ts),
                                    HoloPoly.zero(n)))


seeds = st.integers(0, 2**31 - 1)


def to_sympy_scalar(c):
    c = GaussQ.coerce(c)
    return sp.Rational(int(c.re.numerator), int(c.re.denominator)) + \
        sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator))


def symbols(n):
    z = sp.symbols(f"z1:{n + 1}")
    zb = sp.symbols(f"zb1:{n + 1}")
    return z, zb, sp.Symbol("u"), sp.Symbol("w")


def wpoly_to_sympy(p: WPoly):
    z, zb, u, _ = symbols(p.n)
    expr = sp.Integer(0)
    for m, c in p.items():
        t = to_sympy_scalar(c) * u ** m.ku
        for j in range(p.n):
            t *= z[j] ** m.kz[j] * zb[j] ** m.kzb[j]
        expr += t
    return sp.expand(expr)


def holo_to_sympy(p: HoloPoly):
    z, _, _, w = symbols(p.n)
    expr = sp.Integer(0)
    for m, c in p.items():
        t = to_sympy_scalar(c) * w ** m.kw
        for j in range(p.n):
            t *= z[j] ** m.kz[j]
        expr += t
    return sp.expand(expr)


def sympy_weight_truncate(expr, gens, weights, K):
    """Keep monomials of weighted degree <= K."""
    poly = sp.Poly(sp.expand(expr), *gens)
    out = sp.Integer(0)
    for mon, c in poly.terms():
        if sum(e * wt for e, wt in zip(mon, weights)) <= K:
            out += c * sp.prod([g ** e for g, e in zip(gens, mon)])
    return sp.expand(out)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
