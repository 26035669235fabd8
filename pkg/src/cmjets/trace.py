"""Trace operator on bihomogeneous forms and the normal-space predicates.

A form of bidegree (j, k) is stored as its symmetric coefficient tensor,
indexed by sorted multi-indices (alpha, beta).  The trace contracts the last
holomorphic index against the last antiholomorphic one with a plain sum.
On polynomials this equals Delta/(j*k) with Delta = sum_c d/dz_c d/dzbar_c.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Mapping

from gmpy2 import mpq

from .scalars import GaussQ, FLOAT
from .verdict import Verdict, PreconditionError
from .wpoly import WPoly, Monomial


def _multinomial(exps) -> int:
    out = factorial(sum(exps))
    for e in exps:
        out //= factorial(e)
    return out


def _exps_to_index(exps) -> tuple:
    idx = []
    for c, e in enumerate(exps):
        idx.extend([c] * e)
    return tuple(idx)


def _index_to_exps(idx, n) -> tuple:
    e = [0] * n
    for c in idx:
        e[c] += 1
    return tuple(e)


def _div(c, m: int):
    if isinstance(c, complex):
        return c / m
    return c * GaussQ(mpq(1, m))


@dataclass(frozen=True)
class BihomForm:
    """Symmetric tensor a[alpha][beta] of a form of bidegree (j, k) in (z, zbar)."""

    n: int
    j: int
    k: int
    tensor: Mapping

    @classmethod
    def from_wpoly(cls, p: WPoly, j: int = None, k: int = None) -> "BihomForm":
        """Read off the (j, k, 0) part of ``p``; bidegree inferred if omitted."""
        if j is None or k is None:
            degs = {m.bidegree for m in p.keys()}
            if len(degs) > 1:
                raise ValueError(f"polynomial is not bihomogeneous: bidegrees {sorted(degs)}")
            if not degs:
                j = j or 0
                k = k or 0
            else:
                jj, kk, l = degs.pop()
                if l:
                    raise ValueError("polynomial depends on u")
                j, k = jj, kk
        t = {}
        for m, c in p.items():
            if m.bidegree != (j, k, 0):
                continue
            mult = _multinomial(m.kz) * _multinomial(m.kzb)
            t[(_exps_to_index(m.kz), _exps_to_index(m.kzb))] = _div(c, mult)
        return cls(p.n, j, k, t)

    def to_wpoly(self) -> WPoly:
        terms = {}
        for (al, be), a in self.tensor.items():
            kz = _index_to_exps(al, self.n)
            kzb = _index_to_exps(be, self.n)
            terms[(kz, kzb, 0)] = a * (_multinomial(kz) * _multinomial(kzb))
        return WPoly(self.n, terms)

    @classmethod
    def zero(cls, n: int, j: int, k: int) -> "BihomForm":
        return cls(n, j, k, {})

    def entry(self, alpha, beta):
        """Coefficient for arbitrary (unsorted) index tuples."""
        return self.tensor.get((tuple(sorted(alpha)), tuple(sorted(beta))), 0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.tensor.values())

    def __add__(self, other: "BihomForm") -> "BihomForm":
        if (self.n, self.j, self.k) != (other.n, other.j, other.k):
            raise ValueError("bidegree mismatch")
        t = dict(self.tensor)
        for key, c in other.tensor.items():
            t[key] = t.get(key, 0) + c
        return BihomForm(self.n, self.j, self.k, {kk: c for kk, c in t.items() if c != 0})

    def scale(self, s) -> "BihomForm":
        return BihomForm(self.n, self.j, self.k, {kk: c * s for kk, c in self.tensor.items() if c * s != 0})

    def __eq__(self, other):
        if not isinstance(other, BihomForm):
            return NotImplemented
        return (self.n, self.j, self.k) == (other.n, other.j, other.k) and \
            {k: c for k, c in self.tensor.items() if c != 0} == {k: c for k, c in other.tensor.items() if c != 0}

    def __hash__(self):
        return hash((self.n, self.j, self.k))


@dataclass(frozen=True)
class TraceDecomposition:
    """Q = sum_i ||z||^(2i) N_i with every N_i traceless."""

    parts: tuple

    def reconstruct(self) -> WPoly:
        if not self.parts:
            raise ValueError("empty decomposition")
        n = self.parts[0].n
        r = WPoly.norm2(n)
        total = WPoly.zero(n)
        rp = WPoly.constant(n, 1)
        for part in self.parts:
            total = total + rp * part.to_wpoly()
            rp = rp * r
        return total


def trace(Q: BihomForm) -> BihomForm:
    if Q.j < 1 or Q.k < 1:
        raise ValueError(f"trace needs bidegree at least (1,1), got ({Q.j},{Q.k})")
    out: dict = {}
    # output keys are obtained by dropping one shared index value
    keys = {}
    for (al, be) in Q.tensor:
        for c in set(al) & set(be):
            a2 = list(al)
            a2.remove(c)
            b2 = list(be)
            b2.remove(c)
            keys[(tuple(a2), tuple(b2))] = None
    for (a2, b2) in keys:
        s = 0
        for c in range(Q.n):
            v = Q.entry(a2 + (c,), b2 + (c,))
            if v != 0:
                s = s + v
        if s != 0:
            out[(a2, b2)] = s
    return BihomForm(Q.n, Q.j - 1, Q.k - 1, out)


def trace_power(Q: BihomForm, m: int) -> BihomForm:
    if m < 1:
        raise ValueError("trace power must be positive")
    if Q.j < m or Q.k < m:
        raise ValueError(f"bidegree ({Q.j},{Q.k}) too low for tr^{m}")
    for _ in range(m):
        Q = trace(Q)
    return Q


def laplacian(p: WPoly) -> WPoly:
    """Delta p = sum_c d^2 p / dz_c dzbar_c (u is untouched)."""
    n = p.n
    terms: dict = {}
    for m, c in p.items():
        for j in range(n):
            a, b = m.kz[j], m.kzb[j]
            if a and b:
                kz = m.kz[:j] + (a - 1,) + m.kz[j + 1:]
                kzb = m.kzb[:j] + (b - 1,) + m.kzb[j + 1:]
                key = (kz, kzb, m.ku)
                terms[key] = terms.get(key, 0) + c * (a * b)
    return WPoly(n, terms)


def _solve_shifted(c: int, Y: WPoly, p: int, q: int) -> WPoly:
    """Solve c X + ||z||^2 Delta X = Y for X of bidegree (p, q)."""
    n = Y.n
    inv = 1.0 / c if Y.backend == FLOAT else GaussQ(mpq(1, c))
    if p == 0 or q == 0 or not Y:
        return Y.scale(inv)
    Z = _solve_shifted(c + n + p + q - 2, laplacian(Y), p - 1, q - 1)
    return (Y - WPoly.norm2(n) * Z).scale(inv)


def trace_decompose(Q: BihomForm) -> TraceDecomposition:
    """Split Q into traceless pieces N_0, N_1, ... with Q = sum ||z||^(2i) N_i."""
    n = Q.n
    parts = []
    P = Q.to_wpoly()
    j, k = Q.j, Q.k
    r = WPoly.norm2(n)
    while True:
        if j == 0 or k == 0 or not P:
            parts.append(BihomForm.from_wpoly(P, j, k))
            parts.extend(BihomForm.zero(n, j - i, k - i) for i in range(1, min(j, k) + 1))
            break
        rest = _solve_shifted(n + j + k - 2, laplacian(P), j - 1, k - 1)
        N0 = P - r * rest
        parts.append(BihomForm.from_wpoly(N0, j, k))
        P, j, k = rest, j - 1, k - 1
    return TraceDecomposition(tuple(parts))


def is_normal_term(m: Monomial) -> bool:
    return sum(m.kz) >= 2 and sum(m.kzb) >= 2


def normal_space_check(phi: Mapping, K: int, exact: bool = True, tol: float = 1e-9) -> Verdict:
    """Partial Chern-Moser normal-space membership through weight ``K``.

    Divisibility at every weight, tr(phi_4) = 0 and tr^2(phi_5) = 0.
    """
    for mu, p in sorted(phi.items()):
        if mu > K or not p:
            continue
        if not p.is_homogeneous(mu):
            raise PreconditionError(f"phi_{mu} is not weighted homogeneous of weight {mu}")
        real = p.is_real() if p.backend != FLOAT else p.is_real_approx(tol)
        if not real:
            raise PreconditionError(f"phi_{mu} is not real-valued")
    for mu, p in sorted(phi.items()):
        if mu > K:
            continue
        for m, c in p.items():
            if not exact and abs(complex(c)) <= tol:
                continue
            if not is_normal_term(m):
                return Verdict.violated(f"weight {mu} term {m} is not divisible by z z zbar zbar",
                                        witness={"weight": mu, "monomial": m})
    checks = [(4, [(2, 2)], 1), (5, [(3, 2), (2, 3)], 2)]
    for mu, degs, power in checks:
        if mu > K or mu not in phi:
            continue
        for j, k in degs:
            part = phi[mu].bidegree_part(j, k, 0)
            if not part:
                continue
            t = trace_power(BihomForm.from_wpoly(part, j, k), power).to_wpoly()
            bad = bool(t) if exact else t.max_abs() > tol
            if bad:
                return Verdict.violated(f"tr^{power} of the ({j},{k}) part of phi_{mu} is nonzero",
                                        witness={"weight": mu, "trace": str(t)})
    return Verdict.holds(f"normal through weight {K}")
