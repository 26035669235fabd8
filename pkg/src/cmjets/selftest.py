"""Randomised property suites shared by the CLI self-test and the test suite.

Every suite returns a SuiteResult; all randomness is derived from the seed.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpq
from scipy.optimize import linprog

from .jets import (JetMap, check_first_order, classify_contact, construct_2flat_germ,
                   construct_first_order_germ, expand_basic, siegel_automorphism)
from .newton import RemainderSpec, fourier_middle, polytope_disjoint, reduce_1d, types_lemma
from .normalform import HypersurfaceModel, cm_normalize, transform_graph
from .scalars import GaussQ
from .trace import normal_space_check
from .wpoly import HoloPoly, WPoly, random_real_wpoly


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def record(self, ok: bool, info=None):
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 10:
            self.failures.append(info)

    def line(self) -> str:
        return f"{self.name}: {self.passed}/{self.total} ({self.seconds:.2f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rand_q(rng, lo=-4, hi=4, den=4):
    return mpq(rng.randint(lo, hi), rng.randint(1, den))


def _rand_g(rng, den=4):
    return GaussQ(_rand_q(rng, den=den), _rand_q(rng, den=den))


# ---------------------------------------------------------------------------
# generators


def random_traceless_one_var(rng) -> WPoly:
    """Nonzero real homogeneous form in one complex variable with vanishing middle coefficient."""
    while True:
        deg = rng.randint(1, 8)
        terms = {}
        for j in range(deg + 1):
            k = deg - j
            if j > k:
                continue
            if j == k:
                continue
            c = _rand_g(rng) if rng.random() < 0.7 else GaussQ(0)
            if c:
                terms[((j,), (k,), 0)] = c
                terms[((k,), (j,), 0)] = c.conjugate()
        p = WPoly(1, terms)
        if p:
            return p


def random_model(rng, n: int, K: int = 6, nterms: int = 3, den: int = 3) -> HypersurfaceModel:
    return HypersurfaceModel(n, K, {mu: random_real_wpoly(rng, n, mu, nterms=nterms, den=den)
                                    for mu in range(3, K + 1)})


def random_normal_pair(rng, n: int, quadric: bool = False):
    """Two normalized models through weight 6 whose normal forms agree through weight 5."""
    if quadric:
        N = HypersurfaceModel.quadric(n, 6)
    else:
        N, _ = cm_normalize(random_model(rng, n))
    extra = random_real_wpoly(rng, n, 6, nterms=2, den=3, normal_only=True)
    Np = HypersurfaceModel(n, 6, {**N.phi, 6: N.get(6) + extra})
    return N, Np


def random_strict_second_order(rng, n: int, phi4=None, phi4p=None) -> JetMap:
    """F = id + (F11, beta w^2) with the second-order inequalities strict.

    beta = i s + b, F11(z, w) = (i c + b) z w + (small Hermitian perturbation) z w, with c large
    enough to dominate phi4 - phi4' and the perturbation.
    """
    s = mpq(rng.randint(1, 4), rng.randint(1, 3))
    b = _rand_q(rng)
    # Hermitian perturbation P: <z, P z> is real, contributes to Re h only through b-compensation
    P = [[GaussQ(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c = _rand_g(rng, den=6) if i != j else GaussQ(_rand_q(rng, den=6))
            P[i][j] = c
            P[j][i] = c.conjugate()
    diff = (phi4 or WPoly.zero(n)) - (phi4p or WPoly.zero(n))
    bound = sum((abs(c.re) + abs(c.im) for _, c in diff.items()), mpq(0))
    pnorm = sum((abs(P[i][j].re) + abs(P[i][j].im) for i in range(n) for j in range(n)), mpq(0))
    # D = diff + (2c - s) ||z||^4 ; ord = s D - (Re<z,Pz>)^2 > 0 once 2c - s > bound + pnorm^2 / s
    c = (bound + pnorm * pnorm / s + s + 1) / 2 + mpq(rng.randint(0, 3), 2)
    w = HoloPoly.w(n)
    fz = []
    for j in range(n):
        zj = HoloPoly.z(n, j)
        lin = zj.scale(GaussQ(b, c))
        for k in range(n):
            # <z, P z> = sum z_j conj(P_jk z_k); the jet component is conj(P) applied entrywise
            if P[j][k]:
                lin = lin + HoloPoly.z(n, k).scale(P[j][k])
        fz.append(zj + lin * w)
    fw = w + (w * w).scale(GaussQ(b, s))
    return JetMap(n, 4, fz, fw, params={"s": str(s), "b": str(b), "c": str(c)})


def perturb_non_flat(rng, F: JetMap) -> JetMap:
    """Add (b + ic) z w and (b + is) w^2 with c > 0 and 0 <= s < 2c.

    When the weight-4 normal forms agree the second-order inequalities still
    hold, but Im<z, F^z_{1,1}(z, 1)> = -c||z||^2 is nonzero, so the result is
    an admissible jet that is not 2-flat.
    """
    n = F.n
    b = _rand_q(rng)
    c = mpq(rng.randint(1, 6), rng.randint(1, 3))
    s = 2 * c * mpq(rng.randint(0, 5), 6)
    w = HoloPoly.w(n)
    fz = [F.fz[j] + (HoloPoly.z(n, j) * w).scale(GaussQ(b, c)) for j in range(n)]
    fw = F.fw + (w * w).scale(GaussQ(b, s))
    return JetMap(n, F.K, fz, fw, params={"b": str(b), "c": str(c), "s": str(s)})


NECESSITY_KINDS = ("F^w_{2,0}", "F^w_{1,1}", "F^w_{3,0}", "F^z_{2,0}")


def necessity_violation(rng, n: int, kind: str):
    """Identity jet plus one forbidden low-weight term; returns (jet, weight where it shows up)."""
    K = 4
    z = [HoloPoly.z(n, j) for j in range(n)]
    w = HoloPoly.w(n)
    c = _rand_g(rng)
    while not c:
        c = _rand_g(rng)
    i, j = rng.randrange(n), rng.randrange(n)
    fz = list(z)
    fw = w
    if kind == "F^w_{2,0}":
        fw = w + (z[i] * z[j]).scale(c)
        weight = 2
    elif kind == "F^w_{1,1}":
        fw = w + (z[i] * w).scale(c)
        weight = 3
    elif kind == "F^w_{3,0}":
        fw = w + (z[i] * z[j] * z[rng.randrange(n)]).scale(c)
        weight = 3
    elif kind == "F^z_{2,0}":
        k = rng.randrange(n)
        fz[k] = fz[k] + (z[i] * z[j]).scale(c)
        weight = 3
    else:
        raise ValueError(kind)
    return JetMap(n, K, fz, fw, params={"kind": kind}), weight


def random_small_poly(rng):
    deg = rng.randint(0, 7)
    coeffs = [rng.randint(-4, 4) if rng.random() < 0.6 else 0 for _ in range(deg + 1)]
    lead = rng.randint(0, deg)
    for i in range(lead):
        coeffs[i] = 0
    return coeffs


def _eval_poly(coeffs, x):
    return sum(Fraction(a) * x ** i for i, a in enumerate(coeffs))


def reduce_1d_oracle(coeffs) -> str:
    """Sign of p on (0, eps) from exact dense evaluation at tiny dyadic points."""
    signs = set()
    for k in range(40, 81, 4):
        v = _eval_poly(coeffs, Fraction(1, 2 ** k))
        signs.add((v > 0) - (v < 0))
    if signs == {0}:
        return "zero"
    if len(signs) != 1:
        return "mixed"
    return "pos" if signs.pop() > 0 else "neg"


def polytope_oracle(support, remainder) -> bool:
    """LP: does conv(remainder) meet the relative interior of the extended polytope?"""
    pts = set()
    for a, b in support:
        pts.update({(a, b), (a, 0), (0, b), (0, 0)})
    V = sorted(pts)
    R = list(remainder)
    nv, nr = len(V), len(R)
    # variables: lambda (nv), mu (nr), t ; maximize t subject to lambda_i >= t
    c = np.zeros(nv + nr + 1)
    c[-1] = -1.0
    A_eq = np.zeros((4, nv + nr + 1))
    b_eq = np.array([1.0, 1.0, 0.0, 0.0])
    A_eq[0, :nv] = 1
    A_eq[1, nv:nv + nr] = 1
    for i, (x, y) in enumerate(V):
        A_eq[2, i] = x
        A_eq[3, i] = y
    for j, (x, y) in enumerate(R):
        A_eq[2, nv + j] = -x
        A_eq[3, nv + j] = -y
    A_ub = np.zeros((nv, nv + nr + 1))
    for i in range(nv):
        A_ub[i, i] = -1
        A_ub[i, -1] = 1
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(nv), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * (nv + nr) + [(None, 1)], method="highs")
    if not res.success:
        return True
    return not (-res.fun > 1e-9)


def _mat_mul(X, Y):
    return [[sum((X[i][k] * Y[k][j] for k in range(len(Y))), GaussQ(0)) for j in range(len(Y[0]))]
            for i in range(len(X))]


def _mat_inv(M):
    """Gauss-Jordan inverse over the Gaussian rationals."""
    n = len(M)
    A = [[GaussQ.coerce(x) for x in row] + [GaussQ(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        inv = GaussQ(1) / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def cayley_unitary(rng, n: int):
    """(I - S)(I + S)^{-1} for a random rational skew-Hermitian S; exactly unitary."""
    S = [[GaussQ(0)] * n for _ in range(n)]
    for i in range(n):
        S[i][i] = GaussQ(0, _rand_q(rng, -3, 3, 3))
        for j in range(i + 1, n):
            c = _rand_g(rng, den=3)
            S[i][j], S[j][i] = c, -c.conjugate()
    E = [[GaussQ(int(i == j)) for j in range(n)] for i in range(n)]
    minus = [[E[i][j] - S[i][j] for j in range(n)] for i in range(n)]
    plus = [[E[i][j] + S[i][j] for j in range(n)] for i in range(n)]
    return _mat_mul(minus, _mat_inv(plus))


def random_admissible_differential(rng, n: int):
    """(C A; 0 lam) with every singular value of C at most sqrt(lam)."""
    lam = mpq(rng.randint(1, 9), rng.randint(1, 3))
    C = [[_rand_g(rng, den=4) for _ in range(n)] for _ in range(n)]
    # ||C||_F^2 <= lam bounds the largest singular value
    fro = sum((c.abs2() for row in C for c in row), mpq(0))
    if fro > lam:
        k = mpq(int(gmpy2.isqrt(int(gmpy2.ceil(fro / lam)))) + 1)
        C = [[c * GaussQ(1 / k) for c in row] for row in C]
    A = [_rand_g(rng) for _ in range(n)]
    return [C[i] + [A[i]] for i in range(n)] + [[GaussQ(0)] * n + [GaussQ(lam)]]


def random_block_change(rng, L):
    """T2 L T1^{-1} with T = (s U, v; 0, s^2): the differentials of quadric-preserving block changes."""
    n = len(L) - 1
    Ts = []
    for _ in range(2):
        U = cayley_unitary(rng, n)
        s = mpq(rng.randint(1, 4), rng.randint(1, 3))
        T = [[U[i][j] * GaussQ(s) for j in range(n)] + [_rand_g(rng, den=3)] for i in range(n)]
        T.append([GaussQ(0)] * n + [GaussQ(s * s)])
        Ts.append(T)
    T1, T2 = Ts
    return _mat_mul(_mat_mul(T2, [[GaussQ.coerce(x) for x in row] for row in L]), _mat_inv(T1))


# ---------------------------------------------------------------------------
# appendix suites


@_timed
def suite_types_lemma(seed: int, cases: int = 200) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("types_lemma contrapositive")
    for _ in range(cases):
        p = random_traceless_one_var(rng)
        v = types_lemma(p)
        ok = v.is_violated
        if ok:
            val = p.to_float().numeric()(np.array([[np.exp(1j * v.witness)]]), np.zeros(1)).real[0]
            ok = val < 0
        res.record(ok, str(p))
    return res


@_timed
def suite_fourier_middle(seed: int, cases: int = 100) -> SuiteResult:
    rng = random.Random(seed + 1)
    res = SuiteResult("fourier_middle vs circle average")
    for _ in range(cases):
        s = rng.randint(1, 4)
        terms = {}
        for j in range(2 * s + 1):
            k = 2 * s - j
            if j > k:
                continue
            c = _rand_g(rng) if j != k else GaussQ(_rand_q(rng))
            terms[((j,), (k,), 0)] = c
            if j != k:
                terms[((k,), (j,), 0)] = c.conjugate()
        p = WPoly(1, terms)
        N = 4 * s + 8
        theta = 2 * np.pi * np.arange(N) / N
        avg = float(np.mean(p.to_float().numeric()(np.exp(1j * theta).reshape(-1, 1), np.zeros(N)).real))
        res.record(abs(float(fourier_middle(p)) - avg) <= 1e-10, str(p))
    return res


@_timed
def suite_reduce_1d(seed: int, cases: int = 100) -> SuiteResult:
    rng = random.Random(seed + 2)
    res = SuiteResult("reduce_1d vs dense evaluation")
    for _ in range(cases):
        coeffs = random_small_poly(rng)
        v = reduce_1d(coeffs)
        oracle = reduce_1d_oracle(coeffs)
        if v.is_violated:
            x = v.witness
            dense = all(_eval_poly(coeffs, x * Fraction(i, 50)) < 0 for i in range(1, 51))
            ok = oracle == "neg" and dense
        elif v.strict:
            ok = oracle == "pos"
        else:
            ok = oracle == "zero"
        res.record(ok, coeffs)
    return res


@_timed
def suite_polytope(seed: int, cases: int = 100) -> SuiteResult:
    rng = random.Random(seed + 3)
    res = SuiteResult("polytope_disjoint vs LP oracle")
    for _ in range(cases):
        support = [(rng.randint(0, 4), rng.randint(0, 4)) for _ in range(rng.randint(1, 3))]
        if rng.random() < 0.3:
            # degenerate extended polytopes: points on an axis
            support = [(rng.randint(0, 4), 0) for _ in range(rng.randint(1, 2))]
        rem = [(rng.randint(0, 5), rng.randint(0, 5)) for _ in range(rng.randint(1, 3))]
        got = polytope_disjoint({s: 1 for s in support}, RemainderSpec(tuple(rem)))
        res.record(got == polytope_oracle(support, rem), (support, rem))
    return res


# ---------------------------------------------------------------------------
# normal form suites


@_timed
def suite_normalform(seed: int, cases: int = 10, max_n: int = 2) -> SuiteResult:
    rng = random.Random(seed + 4)
    res = SuiteResult("cm_normalize postconditions")
    for _ in range(cases):
        n = rng.randint(1, max_n)
        H = random_model(rng, n)
        N, ch = cm_normalize(H)
        ok_normal = normal_space_check(N.phi, 6).is_holds
        ok_round = transform_graph(H.graph(), ch, 6) == N.graph()
        N2, ch2 = cm_normalize(N)
        ok_idem = ch2.is_identity() and N2.phi == N.phi
        res.record(ok_normal and ok_round and ok_idem, {"n": n, "normal": ok_normal, "round_trip": ok_round,
                                                         "idempotent": ok_idem})
    return res


# ---------------------------------------------------------------------------
# jet suites


def random_a(rng, n: int):
    while True:
        a = [GaussQ(mpq(rng.randint(-4, 4), 8), mpq(rng.randint(-4, 4), 8)) for _ in range(n)]
        if sum((x.re ** 2 + x.im ** 2 for x in a), mpq(0)) <= 1:
            return a


@_timed
def suite_siegel(seed: int, cases: int = 20, K: int = 8) -> SuiteResult:
    rng = random.Random(seed + 5)
    res = SuiteResult("quadric automorphisms are flat")
    for _ in range(cases):
        n = rng.randint(1, 3)
        a = random_a(rng, n)
        Q = HypersurfaceModel.quadric(n, K)
        rep = expand_basic(Q, Q, siegel_automorphism(a, K), K)
        res.record(all(not e for _, e in rep.components), [str(x) for x in a])
    return res


@_timed
def suite_necessity(seed: int, cases: int = 8) -> SuiteResult:
    rng = random.Random(seed + 6)
    res = SuiteResult("forbidden low-weight terms detected")
    for i in range(cases):
        kind = NECESSITY_KINDS[i % len(NECESSITY_KINDS)]
        n = rng.randint(1, 2)
        F, weight = necessity_violation(rng, n, kind)
        Q = HypersurfaceModel.quadric(n, 4)
        order, sign = classify_contact(expand_basic(Q, Q, F, 4, samples=2000, seed=seed))
        res.record(order + 1 == weight and sign.is_violated, kind)
    return res


@_timed
def suite_constructors(seed: int, cases: int = 4) -> SuiteResult:
    rng = random.Random(seed + 7)
    res = SuiteResult("constructed germs are admissible")
    for _ in range(cases):
        n = rng.randint(1, 2)
        H, Hp = random_normal_pair(rng, n, quadric=rng.random() < 0.5)
        F = construct_2flat_germ(H, Hp, samples=2000, seed=seed)
        ok1 = check_first_order(F.to_differential())[0].is_holds
        alpha = sorted([mpq(rng.randint(0, 4), 4) for _ in range(n)], reverse=True)
        G = construct_first_order_germ([GaussQ(a) for a in alpha], H, Hp, samples=2000, seed=seed)
        ok2 = check_first_order(G.to_differential())[0].is_holds
        res.record(ok1 and ok2, {"n": n, "alpha": [str(a) for a in alpha]})
    return res


SUITES = {
    "appendix": (suite_types_lemma, suite_fourier_middle, suite_reduce_1d, suite_polytope),
    "normalform": (suite_normalform,),
    "jets": (suite_siegel, suite_necessity, suite_constructors),
}


def run(suite: str = "all", seed: int = 0) -> list:
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for name in names:
        for fn in SUITES[name]:
            out.append(fn(seed))
    return out
