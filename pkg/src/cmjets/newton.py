"""Polynomial cancellation rules and positivity checks.

One-variable sign reduction, extended Newton polytopes in two variables,
the weighted cancellation rule, the types lemma for homogeneous polynomials
in one complex variable, and a trilean nonnegativity check for real forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from gmpy2 import mpq
from scipy.optimize import minimize_scalar

from .exact_linalg import ldl_psd
from .sampling import DEFAULT_SAMPLES, DEFAULT_SEED, refine_min, sphere, split_complex
from .scalars import FLOAT, GaussQ, rational_from_float
from .verdict import Verdict
from .wpoly import WPoly

NEG_TOL = 1e-12


# ---------------------------------------------------------------------------
# one variable


def _exact(c):
    if isinstance(c, float):
        return Fraction(c)
    if isinstance(c, GaussQ):
        if c.im != 0:
            raise ValueError("coefficient is not real")
        c = c.re
    return Fraction(int(mpq(c).numerator), int(mpq(c).denominator))


def reduce_1d(p: Sequence, d: int = None) -> Verdict:
    """Sign of p(x) for small x > 0, from the lowest nonzero coefficient.

    ``p`` lists coefficients a_0, a_1, ...  Terms above degree ``d`` belong to
    the o(x^d) remainder and are ignored.
    """
    coeffs = [_exact(c) for c in p]
    if d is not None:
        coeffs = coeffs[:d + 1]
    k = next((i for i, a in enumerate(coeffs) if a != 0), None)
    if k is None:
        return Verdict.holds("zero polynomial", lowest_degree=None)
    ak = coeffs[k]
    if ak > 0:
        return Verdict.holds(f"lowest coefficient a_{k} = {ak} > 0", strict=True, lowest_degree=k)
    tail = sum(abs(a) for a in coeffs[k + 1:])
    x = Fraction(1, 2) if tail == 0 else min(Fraction(1, 2), abs(ak) / (2 * tail))
    val = sum(a * x ** i for i, a in enumerate(coeffs))
    assert val < 0
    return Verdict.violated(f"lowest coefficient a_{k} = {ak} < 0", witness=x,
                            lowest_degree=k, value=val)


# ---------------------------------------------------------------------------
# extended Newton polytope


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Counter-clockwise hull vertices (exact for rational input)."""
    pts = sorted(set((Fraction(x), Fraction(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


@dataclass(frozen=True)
class RemainderSpec:
    degrees: tuple

    def __post_init__(self):
        for d in self.degrees:
            if len(d) != 2 or d[0] < 0 or d[1] < 0:
                raise ValueError(f"invalid remainder degree {d}")


@dataclass(frozen=True)
class ExtendedPolytope:
    generators: tuple
    hull: tuple

    @classmethod
    def of(cls, support: Iterable) -> "ExtendedPolytope":
        gens = tuple(sorted(set((int(a), int(b)) for a, b in support)))
        if not gens:
            return cls((), ())
        pts = set(gens)
        for a, b in gens:
            pts.update({(a, 0), (0, b), (0, 0)})
        return cls(gens, tuple(convex_hull(pts)))

    @property
    def dimension(self) -> int:
        if not self.hull:
            return -1
        if len(self.hull) == 1:
            return 0
        if len(self.hull) == 2:
            return 1
        return 2

    def contains(self, q, strict: bool = False) -> bool:
        """Membership in the closed region, or in its relative interior."""
        q = (Fraction(q[0]), Fraction(q[1]))
        dim = self.dimension
        if dim < 0:
            return False
        if dim == 0:
            return q == self.hull[0]
        if dim == 1:
            a, b = self.hull
            if _cross(a, b, q) != 0:
                return False
            t = _param(a, b, q)
            return (0 < t < 1) if strict else (0 <= t <= 1)
        h = self.hull
        for i in range(len(h)):
            c = _cross(h[i], h[(i + 1) % len(h)], q)
            if c < 0 or (strict and c == 0):
                return False
        return True


def _param(a, b, q) -> Fraction:
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx != 0:
        return (q[0] - a[0]) / dx
    return (q[1] - a[1]) / dy


def _support(p) -> list:
    if isinstance(p, Mapping):
        return [k for k, c in p.items() if c != 0]
    return list(p)


def _clip(poly: list, a, b) -> list:
    """Sutherland-Hodgman clip of a (possibly degenerate) convex polygon by the left half-plane of a->b."""
    if not poly:
        return []
    if len(poly) == 1:
        return poly if _cross(a, b, poly[0]) >= 0 else []
    out = []
    m = len(poly)
    edges = [(poly[i], poly[(i + 1) % m]) for i in range(m)] if m > 2 else [(poly[0], poly[1]), (poly[1], poly[0])]
    for s, e in edges:
        cs, ce = _cross(a, b, s), _cross(a, b, e)
        if cs >= 0:
            out.append(s)
        if (cs >= 0) != (ce >= 0) and cs != ce:
            t = cs / (cs - ce)
            out.append((s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])))
    # dedupe keeping order
    seen, res = set(), []
    for p in out:
        if p not in seen:
            seen.add(p)
            res.append(p)
    return res


def polytope_disjoint(p, r: RemainderSpec) -> bool:
    """True iff conv(r.degrees) misses the relative interior of the extended polytope of p.

    ``p`` is a map (l1, l2) -> coefficient, or an iterable of exponent pairs.
    """
    E = ExtendedPolytope.of(_support(p))
    R = convex_hull([(Fraction(a), Fraction(b)) for a, b in r.degrees])
    if E.dimension < 0 or not R:
        return True
    if E.dimension == 0:
        return E.hull[0] not in set(R)
    if E.dimension == 1:
        a, b = E.hull
        # intersect conv(R) with the line through a, b, then with the open segment
        Q = _clip(_clip(list(R), a, b), b, a)
        if not Q:
            return True
        ts = [_param(a, b, q) for q in Q]
        lo, hi = min(ts), max(ts)
        return not (hi > 0 and lo < 1 and (lo < hi or 0 < lo < 1))
    Q = list(R)
    h = E.hull
    for i in range(len(h)):
        Q = _clip(Q, h[i], h[(i + 1) % len(h)])
        if not Q:
            return True
    cx = sum(q[0] for q in Q) / len(Q)
    cy = sum(q[1] for q in Q) / len(Q)
    return not E.contains((cx, cy), strict=True)


# ---------------------------------------------------------------------------
# homogeneous polynomials in one complex variable


def _check_one_var(p: WPoly):
    if p.n != 1:
        raise ValueError("expected a polynomial in one complex variable")
    if p.u_degree():
        raise ValueError("polynomial depends on u")
    degs = {sum(m.kz) + sum(m.kzb) for m in p.keys()}
    if len(degs) > 1:
        raise ValueError("polynomial is not homogeneous")
    return degs.pop() if degs else 0


def fourier_middle(p: WPoly):
    """Coefficient p_s of z^s zbar^s for a real homogeneous form of degree 2s."""
    deg = _check_one_var(p)
    if deg % 2:
        raise ValueError("odd degree has no middle coefficient")
    s = deg // 2
    c = p.coeff(((s,), (s,), 0))
    if isinstance(c, GaussQ):
        return c.re
    return complex(c).real if c else 0


def _circle_values(p: WPoly):
    f = p.numeric()

    def vals(theta):
        z = np.exp(1j * np.atleast_1d(theta)).reshape(-1, 1)
        return f(z, np.zeros(z.shape[0])).real

    return vals


def types_lemma(p: WPoly) -> Verdict:
    """Search a negative value of p(e^{i theta}) when the middle coefficient vanishes.

    With p_s = 0 the circle average is zero, so for p not identically zero a
    grid of more than twice the maximal frequency always contains a strictly
    negative sample; a bounded scalar minimisation refines it.
    """
    deg = _check_one_var(p)
    if not p:
        return Verdict.holds("p is identically zero")
    if deg % 2 == 0:
        ps = fourier_middle(p)
        if ps > 0:
            return Verdict.not_applicable(f"middle coefficient p_s = {ps} > 0")
    vals = _circle_values(p)
    N = max(64, 8 * deg + 8)
    grid = 2 * np.pi * np.arange(N) / N
    v = vals(grid)
    # first grid point attaining the minimum, so witnesses are reproducible
    i = int(np.flatnonzero(v <= v.min() + 1e-9 * max(1.0, abs(v.min())))[0])
    step = 2 * np.pi / N
    res = minimize_scalar(lambda t: float(vals(t)[0]), bounds=(grid[i] - step, grid[i] + step),
                          method="bounded", options={"xatol": 1e-12})
    theta, val = (float(res.x), float(res.fun)) if res.fun < v[i] else (float(grid[i]), float(v[i]))
    theta = theta % (2 * np.pi)
    if val < 0:
        reason = "odd degree forces p = 0" if deg % 2 else "p_s = 0 but p is not identically zero"
        return Verdict.violated(reason, witness=theta, value=val)
    return Verdict.undetermined("no negative sample found", min_value=val)


# ---------------------------------------------------------------------------
# Gram certificates and sampling


def _split_half(A, B, d):
    """Balanced split used by the mixed-monomial Gram: returns (a_j, b_j) with |a_j|+|b_j| = d."""
    a = [x // 2 for x in A]
    b = [x // 2 for x in B]
    deficit = d - sum(a) - sum(b)
    n = len(A)
    for c in reversed(range(n)):
        if deficit >= 2 and A[c] % 2 and B[c] % 2:
            a[c] += 1
            b[c] += 1
            deficit -= 2
    for c in reversed(range(n)):
        if deficit <= 0:
            break
        if A[c] - a[c] > a[c]:
            a[c] += 1
            deficit -= 1
    for c in reversed(range(n)):
        if deficit <= 0:
            break
        if B[c] - b[c] > b[c]:
            b[c] += 1
            deficit -= 1
    if deficit != 0:
        return None
    return tuple(a), tuple(b)


def _gram(p: WPoly, rule: str):
    """Hermitian Gram matrix G with p = v* G v for a monomial vector v.

    Basis monomials are triples (a, b, e) meaning z^a zbar^b u^e.
    Returns (basis, G) or None when the rule cannot place some term.
    """
    n = p.n
    entries: dict = {}
    half = GaussQ(mpq(1, 2)) if p.backend != FLOAT else 0.5
    for m, c in p.items():
        A, B, l = m.kz, m.kzb, m.ku
        ej = l // 2
        ei = l - ej
        if rule == "holomorphic":
            mj = (A, (0,) * n)
            mi = (B, (0,) * n)
        else:
            tot = sum(A) + sum(B)
            if tot % 2:
                return None
            sp = _split_half(A, B, tot // 2)
            if sp is None:
                return None
            aj, bj = sp
            bi = tuple(x - y for x, y in zip(A, aj))
            ai = tuple(x - y for x, y in zip(B, bj))
            mi, mj = (ai, bi), (aj, bj)
        for (xi, yi, fi), (xj, yj, fj) in (((*mi, ei), (*mj, ej)), ((*mi, ej), (*mj, ei))):
            key = ((xi, yi, fi), (xj, yj, fj))
            entries[key] = entries.get(key, 0) + c * half * half
            tkey = ((xj, yj, fj), (xi, yi, fi))
            entries[tkey] = entries.get(tkey, 0) + c.conjugate() * half * half
    basis = sorted({k[0] for k in entries} | {k[1] for k in entries})
    idx = {b: i for i, b in enumerate(basis)}
    N = len(basis)
    zero = GaussQ(0) if p.backend != FLOAT else 0j
    G = [[zero] * N for _ in range(N)]
    for (r, s), v in entries.items():
        G[idx[r]][idx[s]] = G[idx[r]][idx[s]] + v
    return basis, G


def _gram_reconstruct(n, basis, G) -> WPoly:
    terms: dict = {}
    for i, (ai, bi, ei) in enumerate(basis):
        for j, (aj, bj, ej) in enumerate(basis):
            g = G[i][j]
            if not g:
                continue
            # conj(z^ai zbar^bi u^ei) * z^aj zbar^bj u^ej
            kz = tuple(x + y for x, y in zip(bi, aj))
            kzb = tuple(x + y for x, y in zip(ai, bj))
            key = (kz, kzb, ei + ej)
            terms[key] = terms.get(key, 0) + g
    return WPoly(n, terms)


def _classify_shape(p: WPoly) -> str:
    if not p:
        return "zero"
    if len(p.weights()) == 1:
        return "weighted"
    zdeg = {sum(m.kz) + sum(m.kzb) for m in p.keys()}
    if len(zdeg) == 1:
        return "free_t"
    return "general"


def _nice_points(n: int, shape: str):
    """Small exact test points tried before random sampling."""
    pts = []
    for j in range(n):
        z = [GaussQ(0)] * n
        z[j] = GaussQ(1)
        pts.append((z, GaussQ(0)))
    if shape in ("weighted", "general"):
        pts.append(([GaussQ(0)] * n, GaussQ(1)))
        pts.append(([GaussQ(0)] * n, GaussQ(-1)))
    for j in range(n):
        for k in range(j + 1, n):
            for s in (GaussQ(1), GaussQ(-1), GaussQ(0, 1), GaussQ(0, -1)):
                z = [GaussQ(0)] * n
                z[j] = GaussQ(1)
                z[k] = s
                pts.append((z, GaussQ(0)))
    if shape in ("weighted", "general", "free_t"):
        for j in range(n):
            for t in (GaussQ(1), GaussQ(-1)):
                z = [GaussQ(0)] * n
                z[j] = GaussQ(1)
                pts.append((z, t))
    return pts


def _exact_value(p: WPoly, z, u):
    pe = p if p.backend != FLOAT else None
    if pe is None:
        return None
    return p.evaluate(z, u)


def _rationalize_point(z: np.ndarray, u: float):
    zq = [GaussQ(rational_from_float(float(c.real), 10**6), rational_from_float(float(c.imag), 10**6)) for c in z]
    return zq, GaussQ(rational_from_float(float(u), 10**6))


def sample_minimum(p: WPoly, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, shape: str = None):
    """Approximate minimum of p over the normalised sample set.

    weighted: (z, u) on the Euclidean unit sphere (every weighted orbit meets it);
    free_t: z on the unit sphere, u = tan(theta) free;
    general: unit sphere scaled by radii in (0, 1].
    Returns (value, z, u).
    """
    n = p.n
    shape = shape or _classify_shape(p)
    f = p.numeric()
    if shape == "free_t":
        x = sphere(2 * n + 1, samples, seed)
        z, _ = split_complex(x[:, :2 * n], n)
        z = z / np.linalg.norm(np.hstack([z.real, z.imag]), axis=1, keepdims=True)
        # angle spread over (-pi/2, pi/2); u = tan(angle) covers the whole line
        theta = np.clip(np.arctan(3.0 * x[:, 2 * n] / np.abs(x[:, 2 * n]).max()) * 1.6, -1.55, 1.55)
        u = np.tan(theta)

        def unpack(v):
            zz = v[:2 * n]
            zz = zz / np.linalg.norm(zz)
            return zz[:n] + 1j * zz[n:], np.tan(np.clip(v[2 * n], -1.55, 1.55))

        vals = f(z, u).real
        x0 = np.hstack([np.hstack([z.real, z.imag]), theta[:, None]])
        norm_flag = False
    else:
        x = sphere(2 * n + 1, samples, seed)
        if shape == "general":
            x = x * np.linspace(0.05, 1.0, samples)[:, None]
        z, u = split_complex(x, n)
        vals = f(z, u).real

        def unpack(v):
            return v[:n] + 1j * v[n:2 * n], v[2 * n]

        x0 = x
        norm_flag = shape != "general"
    order = np.argsort(vals)[:5]

    def g(v):
        zz, uu = unpack(v)
        return f(zz.reshape(1, -1), np.array([uu])).real[0]

    best_v, best_x = refine_min(g, [x0[i] for i in order], normalize=norm_flag)
    if vals[order[0]] < best_v:
        best_v, best_x = float(vals[order[0]]), x0[order[0]]
    zz, uu = unpack(np.asarray(best_x))
    return float(best_v), zz, float(uu)


def nonneg_check_bihom(p: WPoly, n: int = None, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                       shape: str = None) -> Verdict:
    """Trilean nonnegativity of a real polynomial in (z, zbar) or (z, zbar, u).

    u is a real variable: weight 2 when p is weighted homogeneous, otherwise a
    free parameter t (as produced by restricting u = t||z||^2).
    """
    if p.n != (n or p.n):
        raise ValueError("dimension mismatch")
    if not p:
        return Verdict.holds("zero polynomial", certificate="zero")
    exact = p.backend != FLOAT
    real = p.is_real() if exact else p.is_real_approx(1e-12)
    if not real:
        raise ValueError("polynomial is not real-valued")
    shape = shape or _classify_shape(p)
    n = p.n
    # 1) exact Gram certificates
    if exact:
        for rule in ("holomorphic", "balanced"):
            g = _gram(p, rule)
            if g is None:
                continue
            basis, G = g
            if _gram_reconstruct(n, basis, G) != p:
                continue
            res = ldl_psd(G)
            if res.psd:
                return Verdict.holds(f"Hermitian Gram matrix ({rule} basis) is positive "
                                     f"{'definite' if res.pd else 'semidefinite'}",
                                     strict=res.pd and _strict_basis(basis, shape),
                                     certificate="gram", rule=rule,
                                     basis=[_fmt_basis(b) for b in basis],
                                     ldl_diagonal=[str(x) for x in res.diag])
        # 2) nice exact points
        for z, u in _nice_points(n, shape):
            val = p.evaluate(z, u)
            if val.re < 0:
                return Verdict.violated("negative value at an exact test point", witness={"z": z, "u": u},
                                        value=val.re, certificate="point")
    # 3) sampling
    val, z, u = sample_minimum(p, samples, seed, shape)
    if val < -NEG_TOL:
        if exact:
            zq, uq = _rationalize_point(z, u)
            ev = p.evaluate(zq, uq)
            if ev.re < 0:
                return Verdict.violated("negative value found by sampling", witness={"z": zq, "u": uq},
                                        value=ev.re, certificate="point", seed=seed)
            return Verdict.undetermined("sampled negative value does not survive rationalisation",
                                        min_value=val, seed=seed)
        return Verdict.violated("negative value found by sampling", witness={"z": z, "u": u},
                                value=val, certificate="point", seed=seed)
    return Verdict.undetermined("no certificate; sampling found no negative value", min_value=val,
                                samples=samples, seed=seed)


def _strict_basis(basis, shape) -> bool:
    # v(z, u) must vanish only at the origin of the sample set
    has_u_only = any(sum(a) + sum(b) == 0 and e > 0 for a, b, e in basis)
    has_z = any(sum(a) + sum(b) > 0 and e == 0 for a, b, e in basis)
    if shape == "weighted" and any(e for _, _, e in basis):
        return has_u_only and has_z
    return has_z


def _fmt_basis(b) -> str:
    a, bb, e = b
    return f"z^{list(a)} zbar^{list(bb)} u^{e}"


# ---------------------------------------------------------------------------
# weighted cancellation rule


@dataclass
class CancellationResult:
    component: WPoly
    z_degree: int
    verdict: Verdict
    reduction: str = field(default="p + r >= 0 with r of higher weighted order implies p >= 0")


def cancel_weighted(p: WPoly, nu1: int = 1, nu2: int = 2, d: int = None, block: str = "z",
                    samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> CancellationResult:
    """Apply the weighted cancellation rule with X1 = z (weight nu1) and X2 = u (weight nu2).

    Returns the nontrivial bihomogeneous component of minimal degree in the
    chosen block together with its nonnegativity verdict.
    """
    parts: dict = {}
    for m, c in p.items():
        zd = sum(m.kz) + sum(m.kzb)
        w = nu1 * zd + nu2 * m.ku
        if d is None:
            d = w
        if w != d:
            raise ValueError(f"p is not weighted homogeneous of degree {d} for weights ({nu1},{nu2})")
        key = zd if block == "z" else m.ku
        parts.setdefault(key, {})[(m.kz, m.kzb, m.ku)] = c
    if not parts:
        return CancellationResult(WPoly.zero(p.n), 0, Verdict.holds("zero polynomial"))
    k = min(parts)
    comp = WPoly(p.n, parts[k])
    return CancellationResult(comp, k, nonneg_check_bihom(comp, samples=samples, seed=seed))
