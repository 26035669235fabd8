"""Boundary jets: admissibility checks, the basic-inequality engine and constructors.

Maps are truncated germs F = (F^z, F^w) stored as holomorphic polynomials
in (z, w) with w of weight 2.  The basic expression of F for hypersurfaces
H (source) and H' (target) is

    e = Im F^w(Z) - ||F^z(Z)||^2 - sum_mu phi'_mu(F^z(Z), conj, Re F^w(Z)),
    Z = (z, u + i||z||^2 + i sum_mu phi_mu(z, zbar, u)),

and F maps the domain into the target near 0 when e >= 0 there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence

import numpy as np
from gmpy2 import mpq

from .exact_linalg import ldl_psd
from .newton import nonneg_check_bihom
from .normalform import (CoordChange, HypersurfaceModel, apply_change, cm_normalize,
                         weighted_equivalence)
from .sampling import DEFAULT_SAMPLES, DEFAULT_SEED, complex_sphere, sphere, split_complex
from .scalars import FLOAT, RATIONAL, GaussQ, I
from .trace import BihomForm, normal_space_check
from .verdict import InternalError, PreconditionError, Verdict
from .wpoly import HoloPoly, WPoly, compose_holo, compose_holo_map, restrict_diagonal, substitute

MARGIN = 1e-9


def _is_float(x) -> bool:
    return isinstance(x, (float, complex))


def _scalar(x):
    if _is_float(x):
        return complex(x)
    if isinstance(x, Fraction):
        return GaussQ(mpq(x.numerator, x.denominator))
    return GaussQ.coerce(x)


def _zero_poly(p, tol=None) -> bool:
    if not p:
        return True
    if p.backend == FLOAT:
        return p.max_abs() <= (tol if tol is not None else 1e-12)
    return False


def _sc_is_zero(c, tol=1e-12) -> bool:
    if _is_float(c):
        return abs(c) <= tol
    return c == 0


# ---------------------------------------------------------------------------
# jets


@dataclass
class JetMap:
    """Truncated germ F(z, w) with F(0) = 0, components through weight K."""

    n: int
    K: int
    fz: List[HoloPoly]
    fw: HoloPoly
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.fz) != self.n:
            raise ValueError(f"expected {self.n} z-components, got {len(self.fz)}")
        for p in list(self.fz) + [self.fw]:
            if p.n != self.n:
                raise ValueError("component dimension mismatch")
            c = p.constant_term()
            if c:
                raise ValueError("jet must fix the origin (F(0) = 0)")
        self.fz = [p.truncate(self.K) for p in self.fz]
        self.fw = self.fw.truncate(self.K)

    @classmethod
    def identity(cls, n: int, K: int) -> "JetMap":
        return cls(n, K, [HoloPoly.z(n, j) for j in range(n)], HoloPoly.w(n))

    @classmethod
    def from_components(cls, n: int, K: int, Fz: dict = None, Fw: dict = None, linear=None) -> "JetMap":
        """Identity (or ``linear``) plus the given (l, k) components.

        ``Fz[(l, k)]`` is a list of n z-polynomials (HoloPolys without w),
        multiplied by w^k; ``Fw[(l, k)]`` is one z-polynomial.
        """
        base = cls.identity(n, K) if linear is None else cls.from_differential(linear, K)
        fz = list(base.fz)
        fw = base.fw
        w = HoloPoly.w(n)
        for (l, k), comps in (Fz or {}).items():
            for j, p in enumerate(comps):
                fz[j] = fz[j] + _times_wk(p, k, w)
        for (l, k), p in (Fw or {}).items():
            fw = fw + _times_wk(p, k, w)
        return cls(n, K, fz, fw)

    @classmethod
    def from_differential(cls, L, K: int) -> "JetMap":
        n = len(L) - 1
        zs = [HoloPoly.z(n, j) for j in range(n)] + [HoloPoly.w(n)]
        fz = []
        for i in range(n):
            p = HoloPoly.zero(n)
            for j in range(n + 1):
                c = _scalar(L[i][j])
                if not _sc_is_zero(c, 0):
                    p = p + zs[j].scale(c)
            fz.append(p)
        fw = HoloPoly.zero(n)
        for j in range(n + 1):
            c = _scalar(L[n][j])
            if not _sc_is_zero(c, 0):
                fw = fw + zs[j].scale(c)
        return cls(n, K, fz, fw)

    # component access ----------------------------------------------------
    def Fz(self, l: int, k: int) -> List[HoloPoly]:
        return [p.component(l, k) for p in self.fz]

    def Fw(self, l: int, k: int) -> HoloPoly:
        return self.fw.component(l, k)

    def Fz_at1(self, l: int, k: int) -> List[HoloPoly]:
        """F^z_{l,k}(z, 1) as z-polynomials."""
        return [p.at_w(1) for p in self.Fz(l, k)]

    def Fw_at1(self, l: int, k: int) -> HoloPoly:
        return self.Fw(l, k).at_w(1)

    def w_power_coeff(self, k: int):
        """F^w_{0,k}(1), the coefficient of w^k in F^w."""
        c = self.fw.coefficient_at_w_power(k)
        return c if c else (0j if self.backend == FLOAT else GaussQ(0))

    def z_components(self) -> List[HoloPoly]:
        return list(self.fz)

    def w_component(self) -> HoloPoly:
        return self.fw

    @property
    def backend(self) -> str:
        for p in list(self.fz) + [self.fw]:
            if p and p.backend == FLOAT:
                return FLOAT
        return RATIONAL

    def truncate(self, K: int) -> "JetMap":
        return JetMap(self.n, min(K, self.K), self.fz, self.fw, dict(self.params))

    def to_float(self) -> "JetMap":
        return JetMap(self.n, self.K, [p.to_float() for p in self.fz], self.fw.to_float(), dict(self.params))

    def __add__(self, other: "JetMap") -> "JetMap":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return JetMap(self.n, min(self.K, other.K), [a + b for a, b in zip(self.fz, other.fz)],
                      self.fw + other.fw)

    def __sub__(self, other: "JetMap") -> "JetMap":
        return JetMap(self.n, min(self.K, other.K), [a - b for a, b in zip(self.fz, other.fz)],
                      self.fw - other.fw)

    def __eq__(self, other):
        if not isinstance(other, JetMap):
            return NotImplemented
        return self.n == other.n and self.fz == other.fz and self.fw == other.fw

    def to_differential(self):
        """The (n+1) x (n+1) matrix dF_0 in the basis (z_1..z_n, w)."""
        n = self.n
        zero = 0j if self.backend == FLOAT else GaussQ(0)
        mons = [((0,) * j + (1,) + (0,) * (n - j - 1), 0) for j in range(n)] + [((0,) * n, 1)]
        rows = []
        for p in list(self.fz) + [self.fw]:
            rows.append([p.coeff(m) or zero for m in mons])
        return rows

    def has_identity_linear_part(self) -> bool:
        L = self.to_differential()
        n = self.n
        for i in range(n + 1):
            for j in range(n + 1):
                target = 1 if i == j else 0
                c = L[i][j]
                if _is_float(c):
                    if abs(c - target) > 1e-12:
                        return False
                elif c != target:
                    return False
        return True

    def degree_part(self, d: int) -> "JetMap":
        """Ordinary Taylor part of total degree d in (z, w) (not a valid jet; F(0) = 0 kept)."""
        return JetMap(self.n, self.K, [p.degree_part(d) for p in self.fz], self.fw.degree_part(d))

    def compose(self, inner: "JetMap", K: int = None) -> "JetMap":
        """self o inner, truncated at weight K."""
        K = min(self.K, inner.K) if K is None else K
        fz = [compose_holo_map(p, inner.fz, inner.fw, K) for p in self.fz]
        fw = compose_holo_map(self.fw, inner.fz, inner.fw, K)
        return JetMap(self.n, K, fz, fw)

    def __str__(self):
        parts = [f"F^z_{j + 1} = {p}" for j, p in enumerate(self.fz)] + [f"F^w = {self.fw}"]
        return "; ".join(parts)


def _times_wk(p: HoloPoly, k: int, w: HoloPoly) -> HoloPoly:
    out = p
    for _ in range(k):
        out = out * w
    return out


def _inner_z(n: int, G: Sequence[HoloPoly]) -> WPoly:
    """<z, G(z)> = sum_j z_j conj(G_j(z)) for w-free holomorphic G."""
    out = WPoly.zero(n)
    for j, g in enumerate(G):
        if g:
            out = out + WPoly.z(n, j) * WPoly.from_holomorphic(g).conjugate()
    return out


def _norm2_holo(n: int, G: Sequence[HoloPoly]) -> WPoly:
    out = WPoly.zero(n)
    for g in G:
        if g:
            gw = WPoly.from_holomorphic(g)
            out = out + gw * gw.conjugate()
    return out


# ---------------------------------------------------------------------------
# first order


@dataclass
class DifferentialData:
    C: list
    A: list
    lam: object
    mu: list
    alpha: list
    charpoly: list = None      # characteristic polynomial of C*C / lambda, highest degree first
    backend: str = RATIONAL


def _mat_mul(X, Y):
    n, m, p = len(X), len(Y), len(Y[0]) if Y else 0
    return [[sum((X[i][k] * Y[k][j] for k in range(m)), GaussQ(0)) for j in range(p)] for i in range(n)]


def _charpoly_exact(M) -> list:
    """Faddeev-LeVerrier: coefficients [1, c_{n-1}, ..., c_0] of det(xI - M)."""
    n = len(M)
    coeffs = [GaussQ(1)]
    Mk = [[GaussQ(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        prev = coeffs[-1]
        A = [[Mk[i][j] + (prev if i == j else GaussQ(0)) for j in range(n)] for i in range(n)]
        Mk = _mat_mul(M, A)
        tr = sum((Mk[i][i] for i in range(n)), GaussQ(0))
        coeffs.append(-tr * GaussQ(mpq(1, k)))
    return coeffs


def check_first_order(L) -> tuple:
    """Admissibility of a differential at a boundary point.

    Holds iff L = (C A; 0 lambda) with lambda > 0 and every singular value of
    C at most sqrt(lambda).  Returns (verdict, DifferentialData or None).
    """
    m = len(L)
    if m < 2 or any(len(row) != m for row in L):
        return Verdict.violated("differential must be a square (n+1) x (n+1) matrix"), None
    n = m - 1
    entries = [[_scalar(x) for x in row] for row in L]
    is_float = any(_is_float(x) for row in entries for x in row)
    if is_float:
        entries = [[complex(x) for x in row] for row in entries]
    C = [row[:n] for row in entries[:n]]
    A = [row[n] for row in entries[:n]]
    lam = entries[n][n]
    for j in range(n):
        if not _sc_is_zero(entries[n][j]):
            return Verdict.violated("w-component of dF_0 depends on z (tangent space not preserved)",
                                    witness={"entry": (n, j)}), None
    lam_real = (abs(lam.imag) <= 1e-12 and lam.real > 0) if is_float else (lam.im == 0 and lam.re > 0)
    Cn = np.array([[complex(x) for x in row] for row in C])
    sv = sorted(np.linalg.svd(Cn, compute_uv=False).tolist(), reverse=True) if n else []
    if not lam_real:
        return Verdict.violated("normal stretching lambda must be real and positive", witness={"lambda": str(lam)}), \
            DifferentialData(C, A, lam, sv, [], None, FLOAT if is_float else RATIONAL)
    lam_f = float(lam.real) if is_float else float(lam.re)
    alpha = [s / np.sqrt(lam_f) for s in sv]
    if is_float:
        CC = Cn.conj().T @ Cn / lam_f
        charpoly = np.real_if_close(np.poly(CC)).tolist()
        M = lam_f * np.eye(n) - Cn.conj().T @ Cn
        ev = np.linalg.eigvalsh(M)
        data = DifferentialData(C, A, lam_f, sv, alpha, charpoly, FLOAT)
        if ev.min(initial=0.0) < -1e-12:
            return Verdict.violated(f"singular value {sv[0]:.6g} exceeds sqrt(lambda) = {np.sqrt(lam_f):.6g}",
                                    witness={"alpha_max": alpha[0]}), data
        strict = ev.min(initial=1.0) > 1e-12
        return Verdict.holds("singular values bounded by sqrt(lambda)", strict=strict, alpha=alpha), data
    Cs = [[C[j][i].conjugate() for j in range(n)] for i in range(n)]
    CC = _mat_mul(Cs, C)
    inv = GaussQ(1) / lam
    charpoly = _charpoly_exact([[x * inv for x in row] for row in CC])
    charpoly = [c.re for c in charpoly]
    data = DifferentialData(C, A, lam.re, sv, alpha, charpoly, RATIONAL)
    M = [[(lam if i == j else GaussQ(0)) - CC[i][j] for j in range(n)] for i in range(n)]
    res = ldl_psd(M)
    if not res.psd:
        return Verdict.violated("a singular value of C exceeds sqrt(lambda)",
                                witness={"vector": [str(x) for x in res.witness], "value": str(res.value)},
                                certificate="ldl"), data
    return Verdict.holds("singular values bounded by sqrt(lambda)", strict=res.pd, certificate="ldl",
                         charpoly=[str(c) for c in charpoly]), data


# ---------------------------------------------------------------------------
# quadric automorphisms


def _geometric_inverse(X: HoloPoly, K: int) -> HoloPoly:
    """1/(1 - X) truncated at weight K, for X without constant term."""
    n = X.n
    one = HoloPoly.constant(n, 1)
    out = one
    term = one
    for _ in range(K):
        term = term.mul(X, K)
        if not term:
            break
        out = out + term
    return out


def siegel_automorphism(a: Sequence, K: int) -> JetMap:
    """g_a(z, w) = (z + a w, w) / (1 - 2i<z, a> - i||a||^2 w), expanded through weight K."""
    n = len(a)
    a = [_scalar(x) for x in a]
    is_float = any(_is_float(x) for x in a)
    if is_float:
        a = [complex(x) for x in a]
    iu = 1j if is_float else I
    za = HoloPoly.zero(n)
    norm_a = 0.0 if is_float else GaussQ(0)
    for j, aj in enumerate(a):
        za = za + HoloPoly.z(n, j).scale(aj.conjugate())
        norm_a = norm_a + (aj * aj.conjugate())
    X = za.scale(2 * iu) + HoloPoly.w(n).scale(norm_a * iu)
    inv = _geometric_inverse(X, K)
    w = HoloPoly.w(n)
    fz = [(HoloPoly.z(n, j) + w.scale(a[j])).mul(inv, K) for j in range(n)]
    fw = w.mul(inv, K)
    return JetMap(n, K, fz, fw, params={"a": [str(x) for x in a]})


def parabolic_automorphism(n: int, r, K: int) -> JetMap:
    """g_r(z, w) = (z, w) / (1 - r w) with r real."""
    r = _scalar(r)
    X = HoloPoly.w(n).scale(r)
    inv = _geometric_inverse(X, K)
    fz = [HoloPoly.z(n, j).mul(inv, K) for j in range(n)]
    return JetMap(n, K, fz, HoloPoly.w(n).mul(inv, K), params={"r": str(r)})


def jet_as_change(F: JetMap) -> CoordChange:
    n = F.n
    f = [F.fz[j] - HoloPoly.z(n, j) for j in range(n)]
    g = F.fw - HoloPoly.w(n)
    return CoordChange(n, F.K, f, g)


# ---------------------------------------------------------------------------
# basic expression


class ContactReport:
    """Weighted homogeneous parts e_mu of the basic expression."""

    def __init__(self, n: int, K: int, components: list, samples: int = DEFAULT_SAMPLES,
                 seed: int = DEFAULT_SEED, notes: dict = None):
        self.n = n
        self.K = K
        self.components = components
        self.samples = samples
        self.seed = seed
        self.notes = notes or {}
        self._sign = None

    def component(self, mu: int) -> WPoly:
        for m, e in self.components:
            if m == mu:
                return e
        return WPoly.zero(self.n)

    def first_nonzero(self):
        for mu, e in self.components:
            if not _zero_poly(e):
                return mu, e
        return None, None

    @property
    def tangency_order(self) -> int:
        mu, _ = self.first_nonzero()
        return self.K if mu is None else mu - 1

    @property
    def lowest_sign(self) -> Verdict:
        if self._sign is None:
            self._sign = _component_sign(self)
        return self._sign

    def total(self) -> WPoly:
        out = WPoly.zero(self.n)
        for _, e in self.components:
            out = out + e
        return out


def expand_basic(H: HypersurfaceModel, Hp: HypersurfaceModel, F: JetMap, K: int = None,
                 allow_truncated_models: bool = False, samples: int = DEFAULT_SAMPLES,
                 seed: int = DEFAULT_SEED) -> ContactReport:
    """Expand rho'(F(Z)) along the source boundary and split it by weight.

    With ``allow_truncated_models`` the models may be stored below K; their
    missing higher terms are then taken to be zero (recorded in the report).
    """
    K = F.K if K is None else K
    n = F.n
    if H.n != n or Hp.n != n:
        raise ValueError(f"dimension mismatch: source {H.n}, target {Hp.n}, map {n}")
    if F.K < K:
        raise ValueError(f"map stored through weight {F.K} < {K}")
    if not allow_truncated_models and (H.K < K or Hp.K < K):
        raise ValueError(f"models stored through weights {H.K}, {Hp.K} < {K}")
    is_float = F.backend == FLOAT or H.backend == FLOAT or Hp.backend == FLOAT
    iu = 1j if is_float else I
    src = WPoly.zero(n)
    for mu, p in H.phi.items():
        if mu <= K:
            src = src + p
    W = WPoly.u(n) + (WPoly.norm2(n) + src).scale(iu)
    Fz, Fw = F.fz, F.fw
    if is_float:
        W = W.to_float()
        Fz, Fw = [p.to_float() for p in Fz], Fw.to_float()
    fz = [compose_holo(p, W, K) for p in Fz]
    fw = compose_holo(Fw, W, K)
    e = fw.imag_part()
    for p in fz:
        e = e - p.mul(p.conjugate(), K)
    tgt = WPoly.zero(n)
    for mu, p in Hp.phi.items():
        if mu <= K:
            tgt = tgt + p
    if tgt:
        if is_float:
            tgt = tgt.to_float()
        e = e - substitute(tgt, fz, fw.real_part(), K)
    if is_float:
        e = e.to_float().prune(1e-14)
    low = e.truncate(0)
    if not _zero_poly(low):
        raise InternalError("basic expression has a constant term; F(0) is not on the target")
    comps = [(mu, e.part(mu)) for mu in range(1, K + 1)]
    notes = {}
    if H.K < K or Hp.K < K:
        notes["models_truncated_at"] = (H.K, Hp.K)
    return ContactReport(n, K, comps, samples, seed, notes)


def _component_sign(report: ContactReport) -> Verdict:
    mu, e = report.first_nonzero()
    if mu is None:
        return Verdict.holds(f"all components vanish through weight {report.K}", certificate="flat")
    v = nonneg_check_bihom(e, report.n, report.samples, report.seed, shape="weighted")
    if not v.is_undetermined:
        v.certificate.setdefault("weight", mu)
        return v
    # fall back to the diagonal restriction u = t ||z||^2
    parts = restrict_diagonal(e)
    r = WPoly.zero(e.n)
    for l, q in parts.items():
        r = r + q * WPoly.u(e.n).pow(l)
    v2 = nonneg_check_bihom(r, report.n, report.samples, report.seed, shape="free_t")
    if v2.is_violated and v2.witness is not None:
        z = v2.witness["z"]
        t = v2.witness["u"]
        nz = sum(abs(complex(x)) ** 2 for x in z)
        v2.witness = {"z": z, "u": t * nz if not _is_float(t) else float(t) * nz}
    v2.certificate.setdefault("weight", mu)
    v2.certificate["restricted"] = True
    return v2 if not v2.is_undetermined else v


def classify_contact(report: ContactReport):
    """(tangency order, sign verdict of the first nonvanishing component)."""
    return report.tangency_order, report.lowest_sign


# ---------------------------------------------------------------------------
# second order


def _as_wpoly(phi, n: int) -> WPoly:
    if phi is None:
        return WPoly.zero(n)
    if isinstance(phi, BihomForm):
        return phi.to_wpoly()
    return phi


def second_order_data(F: JetMap):
    """(beta, h) with beta = F^w_{0,2}(1) and h = <z, F^z_{1,1}(z, 1)>."""
    beta = F.w_power_coeff(2)
    h = _inner_z(F.n, F.Fz_at1(1, 1))
    return beta, h


def _re_im(c):
    if _is_float(c):
        return c.real, c.imag
    return c.re, c.im


def ord_forms(F: JetMap, phi4, phi4p):
    """(Im beta, ord form, ord2 form): ord = Im beta * D - (Re h - ||z||^2 Re beta)^2, ord2 = D + ||z||^4 Im beta."""
    n = F.n
    beta, h = second_order_data(F)
    rb, ib = _re_im(beta)
    r = WPoly.norm2(n)
    r2 = r * r
    diff = _as_wpoly(phi4, n) - _as_wpoly(phi4p, n)
    ord2 = diff - (r * h.imag_part()).scale(2)
    D = ord2 - r2.scale(ib)
    lin = h.real_part() - r.scale(rb)
    ordf = D.scale(ib) - lin * lin
    return ib, ordf, ord2


def diagonal_quadratic_form(F: JetMap, phi4, phi4p) -> dict:
    """Coefficients {power of t: (2,2) form} of the quadratic in t from the weight-4 inequality."""
    n = F.n
    beta, h = second_order_data(F)
    rb, ib = _re_im(beta)
    r = WPoly.norm2(n)
    r2 = r * r
    diff = _as_wpoly(phi4, n) - _as_wpoly(phi4p, n)
    return {2: r2.scale(ib),
            1: (r2.scale(rb) - r * h.real_part()).scale(2),
            0: diff - (r * h.imag_part()).scale(2) - r2.scale(ib)}


def _lower_shape_terms(F: JetMap):
    """Terms of weight <= 3 that any admissible germ with dF_0 = id must lack."""
    bad = {}
    checks = {"F^w_{2,0}": F.Fw(2, 0), "F^w_{1,1}": F.Fw(1, 1), "F^w_{3,0}": F.Fw(3, 0)}
    for name, p in checks.items():
        if not _zero_poly(p):
            bad[name] = str(p)
    z20 = F.Fz(2, 0)
    if any(not _zero_poly(p) for p in z20):
        bad["F^z_{2,0}"] = [str(p) for p in z20]
    return bad


def check_second_order(F: JetMap, phi4=None, phi4p=None, samples: int = DEFAULT_SAMPLES,
                       seed: int = DEFAULT_SEED) -> Verdict:
    """Second-order admissibility of a 1-flat jet (identity linear part)."""
    if not F.has_identity_linear_part():
        raise PreconditionError("wrong linear part: dF_0 must be the identity")
    n = F.n
    bad = _lower_shape_terms(F)
    if bad:
        return Verdict.violated("jet has terms of weight <= 3 that admissible germs lack", witness=bad,
                                certificate="shape")
    ib, ordf, ord2 = ord_forms(F, phi4, phi4p)
    cert = {"im_beta": str(ib), "ord_form": str(ordf), "ord2_form": str(ord2)}
    if ib < 0:
        return Verdict.violated("Im F^w_{0,2}(1) < 0", witness={"im_beta": str(ib)}, **cert)
    v1 = nonneg_check_bihom(ordf, n, samples, seed)
    if v1.is_violated:
        return Verdict.violated("discriminant inequality fails", witness=v1.witness, **cert)
    v2 = nonneg_check_bihom(ord2, n, samples, seed)
    if v2.is_violated:
        return Verdict.violated("phi4 - phi4' - 2||z||^2 Im h is negative somewhere", witness=v2.witness, **cert)
    if v1.is_undetermined or v2.is_undetermined:
        return Verdict.undetermined("no certificate for one of the second-order inequalities", **cert)
    strict = v1.strict and v2.strict and ib > 0
    return Verdict.holds("second-order inequalities hold" + (" strictly" if strict else ""), strict=strict,
                         **cert)


# ---------------------------------------------------------------------------
# 2-flat identities


def ab_forms(F: JetMap, H: HypersurfaceModel, Hp: HypersurfaceModel):
    """(A, B, C) as (3,3) forms in z."""
    n = F.n
    r = WPoly.norm2(n)
    r2 = r * r
    r3 = r2 * r
    g = _inner_z(n, F.Fz_at1(1, 2))
    f11 = _norm2_holo(n, F.Fz_at1(1, 1))
    b3 = _re_im(F.w_power_coeff(3))[0]
    p6 = H.get(6)
    q6 = Hp.get(6)
    d221 = p6.bidegree_part(2, 2, 1).at_u(1) - q6.bidegree_part(2, 2, 1).at_u(1)
    d330 = p6.bidegree_part(3, 3, 0) - q6.bidegree_part(3, 3, 0)
    A = (r2 * g.imag_part()).scale(-4) + r * d221
    B = r3.scale(3 * b3) - (r2 * g.real_part()).scale(2) - r2 * f11
    C = r3.scale(-b3) + (r2 * g.real_part()).scale(2) - r2 * f11 + d330
    return A, B, C


def check_lemma_2flat(F: JetMap, H: HypersurfaceModel, Hp: HypersurfaceModel,
                      samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> Verdict:
    """Identities and inequalities forced on a map with dF_0 = id and Im<z, F^z_{1,1}(z,1)> = 0."""
    n = F.n
    if not F.has_identity_linear_part():
        raise PreconditionError("dF_0 must be the identity")
    beta, h = second_order_data(F)
    if not _zero_poly(h.imag_part()):
        raise PreconditionError("Im<z, F^z_{1,1}(z,1)> is not identically zero")
    if F.K < 6:
        raise PreconditionError("jet must be stored through weight 6")
    failures = []
    rb, ib = _re_im(beta)
    rb3, ib3 = _re_im(F.w_power_coeff(3))
    if not _sc_is_zero(ib):
        failures.append("Im F^w_{0,2}(1) != 0")
    if not _sc_is_zero(ib3):
        failures.append("Im F^w_{0,3}(1) != 0")
    if not _zero_poly(WPoly.norm2(n).scale(rb) - h.real_part()):
        failures.append("||z||^2 Re F^w_{0,2}(1) != Re<z, F^z_{1,1}(z,1)>")
    for name, p in (("F^w_{5,0}", F.Fw(5, 0)), ("F^w_{3,1}", F.Fw(3, 1))):
        if not _zero_poly(p):
            failures.append(f"{name} != 0")
    if any(not _zero_poly(p) for p in F.Fz(4, 0)):
        failures.append("F^z_{4,0} != 0")
    for mu in (4, 5):
        if not _zero_poly(H.get(mu) - Hp.get(mu)):
            failures.append(f"phi_{mu} != phi'_{mu}")
    if failures:
        return Verdict.violated("; ".join(failures), witness=failures, certificate="identities")
    A, B, C = ab_forms(F, H, Hp)
    z, _ = complex_sphere(n, samples, seed)
    zero_u = np.zeros(z.shape[0])
    a = A.to_float().numeric()(z, zero_u).real
    b = B.to_float().numeric()(z, zero_u).real
    c = C.to_float().numeric()(z, zero_u).real
    tol = 1e-12
    mins = {"B": float(b.min()), "C": float(c.min()), "BC-A^2": float((b * c - a * a).min()),
            "4BC-A^2": float((4 * b * c - a * a).min())}
    cert = dict(samples=samples, seed=seed, minima=mins, A=str(A), B=str(B), C=str(C))
    for key in ("B", "C", "BC-A^2"):
        if mins[key] < -tol:
            i = int(np.argmin({"B": b, "C": c, "BC-A^2": b * c - a * a}[key]))
            return Verdict.violated(f"{key} < 0 at a sampled point", witness={"z": z[i].tolist()}, **cert)
    return Verdict.holds("identities hold; B, C >= 0 and BC >= A^2 on the sample", **cert)


# ---------------------------------------------------------------------------
# equivalent conditions for 2-flatness


@dataclass
class Flat2Report:
    flat2: bool
    tangent4: bool
    im_zero: bool
    details: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.flat2 == self.tangent4 == self.im_zero

    def as_tuple(self):
        return self.flat2, self.tangent4, self.im_zero


def _is_secf_shape(F: JetMap) -> dict:
    bad = {}
    for name, p in (("F^w_{2,0}", F.Fw(2, 0)), ("F^w_{1,1}", F.Fw(1, 1))):
        if not _zero_poly(p):
            bad[name] = str(p)
    if any(not _zero_poly(p) for p in F.Fz(2, 0)):
        bad["F^z_{2,0}"] = [str(p) for p in F.Fz(2, 0)]
    return bad


def check_flat2_conditions(F: JetMap, H: HypersurfaceModel, Hp: HypersurfaceModel) -> Flat2Report:
    """Evaluate 2-flatness, tangency through weight 4 and Im<z, F^z_{1,1}(z,1)> = 0."""
    n = F.n
    if not F.has_identity_linear_part():
        raise PreconditionError("shape violation: dF_0 must be the identity")
    bad = _is_secf_shape(F)
    if bad:
        raise PreconditionError(f"shape violation: second-order terms outside the admissible form: {bad}")
    if F.K < 4 or H.K < 4 or Hp.K < 4:
        raise PreconditionError("map and models must be stored through weight 4")
    beta, h = second_order_data(F)
    im_zero = _zero_poly(h.imag_part())
    rep = expand_basic(H, Hp, F, 4)
    tangent4 = rep.tangency_order >= 4
    # (1): compose with g_r, renormalize the target, test dF = id and no second-order terms
    rb, _ = _re_im(beta)
    K = min(F.K, Hp.K, 6)
    gr = parabolic_automorphism(n, rb if not _is_float(rb) else float(rb), K)  # g_{-r} with r = -Re beta
    g_inv_change = jet_as_change(gr)
    gf = parabolic_automorphism(n, -rb if not _is_float(rb) else -float(rb), K).compose(F.truncate(K), K)
    moved = apply_change(Hp.truncate(K), g_inv_change, K)
    _, ch = cm_normalize(moved, K)
    # F~ = ch^{-1} o g_r o F; ch = id + h-terms, so its inverse has second-order part -(ch)_2
    ch_jet = JetMap(n, K, ch.zmap(), ch.wmap())
    second = gf.degree_part(2) - ch_jet.degree_part(2)
    gauge = ch.g.coefficient_at_w_power(2)
    flat2 = gf.has_identity_linear_part() and all(_zero_poly(p) for p in second.fz) and _zero_poly(second.fw)
    details = {"r": str(-rb), "second_order_after_reduction": str(second),
               "gauge_re_h_w02": str(gauge if gauge else 0), "tangency_order": rep.tangency_order}
    return Flat2Report(flat2, tangent4, im_zero, details)


# ---------------------------------------------------------------------------
# constructors


def _l1(p: WPoly):
    """Rational upper bound for sup |p| on the unit sphere (sum of |Re c| + |Im c|)."""
    total = mpq(0)
    for _, c in p.items():
        if _is_float(c):
            return float(sum(abs(complex(x)) for _, x in p.items()))
        total += abs(c.re) + abs(c.im)
    return total


def _weighted_sphere_points(n: int, samples: int, seed: int):
    pts = sphere(2 * n + 1, samples, seed)
    z, u = split_complex(pts, n)
    s = (np.sum(np.abs(z) ** 2, axis=1) ** 2 + u ** 2) ** (-0.25)
    return z * s[:, None], u * s * s


def _restrict_vars(p: WPoly, keep: Sequence[int]) -> WPoly:
    """Set z_j = 0 for j not in ``keep`` and re-index to len(keep) variables."""
    keep = list(keep)
    m = len(keep)
    terms = {}
    for mono, c in p.items():
        if any((mono.kz[j] or mono.kzb[j]) for j in range(p.n) if j not in keep):
            continue
        terms[(tuple(mono.kz[j] for j in keep), tuple(mono.kzb[j] for j in keep), mono.ku)] = c
    return WPoly(m, terms)


def _normalized(H: HypersurfaceModel, K: int):
    chk = normal_space_check(H.phi, K, exact=H.backend != FLOAT)
    if chk.is_holds:
        return H, False
    N, _ = cm_normalize(H.truncate(K), K)
    return N, True


def construct_2flat_germ(H: HypersurfaceModel, Hp: HypersurfaceModel, samples: int = DEFAULT_SAMPLES,
                         seed: int = DEFAULT_SEED) -> JetMap:
    """F = id + (l1 w^2 z, l2 w^3 + i l3 w^4) for models whose normal forms agree through weight 5."""
    if H.n != Hp.n:
        raise ValueError("dimension mismatch")
    n = H.n
    if H.K < 6 or Hp.K < 6:
        raise PreconditionError("both models must be stored through weight 6")
    Hn, c1 = _normalized(H, 6)
    Hpn, c2 = _normalized(Hp, 6)
    if not Hn.same_through(Hpn, 5):
        v = weighted_equivalence(Hn, Hpn, 5, seed=seed)
        raise PreconditionError("normal forms do not agree through weight 5 "
                                f"(weighted equivalence: {v.summary()})")
    psi = Hpn.get(6) - Hn.get(6)
    psi22 = psi.u_coefficient(1)
    psi33 = psi.u_coefficient(0)
    if psi.u_degree() > 1:
        raise PreconditionError("weight-6 discrepancy has a u^2 term (models not normalized at weight 6)")
    b22 = _l1(psi22)
    c33 = _l1(psi33)
    # lambda >= b22 + c33 + 1 makes both the discriminant and B C >= A^2 strict
    lam = b22 + c33 + 1
    lam3 = mpq(1)
    if H.backend == FLOAT or Hp.backend == FLOAT:
        lam, lam3 = float(lam), 1.0
    K = 8
    w = HoloPoly.w(n)
    w2, w3, w4 = w * w, w * w * w, w * w * w * w
    fz = [HoloPoly.z(n, j) + (w2 * HoloPoly.z(n, j)).scale(lam) for j in range(n)]
    fw = w + w3.scale(lam) + w4.scale(GaussQ(0, lam3) if not _is_float(lam3) else 1j * lam3)
    F = JetMap(n, K, fz, fw, params={"lambda1": str(lam), "lambda2": str(lam), "lambda3": str(lam3),
                                     "C22": str(2 * b22), "C33": str(c33), "normalized_source": c1,
                                     "normalized_target": c2})
    cert = certify_2flat(F, Hn, Hpn, samples, seed)
    F.params["certificate"] = cert
    F.params["models"] = (Hn, Hpn)
    return F


def certify_2flat(F: JetMap, H: HypersurfaceModel, Hp: HypersurfaceModel, samples: int = DEFAULT_SAMPLES,
                  seed: int = DEFAULT_SEED) -> dict:
    n = F.n
    rep = expand_basic(H, Hp, F, 8, allow_truncated_models=True, samples=samples, seed=seed)
    if rep.tangency_order < 5:
        raise InternalError(f"2-flat germ is tangent only through weight {rep.tangency_order}")
    e6, e7, e8 = rep.component(6), rep.component(7), rep.component(8)
    z, u = _weighted_sphere_points(n, samples, seed)
    f6, f7, f8 = (e.to_float().numeric()(z, u).real for e in (e6, e7, e8))
    r = np.sum(np.abs(z) ** 2, axis=1)
    profile6 = r ** 3 + u ** 2 * r
    m6 = float(np.min(f6 / profile6))
    if m6 <= MARGIN:
        raise InternalError(f"weight-6 component has margin {m6:.3g} on the weighted sphere")
    # tail: e6 + d e7 + d^2 e8 > 0 for d on a dyadic grid, relative to the profile
    lam3 = e8.coeff(((0,) * n, (0,) * n, 4))
    if _sc_is_zero(lam3) or _re_im(lam3)[0] <= 0:
        raise InternalError("no positive u^4 term at weight 8")
    delta0 = None
    d = 1.0
    for _ in range(12):
        vals = (f6 + d * f7 + d * d * f8) / (profile6 + d * d * u ** 4)
        if float(vals.min()) > MARGIN:
            delta0 = d
            break
        d /= 2
    if delta0 is None:
        raise InternalError("no scale with a positive weight 6..8 tail on the sample")
    grid_min = min(float(((f6 + dd * f7 + dd * dd * f8) / (profile6 + dd * dd * u ** 4)).min())
                   for dd in delta0 * 2.0 ** -np.arange(0, 8))
    if grid_min <= MARGIN:
        raise InternalError("tail positivity fails below the chosen scale")
    return {"tangency_order": rep.tangency_order, "margin_weight6": m6, "delta0": delta0,
            "tail_margin": grid_min, "u4_coefficient": str(lam3), "samples": samples, "seed": seed,
            "models_truncated_at": rep.notes.get("models_truncated_at")}


def construct_first_order_germ(alpha: Sequence, H: HypersurfaceModel, Hp: HypersurfaceModel,
                               samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED) -> JetMap:
    """A jet with differential diag(alpha, 1) whose basic expression is positive near 0."""
    n = len(alpha)
    if H.n != n or Hp.n != n:
        raise ValueError("dimension mismatch")
    al = [_scalar(a) for a in alpha]
    is_float = any(_is_float(a) for a in al)
    vals = [float(complex(a).real) for a in al]
    if any(not _sc_is_zero(complex(a).imag) for a in al):
        raise ValueError("alpha must be real")
    if any(v < 0 or v > 1 for v in vals) or any(vals[i] < vals[i + 1] for i in range(n - 1)):
        raise ValueError("alpha must satisfy 1 >= alpha_1 >= ... >= alpha_n >= 0")
    one = [i for i in range(n) if (vals[i] == 1.0 if is_float else al[i] == 1)]
    l = len(one)
    if l == n and H.K >= 6 and Hp.K >= 6:
        Hn, _ = _normalized(H, 6)
        Hpn, _ = _normalized(Hp, 6)
        if Hn.same_through(Hpn, 5):
            F = construct_2flat_germ(H, Hp, samples, seed)
            F.params["construction"] = "2-flat"
            return F
    if H.K < 4 or Hp.K < 4:
        raise PreconditionError("models must be stored through weight 4")
    K = 4
    w = HoloPoly.w(n)
    s = 1.0 if is_float else mpq(1)
    c = 0
    if l:
        d4 = _restrict_vars(H.get(4) - Hp.get(4), one)
        C4 = _l1(d4)
        c = (C4 + 2) / 2
        if is_float:
            c = float(c)
    iu = 1j if is_float else I
    fz = []
    for j in range(n):
        zj = HoloPoly.z(n, j)
        if j < l:
            fz.append(zj + (zj * w).scale(iu * c))
        else:
            fz.append(zj.scale(al[j]))
    fw = w + (w * w).scale(iu * s)
    F = JetMap(n, K, fz, fw, params={"construction": "block", "block": l, "c": str(c), "s": str(s)})
    F.params["certificate"] = certify_first_order(F, H, Hp, l, samples, seed)
    return F


def certify_first_order(F: JetMap, H, Hp, l: int, samples: int = DEFAULT_SAMPLES,
                        seed: int = DEFAULT_SEED) -> dict:
    n = F.n
    rep = expand_basic(H.truncate(4), Hp.truncate(4), F, 4, samples=samples, seed=seed)
    order, sign = classify_contact(rep)
    if sign.is_violated:
        raise PreconditionError(f"no strict margin: weight-{order + 1} component is negative somewhere")
    if l == n:
        e4 = rep.component(4)
        z, u = _weighted_sphere_points(n, samples, seed)
        m = float(np.min(e4.to_float().numeric()(z, u).real))
        if rep.tangency_order != 3 or m <= MARGIN:
            raise PreconditionError("no strict margin at weight 4")
        return {"lowest_weight": 4, "margin": m, "sign": sign.summary()}
    # the weight-2 part vanishes exactly on z'' = 0; there the weight-4 part must be strictly positive
    e2 = rep.component(2)
    if rep.tangency_order != 1 or sign.is_undetermined:
        raise PreconditionError("no strict margin: weight-2 component is not certified")
    block = list(range(l))
    if l:
        e4r = _restrict_vars(rep.component(4), block)
        e3r = _restrict_vars(rep.component(3), block)
        if not _zero_poly(e3r):
            raise PreconditionError("no strict margin: odd term on the degenerate block")
        z, u = _weighted_sphere_points(l, samples, seed)
        m = float(np.min(e4r.to_float().numeric()(z, u).real))
    else:
        e4r = rep.component(4)
        c = e4r.coeff(((0,) * n, (0,) * n, 2))
        m = float(_re_im(c)[0]) if c else 0.0
        if any(_restrict_vars(rep.component(k), []) for k in (2, 3)):
            raise PreconditionError("no strict margin on z = 0")
    if m <= MARGIN:
        raise PreconditionError(f"no strict margin on the degenerate block (min {m:.3g})")
    return {"lowest_weight": 2, "weight2": str(e2), "block_margin": m, "sign": sign.summary()}
