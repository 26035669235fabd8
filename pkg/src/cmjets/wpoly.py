"""Sparse weight-graded polynomials in (z, zbar, u) and holomorphic (z, w).

Weights: z_j and zbar_j carry weight 1, u = Re w and w carry weight 2.
Monomials are packed into a single integer whose top bits hold the weight,
followed by one byte per exponent.  Adding two keys multiplies the monomials,
and sorting keys gives the canonical order (weight, kz, kzb, ku).
"""
from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import NamedTuple, Sequence

import numpy as np
from gmpy2 import mpq

from .scalars import GaussQ, I, FLOAT, RATIONAL, to_backend

_BITS = 8
_MASK = (1 << _BITS) - 1


class Monomial(NamedTuple):
    kz: tuple
    kzb: tuple
    ku: int = 0

    @property
    def weight(self) -> int:
        return sum(self.kz) + sum(self.kzb) + 2 * self.ku

    def conjugate(self) -> "Monomial":
        return Monomial(self.kzb, self.kz, self.ku)

    @property
    def bidegree(self) -> tuple:
        return sum(self.kz), sum(self.kzb), self.ku


class HoloMonomial(NamedTuple):
    kz: tuple
    kw: int = 0

    @property
    def weight(self) -> int:
        return sum(self.kz) + 2 * self.kw


@lru_cache(maxsize=None)
def _layout(nfields: int):
    top = _BITS * nfields
    shifts = tuple(_BITS * (nfields - 1 - i) for i in range(nfields))
    return top, shifts


def _pack(exps: Sequence[int], weights: Sequence[int]) -> int:
    top, shifts = _layout(len(exps))
    key = 0
    wt = 0
    for e, s, w in zip(exps, shifts, weights):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << s
        wt += w * e
    return key | (wt << top)


def _unpack(key: int, nfields: int) -> tuple:
    _, shifts = _layout(nfields)
    return tuple((key >> s) & _MASK for s in shifts)


def _is_backend_float(terms: dict) -> bool:
    for c in terms.values():
        return isinstance(c, complex)
    return False


def _mul_terms(a_bw: dict, b_bw: dict, maxw) -> dict:
    """Multiply two weight-bucketed term maps, dropping weights above ``maxw``."""
    if not a_bw or not b_bw:
        return {}
    sample = next(iter(next(iter(a_bw.values()))))[1]
    sample_b = next(iter(next(iter(b_bw.values()))))[1]
    if isinstance(sample, complex) or isinstance(sample_b, complex):
        acc: dict = {}
        get = acc.get
        for w1, terms1 in a_bw.items():
            for w2, terms2 in b_bw.items():
                if maxw is not None and w1 + w2 > maxw:
                    continue
                for k1, c1 in terms1:
                    c1 = complex(c1)
                    for k2, c2 in terms2:
                        k = k1 + k2
                        acc[k] = get(k, 0j) + c1 * c2
        return {k: c for k, c in acc.items() if c != 0}
    # exact path: integer pairs over a common denominator
    ia, da = _int_pairs(a_bw)
    ib, db = _int_pairs(b_bw)
    re: dict = {}
    im: dict = {}
    rget = re.get
    iget = im.get
    for w1, terms1 in ia.items():
        for w2, terms2 in ib.items():
            if maxw is not None and w1 + w2 > maxw:
                continue
            for k1, a, b in terms1:
                for k2, c, d in terms2:
                    k = k1 + k2
                    re[k] = rget(k, 0) + (a * c - b * d)
                    im[k] = iget(k, 0) + (a * d + b * c)
    den = da * db
    out = {}
    for k, r in re.items():
        i = im[k]
        if r or i:
            out[k] = GaussQ(mpq(r, den), mpq(i, den))
    return out


def _int_pairs(bw: dict):
    den = 1
    for terms in bw.values():
        for _, c in terms:
            for q in (c.re, c.im):
                d = int(q.denominator)
                if d != 1:
                    den = den * d // gcd(den, d)
    out = {}
    for w, terms in bw.items():
        lst = []
        for k, c in terms:
            lst.append((k, int(c.re * den), int(c.im * den)))
        out[w] = lst
    return out, den


class _Graded:
    """Shared machinery for packed, weight-graded sparse polynomials."""

    __slots__ = ("n", "_t", "_bw")

    def __init__(self, n: int, terms=None):
        self.n = n
        self._bw = None
        t = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for m, c in items:
                key = m if isinstance(m, int) else self._key(m)
                if isinstance(c, (complex, float)):
                    c = complex(c)
                else:
                    c = GaussQ.coerce(c)
                c = t.get(key, 0) + c if key in t else c
                t[key] = c
        if any(isinstance(c, complex) for c in t.values()):
            t = {k: complex(c) for k, c in t.items()}
        self._t = {k: c for k, c in t.items() if c != 0}

    # subclass hooks -------------------------------------------------------
    @classmethod
    def _nfields(cls, n: int) -> int:
        raise NotImplementedError

    @classmethod
    def _field_weights(cls, n: int) -> tuple:
        raise NotImplementedError

    def _key(self, m) -> int:
        raise NotImplementedError

    def _mono(self, key: int):
        raise NotImplementedError

    # construction helpers ------------------------------------------------
    @classmethod
    def _raw(cls, n: int, t: dict):
        obj = cls.__new__(cls)
        obj.n = n
        obj._t = t
        obj._bw = None
        return obj

    @classmethod
    def zero(cls, n: int):
        return cls._raw(n, {})

    def _same(self, t: dict):
        return type(self)._raw(self.n, t)

    # basic queries -------------------------------------------------------
    def weight_of_key(self, key: int) -> int:
        return key >> _layout(self._nfields(self.n))[0]

    def by_weight(self) -> dict:
        if self._bw is None:
            top = _layout(self._nfields(self.n))[0]
            bw: dict = {}
            for k, c in self._t.items():
                bw.setdefault(k >> top, []).append((k, c))
            self._bw = bw
        return self._bw

    def items(self):
        for k in sorted(self._t):
            yield self._mono(k), self._t[k]

    def keys(self):
        return [self._mono(k) for k in sorted(self._t)]

    def coeff(self, m):
        return self._t.get(self._key(m), 0)

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    @property
    def backend(self) -> str:
        return FLOAT if _is_backend_float(self._t) else RATIONAL

    def weights(self) -> list:
        return sorted(self.by_weight())

    def min_weight(self):
        return min(self.by_weight()) if self._t else None

    def max_weight(self):
        return max(self.by_weight()) if self._t else None

    def is_homogeneous(self, weight=None) -> bool:
        ws = self.weights()
        if not ws:
            return True
        return len(ws) == 1 and (weight is None or ws[0] == weight)

    # arithmetic --------------------------------------------------------------
    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, _Graded):
            return self + self.constant(self.n, other)
        self._check(other)
        if self._t and other._t:
            fa, fb = _is_backend_float(self._t), _is_backend_float(other._t)
            if fa != fb:
                return self.to_float() + other.to_float()
        t = dict(self._t)
        for k, c in other._t.items():
            v = t.get(k)
            v = c if v is None else v + c
            if v == 0:
                t.pop(k, None)
            else:
                t[k] = v
        return self._same(t)

    __radd__ = __add__

    def __neg__(self):
        return self._same({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        if isinstance(s, (complex, float)):
            s = complex(s)
        else:
            s = GaussQ.coerce(s)
        if s == 0:
            return self._same({})
        return self._same({k: c * s for k, c in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, _Graded):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def mul(self, other, max_weight=None):
        self._check(other)
        if self._t and other._t and _is_backend_float(self._t) != _is_backend_float(other._t):
            return self.to_float().mul(other.to_float(), max_weight)
        return self._same(_mul_terms(self.by_weight(), other.by_weight(), max_weight))

    def pow(self, k: int, max_weight=None):
        out = self.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out.mul(base, max_weight)
            k >>= 1
            if k:
                base = base.mul(base, max_weight)
        return out

    def __pow__(self, k: int):
        return self.pow(k)

    def truncate(self, max_weight: int):
        top = _layout(self._nfields(self.n))[0]
        return self._same({k: c for k, c in self._t.items() if (k >> top) <= max_weight})

    def part(self, weight: int):
        return self._same({k: c for k, c in self.by_weight().get(weight, [])})

    def weight_decompose(self) -> list:
        return [(w, self._same(dict(ts))) for w, ts in sorted(self.by_weight().items())]

    def map_coeffs(self, fn):
        return self._same({k: v for k, v in ((k, fn(c)) for k, c in self._t.items()) if v != 0})

    def to_backend(self, backend: str):
        return self.map_coeffs(lambda c: to_backend(c, backend))

    def to_float(self):
        return self.to_backend(FLOAT)

    def prune(self, tol: float = 0.0):
        """Drop coefficients with modulus at most ``tol`` (float backend)."""
        return self._same({k: c for k, c in self._t.items() if abs(complex(c)) > tol})

    def norm1(self) -> float:
        return sum(abs(complex(c)) for c in self._t.values())

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self._t.values()), default=0.0)

    def __eq__(self, other):
        if isinstance(other, _Graded):
            if type(other) is not type(self) or other.n != self.n:
                return False
            return self._t == other._t
        if other == 0:
            return not self._t
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.n, frozenset(self._t.items())))

    @classmethod
    def constant(cls, n: int, c):
        if isinstance(c, (complex, float)):
            c = complex(c)
        else:
            c = GaussQ.coerce(c)
        return cls._raw(n, {0: c} if c != 0 else {})

    def constant_term(self):
        return self._t.get(0, 0)


def _fmt_coeff(c) -> str:
    if isinstance(c, complex):
        if c.imag == 0:
            return f"{c.real:.6g}"
        return f"({c.real:.6g}{c.imag:+.6g}i)"
    return str(c)


class WPoly(_Graded):
    """Polynomial in z_1..z_n, zbar_1..zbar_n and real u with complex coefficients."""

    __slots__ = ()

    @classmethod
    def _nfields(cls, n):
        return 2 * n + 1

    @classmethod
    def _field_weights(cls, n):
        return _wpoly_weights(n)

    def _key(self, m) -> int:
        kz, kzb, ku = m if not isinstance(m, Monomial) else (m.kz, m.kzb, m.ku)
        if len(kz) != self.n or len(kzb) != self.n:
            raise ValueError(f"monomial {m} does not match n={self.n}")
        return _pack(tuple(kz) + tuple(kzb) + (ku,), _wpoly_weights(self.n))

    def _mono(self, key: int) -> Monomial:
        return _wmono(key, self.n)

    # named constructors ------------------------------------------------------
    @classmethod
    def monomial(cls, n: int, kz, kzb=None, ku: int = 0, c=1):
        kzb = kzb if kzb is not None else (0,) * n
        p = cls._raw(n, {})
        return cls(n, {p._key((tuple(kz), tuple(kzb), ku)): c})

    @classmethod
    def z(cls, n: int, j: int):
        e = [0] * n
        e[j] = 1
        return cls.monomial(n, e)

    @classmethod
    def zbar(cls, n: int, j: int):
        e = [0] * n
        e[j] = 1
        return cls.monomial(n, (0,) * n, e)

    @classmethod
    def u(cls, n: int):
        return cls.monomial(n, (0,) * n, (0,) * n, 1)

    @classmethod
    def norm2(cls, n: int):
        """The Levi form ||z||^2 = sum_j z_j zbar_j."""
        terms = {}
        for j in range(n):
            e = [0] * n
            e[j] = 1
            terms[(tuple(e), tuple(e), 0)] = 1
        return cls(n, terms)

    @classmethod
    def from_holomorphic(cls, h: "HoloPoly"):
        """Embed a w-free holomorphic polynomial."""
        t = {}
        for m, c in h.items():
            if m.kw:
                raise ValueError("holomorphic polynomial depends on w; substitute w first")
            t[(m.kz, (0,) * h.n, 0)] = c
        return cls(h.n, t)

    # structure -----------------------------------------------------------
    def conjugate(self) -> "WPoly":
        n = self.n
        return self._same({_conj_key(k, n): c.conjugate() for k, c in self._t.items()})

    def is_real(self) -> bool:
        n = self.n
        for k, c in self._t.items():
            other = self._t.get(_conj_key(k, n))
            if other is None or other.conjugate() != c:
                return False
        return True

    def is_real_approx(self, tol: float = 1e-9) -> bool:
        return (self - self.conjugate()).max_abs() <= tol

    def real_part(self) -> "WPoly":
        """(p + conj p)/2, the real part as a real-valued polynomial."""
        half = 0.5 if self.backend == FLOAT else GaussQ(mpq(1, 2))
        return (self + self.conjugate()).scale(half)

    def imag_part(self) -> "WPoly":
        """(p - conj p)/(2i)."""
        f = -0.5j if self.backend == FLOAT else GaussQ(0, mpq(-1, 2))
        return (self - self.conjugate()).scale(f)

    def bidegree_decompose(self) -> list:
        parts: dict = {}
        for k, c in self._t.items():
            m = self._mono(k)
            parts.setdefault(m.bidegree, {})[k] = c
        return [(j, kk, l, self._same(t)) for (j, kk, l), t in sorted(parts.items())]

    def bidegree_part(self, j: int, k: int, l: int = 0) -> "WPoly":
        t = {}
        for key, c in self._t.items():
            if self._mono(key).bidegree == (j, k, l):
                t[key] = c
        return self._same(t)

    def u_coefficient(self, l: int) -> "WPoly":
        """Coefficient of u^l, as a u-free polynomial."""
        t = {}
        for key, c in self._t.items():
            m = self._mono(key)
            if m.ku == l:
                t[self._key((m.kz, m.kzb, 0))] = c
        return self._same(t)

    def u_degree(self) -> int:
        return max((self._mono(k).ku for k in self._t), default=0)

    def at_u(self, value) -> "WPoly":
        """Substitute the number ``value`` for u."""
        out: dict = {}
        for key, c in self._t.items():
            m = self._mono(key)
            k0 = self._key((m.kz, m.kzb, 0))
            v = c * (value ** m.ku) if m.ku else c
            out[k0] = out[k0] + v if k0 in out else v
        return self._same({k: c for k, c in out.items() if c != 0})

    def evaluate(self, z: Sequence, u=0):
        """Evaluate at a point; exact if the inputs are exact."""
        zb = [x.conjugate() for x in z]
        total = 0
        for m, c in self.items():
            v = c
            for j, e in enumerate(m.kz):
                if e:
                    v = v * z[j] ** e
            for j, e in enumerate(m.kzb):
                if e:
                    v = v * zb[j] ** e
            if m.ku:
                v = v * u ** m.ku
            total = total + v
        return total

    def numeric(self):
        """Return a vectorized evaluator ``f(Z, U) -> complex array``.

        ``Z`` has shape (N, n) (complex) and ``U`` shape (N,) (real).
        """
        mons = list(self.items())
        n = self.n
        if not mons:
            return lambda Z, U: np.zeros(len(U), dtype=complex)
        KZ = np.array([m.kz for m, _ in mons], dtype=int).reshape(len(mons), n)
        KB = np.array([m.kzb for m, _ in mons], dtype=int).reshape(len(mons), n)
        KU = np.array([m.ku for m, _ in mons], dtype=int)
        C = np.array([complex(c) for _, c in mons])
        maxe = max(int(KZ.max(initial=0)), int(KB.max(initial=0)), int(KU.max(initial=0)))

        def f(Z, U):
            Z = np.asarray(Z, dtype=complex).reshape(-1, n)
            U = np.asarray(U, dtype=float).reshape(-1)
            N = Z.shape[0]
            vals = np.broadcast_to(C, (N, len(C))).copy()
            for j in range(n):
                zp = np.ones((N, maxe + 1), dtype=complex)
                for e in range(1, maxe + 1):
                    zp[:, e] = zp[:, e - 1] * Z[:, j]
                vals *= zp[:, KZ[:, j]]
                vals *= np.conj(zp[:, KB[:, j]])
            up = np.ones((N, maxe + 1))
            for e in range(1, maxe + 1):
                up[:, e] = up[:, e - 1] * U
            vals *= up[:, KU]
            return vals.sum(axis=1)

        return f

    def __repr__(self):
        return f"WPoly(n={self.n}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for m, c in self.items():
            factors = []
            for j, e in enumerate(m.kz):
                if e:
                    factors.append(f"z{j + 1}" + (f"^{e}" if e > 1 else ""))
            for j, e in enumerate(m.kzb):
                if e:
                    factors.append(f"zb{j + 1}" + (f"^{e}" if e > 1 else ""))
            if m.ku:
                factors.append("u" + (f"^{m.ku}" if m.ku > 1 else ""))
            parts.append(_fmt_coeff(c) + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)


class HoloPoly(_Graded):
    """Holomorphic polynomial in z_1..z_n and w (w has weight 2)."""

    __slots__ = ()

    @classmethod
    def _nfields(cls, n):
        return n + 1

    @classmethod
    def _field_weights(cls, n):
        return (1,) * n + (2,)

    def _key(self, m) -> int:
        kz, kw = m if not isinstance(m, HoloMonomial) else (m.kz, m.kw)
        if len(kz) != self.n:
            raise ValueError(f"monomial {m} does not match n={self.n}")
        return _pack(tuple(kz) + (kw,), (1,) * self.n + (2,))

    def _mono(self, key: int) -> HoloMonomial:
        return _hmono(key, self.n)

    @classmethod
    def monomial(cls, n: int, kz, kw: int = 0, c=1):
        p = cls._raw(n, {})
        return cls(n, {p._key((tuple(kz), kw)): c})

    @classmethod
    def z(cls, n: int, j: int):
        e = [0] * n
        e[j] = 1
        return cls.monomial(n, e)

    @classmethod
    def w(cls, n: int):
        return cls.monomial(n, (0,) * n, 1)

    def component(self, l: int, k: int) -> "HoloPoly":
        """The part of z-degree ``l`` times w^k."""
        t = {}
        for key, c in self._t.items():
            m = self._mono(key)
            if sum(m.kz) == l and m.kw == k:
                t[key] = c
        return self._same(t)

    def degree_part(self, d: int) -> "HoloPoly":
        """Ordinary homogeneous part of total degree ``d`` in (z, w)."""
        t = {}
        for key, c in self._t.items():
            m = self._mono(key)
            if sum(m.kz) + m.kw == d:
                t[key] = c
        return self._same(t)

    def at_w(self, value) -> "HoloPoly":
        out: dict = {}
        for key, c in self._t.items():
            m = self._mono(key)
            k0 = self._key((m.kz, 0))
            v = c * (value ** m.kw) if m.kw else c
            out[k0] = out[k0] + v if k0 in out else v
        return self._same({k: c for k, c in out.items() if c != 0})

    def coefficient_at_w_power(self, k: int):
        """Coefficient of the pure monomial w^k."""
        return self.coeff(((0,) * self.n, k))

    def evaluate(self, z: Sequence, w):
        total = 0
        for m, c in self.items():
            v = c
            for j, e in enumerate(m.kz):
                if e:
                    v = v * z[j] ** e
            if m.kw:
                v = v * w ** m.kw
            total = total + v
        return total

    def to_wpoly(self, w_param: "WPoly" = None, max_weight=None) -> WPoly:
        """Substitute ``w := w_param`` (a WPoly) and return a WPoly."""
        if w_param is None:
            return WPoly.from_holomorphic(self)
        return compose_holo(self, w_param, max_weight)

    def __repr__(self):
        return f"HoloPoly(n={self.n}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for m, c in self.items():
            factors = []
            for j, e in enumerate(m.kz):
                if e:
                    factors.append(f"z{j + 1}" + (f"^{e}" if e > 1 else ""))
            if m.kw:
                factors.append("w" + (f"^{m.kw}" if m.kw > 1 else ""))
            parts.append(_fmt_coeff(c) + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _wpoly_weights(n: int) -> tuple:
    return (1,) * (2 * n) + (2,)


@lru_cache(maxsize=200000)
def _wmono(key: int, n: int) -> Monomial:
    e = _unpack(key, 2 * n + 1)
    return Monomial(e[:n], e[n:2 * n], e[2 * n])


@lru_cache(maxsize=200000)
def _hmono(key: int, n: int) -> HoloMonomial:
    e = _unpack(key, n + 1)
    return HoloMonomial(e[:n], e[n])


@lru_cache(maxsize=200000)
def _conj_key(key: int, n: int) -> int:
    nf = 2 * n + 1
    top, _ = _layout(nf)
    blk = _BITS * n
    maskn = (1 << blk) - 1
    zpart = (key >> (_BITS + blk)) & maskn
    zbpart = (key >> _BITS) & maskn
    upart = key & _MASK
    wt = key >> top
    return (wt << top) | (zbpart << (_BITS + blk)) | (zpart << _BITS) | upart


# ---------------------------------------------------------------------------
# module-level operations


def _as_wpoly(x, n: int) -> WPoly:
    if isinstance(x, WPoly):
        return x
    if isinstance(x, HoloPoly):
        return WPoly.from_holomorphic(x)
    return WPoly.constant(n, x)


def hermitian_pair(a: Sequence, b: Sequence) -> WPoly:
    """<a, b> = sum_j a_j * conj(b_j).

    Entries may be numbers, w-free :class:`HoloPoly` or :class:`WPoly`.
    Numbers-only input returns a number.
    """
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    polys = [x for x in list(a) + list(b) if isinstance(x, _Graded)]
    if not polys:
        total = 0
        for x, y in zip(a, b):
            total = total + x * y.conjugate()
        return total
    n = polys[0].n
    total = WPoly.zero(n)
    for x, y in zip(a, b):
        total = total + _as_wpoly(x, n) * _as_wpoly(y, n).conjugate()
    return total


def weight_decompose(p: _Graded) -> list:
    return p.weight_decompose()


def bidegree_decompose(p: WPoly) -> list:
    return p.bidegree_decompose()


def restrict_diagonal(p: WPoly) -> dict:
    """Substitute u := t ||z||^2.

    Returns ``{l: q_l}`` with ``p(z, t||z||^2) = sum_l t^l q_l(z, zbar)``; each
    ``q_l`` is u-free.
    """
    n = p.n
    out: dict = {}
    r = WPoly.norm2(n)
    rpow = {0: WPoly.constant(n, 1)}
    for l in range(1, p.u_degree() + 1):
        rpow[l] = rpow[l - 1] * r
    for l in range(p.u_degree() + 1):
        c = p.u_coefficient(l)
        if c:
            out[l] = c * rpow[l]
    return out


class _PowerCache:
    def __init__(self, base: _Graded, max_weight):
        self.base = base
        self.max_weight = max_weight
        self.cache = {0: base.constant(base.n, 1), 1: base.truncate(max_weight) if max_weight is not None else base}

    def __call__(self, k: int):
        c = self.cache
        if k not in c:
            h = k // 2
            c[k] = self(h).mul(self(k - h), self.max_weight)
        return c[k]


def compose_holo(h: HoloPoly, W: WPoly, max_weight=None) -> WPoly:
    """h(z, W) as a WPoly, with z kept as z and w replaced by ``W``."""
    n = h.n
    if W.n != n:
        raise ValueError("dimension mismatch")
    groups: dict = {}
    for m, c in h.items():
        groups.setdefault(m.kw, {})[(m.kz, (0,) * n, 0)] = c
    powers = _PowerCache(W, max_weight)
    total = WPoly.zero(n)
    for k, t in sorted(groups.items()):
        coef = WPoly(n, t)
        total = total + coef.mul(powers(k), max_weight)
    return total


def substitute(target: WPoly, zsub: Sequence[WPoly], usub: WPoly, max_weight=None,
               zbsub: Sequence[WPoly] = None) -> WPoly:
    """target(zsub, conj(zsub), usub) truncated at ``max_weight``.

    The substitutes must only contain nonnegative weights (always true here),
    which makes truncating intermediate products safe.
    """
    n = target.n
    m_out = zsub[0].n if zsub else usub.n
    if len(zsub) != n:
        raise ValueError(f"expected {n} z-substitutes, got {len(zsub)}")
    if zbsub is None:
        zbsub = [s.conjugate() for s in zsub]
    subs = list(zsub) + list(zbsub) + [usub]
    minw = [s.min_weight() for s in subs]
    caches = [_PowerCache(s, max_weight) for s in subs]
    one = WPoly.constant(m_out, 1)
    total: dict = {}
    for m, c in target.items():
        exps = list(m.kz) + list(m.kzb) + [m.ku]
        if any(e and minw[i] is None for i, e in enumerate(exps)):
            continue
        remaining = sum(e * minw[i] for i, e in enumerate(exps) if e)
        if max_weight is not None and remaining > max_weight:
            continue
        prod = one
        for i, e in enumerate(exps):
            if not e:
                continue
            remaining -= e * minw[i]
            bound = None if max_weight is None else max_weight - remaining
            prod = prod.mul(caches[i](e), bound)
            if not prod:
                break
        if not prod:
            continue
        for k, v in prod._t.items():
            cv = v * c
            old = total.get(k)
            total[k] = cv if old is None else old + cv
    return WPoly._raw(m_out, {k: v for k, v in total.items() if v != 0})


def quadric_w(n: int, phi: WPoly = None) -> WPoly:
    """The boundary parametrization w = u + i(||z||^2 + phi)."""
    W = WPoly.u(n) + WPoly.norm2(n).scale(I)
    if phi is not None and phi:
        backend = phi.backend
        W = W + phi.scale(1j if backend == FLOAT else I)
    return W


def substitute_truncated(target: WPoly, map_z: Sequence[HoloPoly], map_w: HoloPoly, K: int,
                         w_param: WPoly = None) -> WPoly:
    """Compose ``target(F^z, conj F^z, Re F^w)`` along w := w_param.

    ``w_param`` defaults to the quadric parametrization u + i||z||^2.
    Terms of weight above ``K`` are discarded.
    """
    n = map_w.n
    if w_param is None:
        w_param = quadric_w(n)
    fz = [compose_holo(h, w_param, K) for h in map_z]
    fw = compose_holo(map_w, w_param, K)
    return substitute(target, fz, fw.real_part(), K)


def compose_holo_map(h: HoloPoly, zmap: Sequence[HoloPoly], wmap: HoloPoly, max_weight=None) -> HoloPoly:
    """h(zmap, wmap) for holomorphic maps, truncated at ``max_weight``."""
    n = h.n
    if len(zmap) != n:
        raise ValueError("dimension mismatch")
    m_out = wmap.n
    subs = list(zmap) + [wmap]
    minw = [s.min_weight() for s in subs]
    caches = [_PowerCache(s, max_weight) for s in subs]
    one = HoloPoly.constant(m_out, 1)
    total = HoloPoly.zero(m_out)
    for m, c in h.items():
        exps = list(m.kz) + [m.kw]
        if any(e and minw[i] is None for i, e in enumerate(exps)):
            continue
        remaining = sum(e * minw[i] for i, e in enumerate(exps) if e)
        if max_weight is not None and remaining > max_weight:
            continue
        prod = one
        for i, e in enumerate(exps):
            if not e:
                continue
            remaining -= e * minw[i]
            bound = None if max_weight is None else max_weight - remaining
            prod = prod.mul(caches[i](e), bound)
        total = total + prod.scale(c)
    return total


def random_real_wpoly(rng, n: int, weight: int, nterms: int = 4, den: int = 4, normal_only=False,
                      bidegrees=None) -> WPoly:
    """A random real weighted homogeneous polynomial with small rational coefficients."""
    mons = [m for m in monomials_of_weight(n, weight)
            if (not normal_only or (sum(m.kz) >= 2 and sum(m.kzb) >= 2))
            and (bidegrees is None or m.bidegree in bidegrees)]
    if not mons:
        return WPoly.zero(n)
    p = WPoly.zero(n)
    for _ in range(nterms):
        m = mons[rng.randrange(len(mons))]
        c = GaussQ(mpq(rng.randint(-3, 3), rng.randint(1, den)), mpq(rng.randint(-3, 3), rng.randint(1, den)))
        p = p + WPoly(n, {m: c})
    return (p + p.conjugate()).scale(GaussQ(mpq(1, 2)))


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> tuple:
    if parts == 0:
        return ((),) if total == 0 else ()
    out = []
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


def exponent_vectors(n: int, degree: int) -> tuple:
    """All exponent tuples of length n with the given total degree."""
    return _compositions(degree, n)


def monomials_of_weight(n: int, weight: int) -> list:
    out = []
    for l in range(weight // 2 + 1):
        d = weight - 2 * l
        for a in range(d + 1):
            for kz in exponent_vectors(n, a):
                for kzb in exponent_vectors(n, d - a):
                    out.append(Monomial(kz, kzb, l))
    return out


def holo_monomials_of_weight(n: int, weight: int) -> list:
    out = []
    for k in range(weight // 2 + 1):
        for kz in exponent_vectors(n, weight - 2 * k):
            out.append(HoloMonomial(kz, k))
    return out
