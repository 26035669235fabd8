"""Small exact linear algebra over Gaussian rationals.

Hermitian PSD testing by pivoted LDL* and minimum-norm solutions of rational
systems.  Matrices are lists of lists.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .scalars import GaussQ
from .verdict import InternalError


def _g(x) -> GaussQ:
    return GaussQ.coerce(x)


@dataclass
class LDLResult:
    psd: bool
    pd: bool
    pivots: list          # order in which indices were eliminated
    diag: list            # D entries (rational)
    witness: list = None  # vector v with v* M v < 0 when not PSD
    value: object = None  # v* M v for the witness


def hermitian_form(M, v):
    n = len(v)
    total = GaussQ(0)
    for i in range(n):
        if not v[i]:
            continue
        row = M[i]
        s = GaussQ(0)
        for j in range(n):
            if v[j] and row[j]:
                s = s + row[j] * v[j]
        total = total + v[i].conjugate() * s
    return total


def _solve_exact(A, b):
    """Solve the square nonsingular system A x = b over Gaussian rationals."""
    n = len(A)
    M = [[_g(x) for x in row] + [_g(bb)] for row, bb in zip(A, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col])
        M[col], M[piv] = M[piv], M[col]
        inv = GaussQ(1) / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def ldl_psd(M) -> LDLResult:
    """Decide positive semidefiniteness of a Hermitian Gaussian-rational matrix.

    Diagonal pivoting: eliminate any index with positive Schur-complement
    diagonal.  A negative diagonal or a zero diagonal with a nonzero
    off-diagonal entry in the remaining block refutes PSD; the refuting
    vector is lifted back to the original coordinates.
    """
    N = len(M)
    S = [[_g(x) for x in row] for row in M]
    for i in range(N):
        if S[i][i].im != 0:
            raise ValueError("matrix is not Hermitian")
        for j in range(i + 1, N):
            if S[i][j] != S[j][i].conjugate():
                raise ValueError("matrix is not Hermitian")
    remaining = list(range(N))
    pivots, diag = [], []
    while remaining:
        best = None
        for i in remaining:
            d = S[i][i].re
            if d > 0 and (best is None or d > S[best][best].re):
                best = i
        if best is None:
            # no positive pivot left: either the block is zero, or refute
            for i in remaining:
                if S[i][i].re < 0:
                    v = {i: GaussQ(1)}
                    return _refute(M, pivots, v)
            for i in remaining:
                for j in remaining:
                    if j != i and S[i][j]:
                        v = {i: GaussQ(1), j: -S[i][j].conjugate()}
                        return _refute(M, pivots, v)
            return LDLResult(True, False, pivots, diag + [mpq(0)] * len(remaining))
        p = best
        d = S[p][p]
        pivots.append(p)
        diag.append(d.re)
        remaining.remove(p)
        inv = GaussQ(1) / d
        col = {i: S[i][p] for i in remaining if S[i][p]}
        for i, sip in col.items():
            f = sip * inv
            row = S[i]
            prow = S[p]
            for j in remaining:
                if prow[j]:
                    row[j] = row[j] - f * prow[j]
    return LDLResult(True, all(d > 0 for d in diag), pivots, diag)


def _refute(M, pivots, v_rest: dict) -> LDLResult:
    N = len(M)
    v = [GaussQ(0)] * N
    for i, c in v_rest.items():
        v[i] = c
    if pivots:
        # choose the pivot coordinates to minimise the form: M11 y = -M12 v
        A = [[_g(M[a][b]) for b in pivots] for a in pivots]
        rhs = []
        for a in pivots:
            s = GaussQ(0)
            for i, c in v_rest.items():
                s = s + _g(M[a][i]) * c
            rhs.append(-s)
        y = _solve_exact(A, rhs)
        for a, ya in zip(pivots, y):
            v[a] = ya
    val = hermitian_form([[_g(x) for x in row] for row in M], v)
    if not (val.im == 0 and val.re < 0):
        raise InternalError("PSD refutation vector does not give a negative value")
    return LDLResult(False, False, pivots, [], v, val)


def rational_sqrt(q):
    """Exact square root of a nonnegative rational, or None."""
    q = mpq(q)
    if q < 0:
        return None
    from gmpy2 import is_square, isqrt
    a, b = q.numerator, q.denominator
    if is_square(a) and is_square(b):
        return mpq(isqrt(a), isqrt(b))
    return None


class MinNormSolver:
    """Minimum-norm solutions of A x = b for a fixed rational matrix A.

    x = A_r^T (A_r A_r^T)^{-1} b_r using a maximal independent row set r;
    this is the pseudo-inverse solution whenever the system is consistent.
    """

    def __init__(self, A_rows):
        self.m = len(A_rows)
        self.ncols = len(A_rows[0]) if A_rows else 0
        if not self.m or not self.ncols:
            self.rows = []
            self.P = None
            return
        A = DomainMatrix([[QQ(int(mpq(x).numerator), int(mpq(x).denominator)) for x in row] for row in A_rows],
                         (self.m, self.ncols), QQ)
        # independent rows = pivot columns of A^T
        _, pivots = A.transpose().rref()
        self.rows = list(pivots)
        Ar = _select_rows(A, self.rows)
        G = Ar * Ar.transpose()
        self.P = Ar.transpose() * G.inv()  # ncols x r
        self.A = A

    def solve(self, b):
        if self.P is None:
            if any(bb != 0 for bb in b):
                raise InternalError("inconsistent linear system")
            return [mpq(0)] * self.ncols
        br = DomainMatrix([[QQ(int(mpq(b[i]).numerator), int(mpq(b[i]).denominator))] for i in self.rows],
                          (len(self.rows), 1), QQ)
        x = self.P * br
        xs = [mpq(int(e.numerator), int(e.denominator)) for e in (x.to_list()[i][0] for i in range(self.ncols))]
        # exact consistency check on all rows
        ax = self.A * x
        al = ax.to_list()
        for i in range(self.m):
            e = al[i][0]
            if mpq(int(e.numerator), int(e.denominator)) != mpq(b[i]):
                raise InternalError("weight system has no exact solution")
        return xs


def _select_rows(A: DomainMatrix, rows):
    lst = A.to_list()
    return DomainMatrix([lst[i] for i in rows], (len(rows), A.shape[1]), QQ)


class FloatMinNormSolver:
    def __init__(self, A_rows):
        self.A = np.array([[float(x) for x in row] for row in A_rows], dtype=float)
        self.P = np.linalg.pinv(self.A) if self.A.size else None

    def solve(self, b, tol=1e-8):
        b = np.asarray([float(x) for x in b])
        if self.P is None:
            return np.zeros(0)
        x = self.P @ b
        if np.max(np.abs(self.A @ x - b), initial=0.0) > tol * max(1.0, np.max(np.abs(b), initial=0.0)):
            raise InternalError("weight system has no solution within tolerance")
        return x
