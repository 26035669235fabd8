import random

import numpy as np
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from cmjets.exact_linalg import FloatMinNormSolver, MinNormSolver, hermitian_form, ldl_psd, rational_sqrt
from cmjets.scalars import GaussQ

from conftest import seeds


def rand_hermitian(rng, n):
    M = [[GaussQ(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if i == j:
                M[i][i] = GaussQ(mpq(rng.randint(-4, 6), rng.randint(1, 3)))
            else:
                c = GaussQ(mpq(rng.randint(-3, 3), rng.randint(1, 3)), mpq(rng.randint(-3, 3), rng.randint(1, 3)))
                M[i][j], M[j][i] = c, c.conjugate()
    return M


def as_np(M):
    return np.array([[complex(x) for x in row] for row in M])


@given(seeds, st.integers(1, 4))
def test_ldl_matches_eigenvalues(seed, n):
    M = rand_hermitian(random.Random(seed), n)
    ev = np.linalg.eigvalsh(as_np(M))
    res = ldl_psd(M)
    if ev.min() > 1e-9:
        assert res.pd and res.psd
    elif ev.min() < -1e-9:
        assert not res.psd
        assert hermitian_form(M, res.witness).re < 0


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_gram_products_are_psd(seed, n, r):
    rng = random.Random(seed)
    B = [[GaussQ(mpq(rng.randint(-2, 2)), mpq(rng.randint(-2, 2))) for _ in range(r)] for _ in range(n)]
    M = [[sum((B[i][k] * B[j][k].conjugate() for k in range(r)), GaussQ(0)) for j in range(n)] for i in range(n)]
    res = ldl_psd(M)
    assert res.psd
    assert res.pd == (np.linalg.matrix_rank(as_np(B)) == n)


@given(seeds)
def test_min_norm_solver_matches_pinv(seed):
    rng = random.Random(seed)
    m, k = rng.randint(1, 5), rng.randint(1, 6)
    A = [[mpq(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(k)] for _ in range(m)]
    x0 = [mpq(rng.randint(-3, 3)) for _ in range(k)]
    b = [sum((a * x for a, x in zip(row, x0)), mpq(0)) for row in A]
    x = MinNormSolver(A).solve(b)
    ref = np.linalg.pinv(np.array(A, dtype=float)) @ np.array(b, dtype=float)
    assert np.allclose(np.array(x, dtype=float), ref, atol=1e-9)
    assert np.allclose(FloatMinNormSolver(A).solve(b), ref, atol=1e-9)


def test_rational_sqrt():
    assert rational_sqrt(mpq(9, 4)) == mpq(3, 2)
    assert rational_sqrt(mpq(2)) is None
    assert rational_sqrt(mpq(-1)) is None
