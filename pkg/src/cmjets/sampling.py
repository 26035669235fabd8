"""Quasi-random sampling on spheres and local refinement of minima."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 20240601


def sobol_normal(dim: int, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Gaussian vectors from a scrambled Sobol sequence (deterministic per seed)."""
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    m = max(1, int(np.ceil(np.log2(max(count, 2)))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pts = eng.random_base2(m)[:count]
    pts = np.clip(pts, 1e-12, 1 - 1e-12)
    return norm.ppf(pts)


def sphere(dim: int, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    x = sobol_normal(dim, count, seed)
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def split_complex(x: np.ndarray, n: int):
    """Real vectors of length 2n (+1) -> complex z (N, n) and real u (N,)."""
    x = np.atleast_2d(x)
    z = x[:, :n] + 1j * x[:, n:2 * n]
    u = x[:, 2 * n] if x.shape[1] > 2 * n else np.zeros(x.shape[0])
    return z, u


def complex_sphere(n: int, count: int, seed: int = DEFAULT_SEED, with_u: bool = False):
    """Points on the unit sphere of C^n (or C^n x R when ``with_u``)."""
    pts = sphere(2 * n + (1 if with_u else 0), count, seed)
    return split_complex(pts, n)


def refine_min(fun, x0s, normalize=True, maxiter=400):
    """Local Nelder-Mead refinement from several starts.

    ``fun`` maps a real vector to a float; when ``normalize`` the vector is
    projected to the unit sphere before evaluation.  Returns (value, x).
    """
    def g(x):
        if normalize:
            nx = np.linalg.norm(x)
            if nx == 0:
                return np.inf
            x = x / nx
        return float(fun(x))

    best_v, best_x = np.inf, None
    for x0 in x0s:
        res = minimize(g, np.asarray(x0, dtype=float), method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-10, "fatol": 1e-14})
        x = res.x / np.linalg.norm(res.x) if normalize else res.x
        v = g(res.x)
        if v < best_v:
            best_v, best_x = v, x
    return best_v, best_x
