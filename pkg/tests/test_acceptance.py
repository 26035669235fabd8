"""Acceptance criteria, each run at its stated size and tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary (see conftest.py).
"""
import random
import time

import numpy as np
import pytest

from cmjets.jets import (check_first_order, check_flat2_conditions, check_lemma_2flat, check_second_order,
                         classify_contact,
                         construct_2flat_germ, expand_basic, siegel_automorphism)
from cmjets.normalform import HypersurfaceModel, cm_normalize, transform_graph, weighted_equivalence
from cmjets.sampling import sphere, split_complex
from cmjets.selftest import (NECESSITY_KINDS, necessity_violation, perturb_non_flat, random_a,
                             random_admissible_differential, random_block_change, random_model, random_normal_pair,
                             random_strict_second_order, suite_fourier_middle, suite_polytope, suite_reduce_1d,
                             suite_types_lemma)
from cmjets.trace import normal_space_check

RESULTS = []
SEED = 20240601


def record(number, title, ok, detail):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
    print(RESULTS[-1])
    assert ok, RESULTS[-1]


def weighted_sphere(n, samples, seed):
    """Points with ||z||^4 + u^2 = 1."""
    z, u = split_complex(sphere(2 * n + 1, samples, seed), n)
    s = (np.sum(np.abs(z) ** 2, axis=1) ** 2 + u ** 2) ** (-0.25)
    return z * s[:, None], u * s * s


def test_1_quadric_automorphisms_are_flat():
    rng = random.Random(SEED + 1)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(100):
        n = rng.choice((1, 2, 3))
        a = random_a(rng, n)
        Q = HypersurfaceModel.quadric(n, 8)
        rep = expand_basic(Q, Q, siegel_automorphism(a, 8), 8)
        bad += any(e for _, e in rep.components)
    dt = time.perf_counter() - t0
    record(1, "quadric automorphisms flat through weight 8", bad == 0 and dt < 10,
           f"{100 - bad}/100 exactly zero, {dt:.2f}s")


def test_2_normalization_postconditions():
    rng = random.Random(SEED + 2)
    t0 = time.perf_counter()
    ok = 0
    for _ in range(50):
        n = rng.choice((1, 2))
        H = random_model(rng, n)
        N, ch = cm_normalize(H)
        normal = normal_space_check(N.phi, 6).is_holds
        round_trip = transform_graph(H.graph(), ch, 6) == N.graph()
        N2, ch2 = cm_normalize(N)
        ok += normal and round_trip and ch2.is_identity() and N2.phi == N.phi
    dt = time.perf_counter() - t0
    record(2, "normal form, round trip, idempotence", ok == 50 and dt < 30, f"{ok}/50, {dt:.2f}s")


def test_3_one_dimensional_sphericity():
    rng = random.Random(SEED + 3)
    spherical = equivalent = constructed = 0
    cases = 20
    for _ in range(cases):
        H, Hp = random_model(rng, 1), random_model(rng, 1)
        N, _ = cm_normalize(H)
        spherical += not (N.get(3) or N.get(4) or N.get(5))
        equivalent += weighted_equivalence(H, Hp, 5).is_holds
        F = construct_2flat_germ(H, Hp, samples=2000, seed=SEED)
        constructed += F.has_identity_linear_part()
    ok = spherical == equivalent == constructed == cases
    record(3, "n = 1 sphericity through weight 5", ok,
           f"phi3=phi4=phi5=0 {spherical}/{cases}, equivalent {equivalent}/{cases}, 2-flat germ {constructed}/{cases}")


def test_4_strict_second_order_jets_give_positive_contact():
    rng = random.Random(SEED + 4)
    margins = []
    strict = 0
    for i in range(50):
        n = rng.choice((1, 2))
        H, Hp = random_normal_pair(rng, n, quadric=i % 2 == 0)
        F = random_strict_second_order(rng, n, H.get(4), Hp.get(4))
        v = check_second_order(F, H.get(4), Hp.get(4), samples=2000, seed=SEED)
        strict += v.is_holds and v.strict
        rep = expand_basic(H, Hp, F, 4)
        mu, e = rep.first_nonzero()
        z, u = weighted_sphere(n, 10_000, SEED + i)
        margins.append(float(np.min(e.to_float().numeric()(z, u).real)) if mu == 4 else -1.0)
    worst = min(margins)
    record(4, "strict second-order jets: lowest component positive", worst > 1e-9 and strict == 50,
           f"50 jets, strict second-order verdicts {strict}/50, lowest component e_4, worst margin {worst:.3g}")


def test_5_necessity():
    rng = random.Random(SEED + 5)
    hits = 0
    for i in range(40):
        kind = NECESSITY_KINDS[i % 4]
        n = rng.choice((1, 2))
        F, weight = necessity_violation(rng, n, kind)
        Q = HypersurfaceModel.quadric(n, 4)
        rep = expand_basic(Q, Q, F, 4, samples=2000, seed=SEED)
        order, sign = classify_contact(rep)
        witness_ok = sign.is_violated and rep.component(weight).evaluate(sign.witness["z"], sign.witness["u"]).re < 0
        hits += order + 1 == weight and witness_ok
    record(5, "forbidden low-weight terms give negative witnesses", hits == 40, f"{hits}/40 detected")


def test_6_flat2_conditions_agree():
    rng = random.Random(SEED + 6)
    flat_ok = nonflat_ok = 0
    for i in range(50):
        n = rng.choice((1, 2))
        H, Hp = random_normal_pair(rng, n, quadric=i % 2 == 0)
        F = construct_2flat_germ(H, Hp, samples=2000, seed=SEED)
        rep = check_flat2_conditions(F, H, Hp)
        flat_ok += rep.agree and rep.flat2
        G = perturb_non_flat(rng, F)
        rep = check_flat2_conditions(G, H, Hp)
        nonflat_ok += rep.agree and not rep.flat2
    record(6, "2-flatness, weight-4 tangency and Im<z, F11> = 0 agree", flat_ok == 50 and nonflat_ok == 50,
           f"constructed {flat_ok}/50 all true, perturbed {nonflat_ok}/50 all false")


def test_7_lemma_2flat_on_constructed_germs():
    rng = random.Random(SEED + 7)
    ok = 0
    cases = 20
    for i in range(cases):
        n = rng.choice((1, 2))
        H, Hp = random_normal_pair(rng, n, quadric=i % 2 == 0)
        F = construct_2flat_germ(H, Hp, samples=2000, seed=SEED)
        ok += check_lemma_2flat(F, H, Hp, samples=10_000, seed=SEED + i).is_holds
    record(7, "constructed 2-flat germs satisfy the 2-flat identities", ok == cases,
           f"{ok}/{cases} germs, 10^4 samples each")


def test_8_cancellation_calculus_suite():
    t0 = time.perf_counter()
    results = [suite_types_lemma(SEED), suite_fourier_middle(SEED), suite_reduce_1d(SEED), suite_polytope(SEED)]
    dt = time.perf_counter() - t0
    ok = all(r.ok for r in results) and [r.total for r in results] == [200, 100, 100, 100] and dt < 20
    record(8, "appendix suite", ok, ", ".join(f"{r.name} {r.passed}/{r.total}" for r in results) + f", {dt:.2f}s")


def test_9_first_order_invariance():
    rng = random.Random(SEED + 9)
    exact = floating = 0
    for _ in range(100):
        n = rng.choice((1, 2, 3))
        L = random_admissible_differential(rng, n)
        L2 = random_block_change(rng, L)
        v, d = check_first_order(L)
        v2, d2 = check_first_order(L2)
        exact += v.is_holds and v2.is_holds and d.charpoly == d2.charpoly
        vf, df = check_first_order([[complex(x) for x in row] for row in L2])
        floating += vf.is_holds and np.allclose(sorted(np.array(df.alpha, float)),
                                                sorted(np.array(d.alpha, float)), rtol=0, atol=1e-12)
    record(9, "alpha invariant under block changes", exact == 100 and floating == 100,
           f"exact charpoly {exact}/100, float alpha within 1e-12 {floating}/100")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
