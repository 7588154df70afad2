"""Acceptance criteria, one test per criterion.  Every comparison is exact."""

from __future__ import annotations

import math
import time

from shds.chartable import build_T, t_prime_closed_form, verify_table
from shds.checks import run_suites
from shds.cyclotomic import delta, sigma_apply, zeta
from shds.design import build_design, verify_2design
from shds.diffsets import (
    all_eps, build_D, filter_theorem, is_shds_character, is_shds_convolution, iter_valid,
    sample_valid,
)
from shds.equivalence import (
    brute_normalizer, classify, fkeu_product_set, normalizer_gens, normalizer_order,
    normalizes_SE, stabilizer_Q,
)
from shds.gf import legendre_two, make_field
from shds.orbits import build_orbit_table

GOLDEN_CLASS_COUNTS = {3: 1, 7: 3, 11: 10}


def test_criterion_1_counts_and_oracle_agreement(report):
    results = []
    for q, want in ((3, 12), (7, 140)):
        ctx = make_field(q)
        table = build_orbit_table(ctx)
        start = time.perf_counter()
        valid = disagreements = 0
        for e in all_eps(q):
            D = build_D(table, e)
            f = filter_theorem(e, ctx)
            c = is_shds_convolution(D)
            h = is_shds_character(D)
            valid += f
            disagreements += not (f == c == h)
        elapsed = time.perf_counter() - start
        results.append((q, valid, want, disagreements, elapsed))
    ok = all(v == w and d == 0 for _, v, w, d, _ in results) and results[1][4] < 10
    text = "; ".join(f"q={q}: {v}/{2 ** (q + 2)} valid (want {w}), {d} disagreements, {t:.2f}s"
                     for q, v, w, d, t in results)
    assert report(1, ok, text)


def test_criterion_2_character_table(report):
    parts, ok = [], True
    for q in (3, 7, 11):
        start = time.perf_counter()
        rep = verify_table(make_field(q), symmetry=False)
        elapsed = time.perf_counter() - start
        ok &= rep.ok and (q != 11 or elapsed < 30)
        parts.append(f"q={q}: {rep.cells} cells, {len(rep.mismatches)} mismatches ({elapsed:.2f}s)")
    assert report(2, ok, "; ".join(parts))


def test_criterion_3_gauss_identities(report):
    bad = []
    for p, n in ((3, 1), (7, 1), (11, 1), (19, 1), (3, 3)):
        ctx = make_field(p, n)
        z, d = zeta(ctx), delta(ctx)
        if not (z + z.conj() == -1 and d * d == -ctx.q
                and sigma_apply(ctx, d, 2) == legendre_two(p) * d):
            bad.append(ctx.q)
    assert report(3, not bad, f"q in {{3, 7, 11, 19, 27}}, failures: {bad}")


def test_criterion_4_T_prime(report):
    parts, ok = [], True
    for q in (3, 7, 11):
        ctx = make_field(q)
        tp = build_T(ctx).row_permuted()
        mism = sum(tp[(i, j)] != t_prime_closed_form(ctx, i, j)
                   for i in range(q + 2) for j in range(q + 2))
        ok &= mism == 0
        parts.append(f"q={q}: {mism} mismatches")
    assert report(4, ok, "; ".join(parts))


def test_criterion_5_design_parameters(report):
    ctx = make_field(3)
    table = build_orbit_table(ctx)
    ok3 = True
    n3 = 0
    for e in iter_valid(ctx):
        des = build_design(build_D(table, e))
        chk = verify_2design(des)
        full = verify_2design(des, full=True)
        ok3 &= (chk.ok and full.ok and (chk.v, chk.k, chk.lam) == (27, 13, 6) and full.lam == 6)
        n3 += 1
    ctx7 = make_field(7)
    table7 = build_orbit_table(ctx7)
    n7 = 0
    for e in list(iter_valid(ctx7))[:10]:
        chk = verify_2design(build_design(build_D(table7, e)))
        n7 += chk.ok and (chk.v, chk.k, chk.lam) == (343, 171, 85)
    ok = ok3 and n3 == 12 and n7 >= 10
    assert report(5, ok, f"q=3: {n3} valid eps give 2-(27,13,6), exhaustive pairs ok={ok3}; "
                         f"q=7: {n7} verified 2-(343,171,85)")


def test_criterion_6_normalizer(report):
    ctx = make_field(3)
    brute = brute_normalizer(ctx)
    fkeu = fkeu_product_set(ctx)
    ok = brute == fkeu and len(fkeu) == 36 == normalizer_order(ctx)
    parts = [f"q=3: brute {len(brute)} = FKEU {len(fkeu)}: {brute == fkeu}"]
    for q in (7, 11):
        c = make_field(q)
        order = len(fkeu_product_set(c))
        gens_ok = all(normalizes_SE(c, g) for g in normalizer_gens(c, check=False).values())
        ok &= order == normalizer_order(c) == (q - 1) ** 2 * q**2 and gens_ok
        parts.append(f"q={q}: |FKEU|={order}, generators normalize SE: {gens_ok}")
    assert report(6, ok, "; ".join(parts))


def test_criterion_7_classification(report):
    parts, ok = [], True
    for q in (3, 7, 11):
        res = classify(make_field(q))
        b = res.bounds()
        index = 2 * (q - 1) * q
        ceil_bound = math.ceil(4 * math.comb(q, (q + 1) // 2) / index)
        this = (res.count >= 2 ** (q + 1) / q**4 and res.count >= ceil_bound
                and all(res.action_order % s == 0 for s in res.sizes)
                and sum(res.sizes) == res.total_valid == 4 * math.comb(q, (q + 1) // 2)
                and b["counting_bound"] == ceil_bound
                and res.count == GOLDEN_CLASS_COUNTS[q])
        ok &= this
        parts.append(f"q={q}: {res.count} classes (bound {ceil_bound}), sizes {sorted(res.sizes)}")
    assert report(7, ok, "; ".join(parts))


def test_criterion_8_gf27_scale(report):
    ctx = make_field(3, 3)
    table = build_orbit_table(ctx)
    start = time.perf_counter()
    eps_list = sample_valid(ctx, 100, seed=2027)
    conv = sum(is_shds_convolution(build_D(table, e)) for e in eps_list)
    qs = [stabilizer_Q(e, ctx) for e in eps_list]
    trivial = sum(Q.meets_U_trivially and Q.cyclic_p_power for Q in qs)
    elapsed = time.perf_counter() - start
    ok = len(eps_list) == 100 and conv == 100 and trivial == 100 and elapsed < 300
    assert report(8, ok, f"q=27: {conv}/100 pass convolution, Q meets U trivially for "
                         f"{trivial}/100 ({elapsed:.1f}s)")


def test_criterion_9_property_suites(report):
    ctx = make_field(3)
    names = ["orbit_partition", "schur_orbits", "schur_skew", "action_axioms",
             "set_level_soundness"]
    results = run_suites(ctx, names)
    ok = all(r.status == "pass" for r in results)
    assert report(9, ok, "q=3: " + ", ".join(f"{r.name}={r.status}" for r in results))
