"""Exact property suites behind the ``verify`` command."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chartable import verify_T, verify_table
from .cyclotomic import delta, sigma_apply, zeta
from .diffsets import (
    EpsFn, all_eps, build_D, enumerate_valid, filter_theorem, orbit_partition, sample_valid,
    schur_check, skew_partition,
)
from .equivalence import (
    SemiLinear, act_on_eps, action_image, fkeu_product_set, induced_perm, normalizer_gens,
)
from .gf import FieldCtx, legendre_two
from .orbits import build_orbit_table

SCHUR_ORBIT_MAX_Q = 11
FULL_SOUNDNESS_MAX_Q = 3


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skipped"
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _result(name: str, ok: bool, **detail) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", detail)


def check_orbit_partition(ctx: FieldCtx) -> CheckResult:
    table = build_orbit_table(ctx)
    q = ctx.q
    sizes = table.sizes()
    expected = [q * (q - 1) // 2] * (q + 1) + [(q - 1) // 2]
    covered = int(np.count_nonzero(table.sign_of))
    ok = sizes == expected and 2 * sum(sizes) == q**3 - 1 and covered == q**3 - 1
    return _result("orbit_partition", ok, sizes=sizes, total=2 * sum(sizes))


def check_schur_orbits(ctx: FieldCtx) -> CheckResult:
    if ctx.q > SCHUR_ORBIT_MAX_Q:
        return CheckResult("schur_orbits", "skipped", {"reason": f"q > {SCHUR_ORBIT_MAX_Q}"})
    table = build_orbit_table(ctx)
    return _result("schur_orbits", schur_check(ctx, orbit_partition(table)))


def check_schur_skew(ctx: FieldCtx, limit: int, seed: int) -> CheckResult:
    """{0}, D, -D is Schur exactly for filter-passing eps."""
    if ctx.q > SCHUR_ORBIT_MAX_Q:
        return CheckResult("schur_skew", "skipped", {"reason": f"q > {SCHUR_ORBIT_MAX_Q}"})
    table = build_orbit_table(ctx)
    if 2 ** (ctx.q + 2) <= 4096:
        cands = list(all_eps(ctx.q))
    else:
        rng = random.Random(seed)
        cands = sample_valid(ctx, limit, seed)
        cands += [e for e in (
            _random_eps(ctx.q, rng) for _ in range(4 * limit)) if not filter_theorem(e, ctx)][:limit]
    disagree = [e.bits for e in cands
                if schur_check(ctx, skew_partition(build_D(table, e))) != filter_theorem(e, ctx)]
    return _result("schur_skew", not disagree, tested=len(cands), disagreements=disagree[:5])


def _random_eps(q: int, rng: random.Random) -> EpsFn:
    return EpsFn(tuple(rng.choice((1, -1)) for _ in range(q + 2)))


def check_gauss(ctx: FieldCtx) -> CheckResult:
    z = zeta(ctx)
    d = delta(ctx)
    checks = {
        "zeta_plus_conj": z + z.conj() == -1,
        "delta_squared": d * d == -ctx.q,
        "delta_sigma2": sigma_apply(ctx, d, 2) == legendre_two(ctx.p) * d,
    }
    return _result("gauss_identities", all(checks.values()), **checks)


def check_chartable(ctx: FieldCtx) -> CheckResult:
    rep = verify_table(ctx)
    return _result("character_table", rep.ok, cells=rep.cells,
                   mismatches=rep.mismatches[:5], symmetry=rep.symmetry)


def check_T(ctx: FieldCtx) -> CheckResult:
    bad = verify_T(ctx)
    return _result("T_matrix", not bad, mismatches=bad[:5])


def check_normalizer(ctx: FieldCtx) -> CheckResult:
    gens = normalizer_gens(ctx, check=True)
    return _result("normalizer_generators", True, generators=sorted(gens))


def _sample_maps(ctx: FieldCtx, count: int, seed: int) -> list[SemiLinear]:
    """Random words in the FKEU generators."""
    rng = random.Random(seed)
    gens = list(normalizer_gens(ctx).values())
    out = []
    for _ in range(count):
        g = gens[rng.randrange(len(gens))]
        for _ in range(rng.randrange(1, 6)):
            g = g.compose(ctx, gens[rng.randrange(len(gens))])
        out.append(g)
    return out


def check_action_axioms(ctx: FieldCtx, limit: int, seed: int) -> CheckResult:
    """act(gh) = act(g) act(h) on eps, and the identity acts trivially."""
    table = build_orbit_table(ctx)
    maps = _sample_maps(ctx, limit, seed)
    eps_list = _valid_subset(ctx, limit, seed)
    ident = SemiLinear.linear(np.eye(3, dtype=np.int64))
    fails = 0
    for g, h in zip(maps, reversed(maps)):
        gh = g.compose(ctx, h)
        for e in eps_list:
            if act_on_eps(table, gh, e) != act_on_eps(table, g, act_on_eps(table, h, e)):
                fails += 1
    ident_ok = all(act_on_eps(table, ident, e) == e for e in eps_list)
    return _result("action_axioms", fails == 0 and ident_ok, composition_failures=fails,
                   identity_ok=ident_ok)


def _valid_subset(ctx: FieldCtx, limit: int, seed: int):
    if ctx.q <= 7:
        return enumerate_valid(ctx)
    return sample_valid(ctx, limit, seed)


def check_set_soundness(ctx: FieldCtx, limit: int, seed: int) -> CheckResult:
    """g D_eps equals D_{act(g, eps)} as point sets; every group element at q = 3."""
    table = build_orbit_table(ctx)
    if ctx.q <= FULL_SOUNDNESS_MAX_Q:
        maps = sorted(fkeu_product_set(ctx), key=lambda m: (m.k, m.mat))
    else:
        maps = _sample_maps(ctx, limit, seed)
    eps_list = _valid_subset(ctx, limit, seed)
    fails = 0
    for g in maps:
        perm = induced_perm(table, g)
        for e in eps_list:
            D = build_D(table, e)
            image = np.zeros_like(D.mask)
            image[g.apply(ctx, D.codes())] = True
            e2 = perm.act(e)
            if not np.array_equal(image, build_D(table, e2).mask) or not filter_theorem(e2, ctx):
                fails += 1
    return _result("set_level_soundness", fails == 0, maps=len(maps), eps=len(eps_list),
                   failures=fails)


def check_action_image(ctx: FieldCtx) -> CheckResult:
    if ctx.q > SCHUR_ORBIT_MAX_Q:
        return CheckResult("action_image", "skipped", {"reason": f"q > {SCHUR_ORBIT_MAX_Q}"})
    img = action_image(ctx)
    index = 2 * ctx.n * (ctx.q - 1) * ctx.q
    return _result("action_image", len(img) == index, order=len(img), index=index)


SUITES: dict[str, Callable[..., CheckResult]] = {
    "orbit_partition": lambda ctx, limit, seed: check_orbit_partition(ctx),
    "schur_orbits": lambda ctx, limit, seed: check_schur_orbits(ctx),
    "schur_skew": check_schur_skew,
    "gauss_identities": lambda ctx, limit, seed: check_gauss(ctx),
    "character_table": lambda ctx, limit, seed: check_chartable(ctx),
    "T_matrix": lambda ctx, limit, seed: check_T(ctx),
    "normalizer_generators": lambda ctx, limit, seed: check_normalizer(ctx),
    "action_axioms": check_action_axioms,
    "set_level_soundness": check_set_soundness,
    "action_image": lambda ctx, limit, seed: check_action_image(ctx),
}


def run_suites(ctx: FieldCtx, names: Optional[list[str]] = None, *, limit: int = 10,
               seed: int = 0) -> list[CheckResult]:
    names = names or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](ctx, limit, seed) for n in names]
