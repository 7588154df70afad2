"""The normalizer FKEU of A = SE and the classification of valid eps functions.

Semilinear maps of V are stored as ``(M, k)`` meaning ``v -> M @ frob^k(v)``
where ``frob`` raises each coordinate to the p-th power.  Two valid eps
functions give isomorphic translation designs exactly when some element of
FKEU carries one set onto the other; this module computes those orbits.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .diffsets import DEFAULT_BUDGET, EpsFn, enumerate_valid
from .gf import FieldCtx
from .orbits import (
    OrbitTable, build_group_A, build_orbit_table, decode, encode, gen_E, generators_SE,
    index_label, mat, mat_inv, mat_key, mat_mul, mat_vec,
)


class NormalizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SemiLinear:
    """v -> M @ frob^k(v); ``mat`` is the row-major tuple of M."""

    mat: tuple[int, ...]
    k: int = 0

    @classmethod
    def linear(cls, m) -> "SemiLinear":
        return cls(mat_key(m), 0)

    def matrix(self) -> np.ndarray:
        return np.array(self.mat, dtype=np.int64).reshape(3, 3)

    def apply(self, ctx: FieldCtx, codes):
        coords = decode(ctx, codes)
        coords = np.asarray(ctx.frobenius(coords, self.k)) if self.k else coords
        return encode(ctx, mat_vec(ctx, self.matrix(), coords))

    def compose(self, ctx: FieldCtx, other: "SemiLinear") -> "SemiLinear":
        """self after other."""
        m2 = np.asarray(ctx.frobenius(other.matrix(), self.k)) if self.k else other.matrix()
        return SemiLinear(mat_key(mat_mul(ctx, self.matrix(), m2)), (self.k + other.k) % ctx.n)

    def inverse(self, ctx: FieldCtx) -> "SemiLinear":
        k = (-self.k) % ctx.n
        inv = mat_inv(ctx, self.matrix())
        inv = np.asarray(ctx.frobenius(inv, k)) if k else inv
        return SemiLinear(mat_key(inv), k)

    def conjugate(self, ctx: FieldCtx, h: "SemiLinear") -> "SemiLinear":
        """self * h * self^-1."""
        return self.compose(ctx, h).compose(ctx, self.inverse(ctx))


def frobenius_map(ctx: FieldCtx, k: int = 1) -> SemiLinear:
    return SemiLinear(mat_key(np.eye(3, dtype=np.int64)), k % ctx.n)


def gen_K(ctx: FieldCtx, alpha: int, beta: int) -> np.ndarray:
    """diag(alpha, alpha*beta, alpha*beta^2)."""
    ab = ctx.mul(alpha, beta)
    return mat([[alpha, 0, 0], [0, ab, 0], [0, 0, ctx.mul(ab, beta)]])


def gen_U(ctx: FieldCtx, gamma: int) -> np.ndarray:
    """Identity plus gamma in the top-right corner."""
    return mat([[1, 0, gamma], [0, 1, 0], [0, 0, 1]])


@dataclass(frozen=True)
class NormElem:
    """f^k * K(alpha, beta) * E(x) * U(gamma)."""

    k: int
    alpha: int
    beta: int
    x: int
    gamma: int

    def to_map(self, ctx: FieldCtx) -> SemiLinear:
        m = mat_mul(ctx, gen_K(ctx, self.alpha, self.beta),
                    mat_mul(ctx, gen_E(ctx, self.x), gen_U(ctx, self.gamma)))
        if self.k:
            m = np.asarray(ctx.frobenius(m, self.k))
        return SemiLinear(mat_key(m), self.k % ctx.n)


def normalizer_order(ctx: FieldCtx) -> int:
    """n (q-1)^2 q^2."""
    return ctx.n * (ctx.q - 1) ** 2 * ctx.q**2


def normalizer_index(ctx: FieldCtx) -> int:
    """[N : A] = 2 n (q-1) q."""
    return 2 * ctx.n * (ctx.q - 1) * ctx.q


# -- membership in SE -----------------------------------------------------

def in_SE(ctx: FieldCtx, g: SemiLinear) -> bool:
    """Whether g equals s*E(x) for a nonzero square s."""
    if g.k != 0:
        return False
    m = g.matrix()
    s = int(m[0, 0])
    if ctx.is_square(s) != 1 or m[1, 1] != s or m[2, 2] != s:
        return False
    if m[1, 0] or m[2, 0] or m[2, 1]:
        return False
    x = int(ctx.div(m[0, 1], s))
    return m[1, 2] == m[0, 1] and mat_key(ctx.mul(s, gen_E(ctx, x))) == mat_key(m)


def normalizes_SE(ctx: FieldCtx, g: SemiLinear) -> bool:
    """g SE g^-1 = SE, checked on the generators of SE."""
    return all(in_SE(ctx, g.conjugate(ctx, SemiLinear.linear(h))) for h in generators_SE(ctx))


def normalizer_gens(ctx: FieldCtx, *, check: bool = True) -> dict[str, SemiLinear]:
    """Generators of FKEU; each is verified to normalize SE."""
    prim = ctx.primitive
    gens = {
        "K(a0,1)": SemiLinear.linear(gen_K(ctx, prim, 1)),
        "K(1,b0)": SemiLinear.linear(gen_K(ctx, 1, prim)),
        "E(1)": SemiLinear.linear(gen_E(ctx, 1)),
        "U(1)": SemiLinear.linear(gen_U(ctx, 1)),
    }
    if ctx.n > 1:
        gens = {"f": frobenius_map(ctx, 1), **gens}
    if check:
        for name, g in gens.items():
            if not normalizes_SE(ctx, g):
                raise NormalizerError(f"generator {name} does not normalize SE")
    return gens


def fkeu_elements(ctx: FieldCtx) -> Iterable[NormElem]:
    nz = range(1, ctx.q)
    for k, a, b, x, c in itertools.product(range(ctx.n), nz, nz, range(ctx.q), range(ctx.q)):
        yield NormElem(k, a, b, x, c)


def fkeu_product_set(ctx: FieldCtx) -> set[SemiLinear]:
    """All products f^k K(a,b) E(x) U(c), as a set of distinct maps (batched)."""
    q, n = ctx.q, ctx.n
    nz = np.arange(1, q)
    ks = np.stack([gen_K(ctx, int(a), int(b)) for a in nz for b in nz])
    eu = np.stack([mat_mul(ctx, gen_E(ctx, int(x)), gen_U(ctx, int(c)))
                   for x in range(q) for c in range(q)])
    prods = mat_mul(ctx, ks[:, None], eu[None, :]).reshape(-1, 9)
    out = set()
    for k in range(n):
        mats = np.asarray(ctx.frobenius(prods, k)) if k else prods
        out.update(SemiLinear(tuple(int(v) for v in row), k) for row in np.unique(mats, axis=0))
    return out


def brute_normalizer(ctx: FieldCtx) -> set[SemiLinear]:
    """Every invertible (semi)linear map of V normalizing SE, by exhaustion.

    Only GF(3) is in range: GL_3(3) has 11232 elements.
    """
    if ctx.q > 3:
        raise NormalizerError(f"brute-force normalizer is limited to q = 3 (got q = {ctx.q})")
    p = ctx.p
    entries = np.array(list(itertools.product(range(p), repeat=9)), dtype=np.int64)
    ms = entries.reshape(-1, 3, 3)
    det = np.rint(np.linalg.det(ms.astype(np.float64))).astype(np.int64) % p
    ms = ms[det != 0]
    group = np.stack([m for m in build_group_A(ctx)])
    ok = np.ones(len(ms), dtype=bool)
    for h in generators_SE(ctx):
        lhs = (ms @ h) % p
        # M h M^-1 in SE  <=>  M h = X M for some X in SE
        hit = np.zeros(len(ms), dtype=bool)
        for x in group:
            hit |= np.all(((x @ ms) % p) == lhs, axis=(1, 2))
        ok &= hit
    return {SemiLinear(tuple(int(v) for v in m.ravel()), 0) for m in ms[ok]}


# -- induced action on I --------------------------------------------------

@dataclass(frozen=True)
class SignedIndexPerm:
    """g O_i = signs[i] * O_{perm[i]}."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    @classmethod
    def identity(cls, size: int) -> "SignedIndexPerm":
        return cls(tuple(range(size)), (1,) * size)

    def compose(self, other: "SignedIndexPerm") -> "SignedIndexPerm":
        """self after other."""
        perm = tuple(self.perm[j] for j in other.perm)
        signs = tuple(other.signs[i] * self.signs[other.perm[i]] for i in range(len(self.perm)))
        return SignedIndexPerm(perm, signs)

    def act(self, eps: EpsFn) -> EpsFn:
        """eps' with D_eps' = g D_eps: eps'(perm[i]) = signs[i] * eps(i)."""
        out = [0] * len(self.perm)
        for i, (j, s) in enumerate(zip(self.perm, self.signs)):
            out[j] = s * eps.signs[i]
        return EpsFn(tuple(out))

    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and all(s == 1 for s in self.signs)


def induced_perm(table: OrbitTable, g: SemiLinear) -> SignedIndexPerm:
    """Signed permutation of I induced by g, from the images of whole orbits."""
    ctx = table.ctx
    perm, signs = [], []
    for idx in range(table.size):
        image = g.apply(ctx, table.members[idx])
        s, j = table.locate_many(image)
        if np.any(s == 0) or np.any(s != s[0]) or np.any(j != j[0]):
            raise NormalizerError(
                f"map does not send orbit {index_label(ctx, idx)} onto a single orbit")
        perm.append(int(j[0]))
        signs.append(int(s[0]))
    if sorted(perm) != list(range(table.size)):
        raise NormalizerError("induced map on I is not a permutation")
    return SignedIndexPerm(tuple(perm), tuple(signs))


def act_on_eps(table: OrbitTable, g: SemiLinear, eps: EpsFn) -> EpsFn:
    return induced_perm(table, g).act(eps)


def action_image(ctx: FieldCtx, gens: Optional[Sequence[SemiLinear]] = None) -> set[SignedIndexPerm]:
    """The group of signed permutations of I induced by FKEU (closure of generators)."""
    table = build_orbit_table(ctx)
    if gens is None:
        gens = list(normalizer_gens(ctx).values())
    gperms = [induced_perm(table, g) for g in gens]
    ident = SignedIndexPerm.identity(table.size)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gperms:
                c = g.compose(h)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


@lru_cache(maxsize=8)
def _action_image_sorted(ctx: FieldCtx) -> tuple[SignedIndexPerm, ...]:
    return tuple(sorted(action_image(ctx), key=lambda h: (h.perm, h.signs)))


def coset_representatives(ctx: FieldCtx) -> list[NormElem]:
    """f^k K(a, b) U(c) with a in {1, nonsquare}: 2n(q-1)q elements covering FKEU / A."""
    nonsq = int(ctx.nonsquares[0])
    return [NormElem(k, a, b, 0, c)
            for k in range(ctx.n) for a in (1, nonsq) for b in range(1, ctx.q) for c in range(ctx.q)]


def canonical_form(perms: Sequence[SignedIndexPerm], eps: EpsFn) -> EpsFn:
    """Lex-min image of eps under the action group."""
    return min(h.act(eps) for h in perms)


# -- classification -------------------------------------------------------

@dataclass
class EquivClasses:
    p: int
    q: int
    n: int
    total_valid: int
    group_order: int
    action_order: int
    classes: dict[EpsFn, list[EpsFn]] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(v) for v in self.classes.values()]

    def bounds(self) -> dict:
        q, n = self.q, self.n
        index = 2 * n * (q - 1) * q
        exp_bound = 2 ** (q + 1) / q**4
        count_bound = math.ceil(self.total_valid / index)
        return {
            "index_N_over_A": index,
            "exponential_bound": exp_bound,
            "exponential_bound_holds": self.count >= exp_bound,
            "counting_bound": count_bound,
            "counting_bound_holds": self.count >= count_bound,
            "sizes_divide_action_order": all(self.action_order % s == 0 for s in self.sizes),
            "sizes_sum_to_total": sum(self.sizes) == self.total_valid,
        }

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "q": self.q,
            "total_valid": self.total_valid,
            "normalizer_order": self.group_order,
            "action_order": self.action_order,
            "class_count": self.count,
            "classes": [
                {"representative": rep.bits, "size": len(members)}
                for rep, members in self.classes.items()
            ],
            "bounds": self.bounds(),
        }


def classify(ctx: FieldCtx, *, budget: int = DEFAULT_BUDGET, threads: int = 1) -> EquivClasses:
    """FKEU-orbits on the valid eps functions, keyed by lex-min representative."""
    valid = enumerate_valid(ctx, "exhaustive", budget=budget)
    perms = _action_image_sorted(ctx)
    chunk = max(1, len(valid) // max(threads, 1))
    parts = [valid[i:i + chunk] for i in range(0, len(valid), chunk)]

    def work(batch):
        return [canonical_form(perms, e) for e in batch]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            keys = [k for part in pool.map(work, parts) for k in part]
    else:
        keys = work(valid)
    groups: dict[EpsFn, list[EpsFn]] = defaultdict(list)
    for key, eps in zip(keys, valid):
        groups[key].append(eps)
    classes = {k: groups[k] for k in sorted(groups)}
    return EquivClasses(ctx.p, ctx.q, ctx.n, len(valid), normalizer_order(ctx), len(perms), classes)


# -- the stabilizer Q of D in U F_p ---------------------------------------

def sylow_p_exponents(ctx: FieldCtx) -> list[int]:
    """Frobenius exponents forming the Sylow p-subgroup of Gal(F_q / F_p)."""
    n, p = ctx.n, ctx.p
    m = n
    while m % p == 0:
        m //= p
    return list(range(0, n, m))


@dataclass
class QStabilizer:
    pairs: list[tuple[int, int]]
    meets_U_trivially: bool
    cyclic_p_power: bool

    @property
    def order(self) -> int:
        return len(self.pairs)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "elements": [{"gamma": g, "frobenius_exponent": k} for g, k in self.pairs],
            "meets_U_trivially": self.meets_U_trivially,
            "cyclic_p_power": self.cyclic_p_power,
        }


def stabilizer_Q(eps: EpsFn, ctx: FieldCtx) -> QStabilizer:
    """Pairs (gamma, k) with frob^k(J) + gamma = J, k in the Sylow p-part."""
    J = np.array(sorted(eps.J), dtype=np.int64)
    target = set(int(j) for j in J)
    pairs = []
    for k in sylow_p_exponents(ctx):
        fj = np.asarray(ctx.frobenius(J, k)) if len(J) else J
        for gamma in range(ctx.q):
            if set(int(x) for x in np.atleast_1d(ctx.add(fj, gamma))) == target:
                pairs.append((gamma, k))
    meets_u = all(g == 0 for g, k in pairs if k == 0)
    order = len(pairs)
    p_power = order > 0 and _is_power(order, ctx.p)
    injective = len({k for _, k in pairs}) == order
    return QStabilizer(pairs, meets_u, p_power and injective)


def _is_power(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def u_frobenius(ctx: FieldCtx, gamma: int, k: int) -> SemiLinear:
    """The map U(gamma) * f^k."""
    return SemiLinear(mat_key(gen_U(ctx, gamma)), k % ctx.n)


def frobenius_invariant_J(ctx: FieldCtx, size: int) -> Optional[frozenset[int]]:
    """A union of Frobenius orbits of F_q with the given size, if one exists."""
    seen, orbits = set(), []
    for a in range(ctx.q):
        if a in seen:
            continue
        orb = {a}
        b = int(ctx.frobenius(a, 1))
        while b not in orb:
            orb.add(b)
            b = int(ctx.frobenius(b, 1))
        seen |= orb
        orbits.append(sorted(orb))
    orbits.sort(key=lambda o: (-len(o), o))
    chosen: list[int] = []
    for orb in orbits:
        if len(chosen) + len(orb) <= size:
            chosen += orb
    return frozenset(chosen) if len(chosen) == size else None
