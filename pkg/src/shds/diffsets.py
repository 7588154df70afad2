"""Candidate sets D_eps, the fusion criterion, and two independent SHDS oracles.

An :class:`EpsFn` is a sign vector over the orbit index set I in the fixed
order ``Fin(0..q-1), inf, dot``.  As a bitstring, ``1`` means +1 and ``0``
means -1, so lexicographic order on bitstrings and on sign tuples agree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .cyclotomic import CycInt
from .gf import FieldCtx, legendre_two
from .orbits import OrbitTable, build_orbit_table, pairing, vadd, vneg, vsub

DEFAULT_BUDGET = 1_000_000
SCHUR_CHUNK = 1 << 20  # pair sums held in memory at once


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class EpsFn:
    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("eps values must be +1 or -1")
        if len(self.signs) < 3:
            raise ValueError("eps must cover F_q, inf and dot")

    @property
    def q(self) -> int:
        return len(self.signs) - 2

    @property
    def J(self) -> frozenset[int]:
        return frozenset(i for i in range(self.q) if self.signs[i] == 1)

    @property
    def mu(self) -> int:
        return sum(self.signs[: self.q])

    @property
    def inf(self) -> int:
        return self.signs[-2]

    @property
    def dot(self) -> int:
        return self.signs[-1]

    def __neg__(self) -> "EpsFn":
        return EpsFn(tuple(-s for s in self.signs))

    def __getitem__(self, idx: int) -> int:
        return self.signs[idx]

    def __len__(self) -> int:
        return len(self.signs)

    @property
    def bits(self) -> str:
        return "".join("1" if s == 1 else "0" for s in self.signs)

    @classmethod
    def from_bits(cls, bits: str) -> "EpsFn":
        if set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring may only contain 0 and 1: {bits!r}")
        return cls(tuple(1 if b == "1" else -1 for b in bits))

    @classmethod
    def from_parts(cls, ctx: FieldCtx, J, inf: int, dot: int) -> "EpsFn":
        J = set(int(j) for j in J)
        return cls(tuple(1 if i in J else -1 for i in range(ctx.q)) + (inf, dot))

    def to_json(self) -> list[int]:
        return list(self.signs)


@dataclass
class DiffSet:
    """A subset of V as a boolean mask over point codes."""

    ctx: FieldCtx
    mask: np.ndarray

    @classmethod
    def from_codes(cls, ctx: FieldCtx, codes) -> "DiffSet":
        mask = np.zeros(ctx.q**3, dtype=bool)
        mask[np.asarray(codes, dtype=np.int64)] = True
        return cls(ctx, mask)

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.mask))

    def codes(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __contains__(self, code: int) -> bool:
        return bool(self.mask[code])

    def __neg__(self) -> "DiffSet":
        return DiffSet(self.ctx, self.mask[neg_perm(self.ctx)])

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffSet) and np.array_equal(self.mask, other.mask)

    def translate(self, w: int) -> "DiffSet":
        return DiffSet.from_codes(self.ctx, vadd(self.ctx, self.codes(), w))


@lru_cache(maxsize=16)
def neg_perm(ctx: FieldCtx) -> np.ndarray:
    """Index array with neg_perm[c] = code of -c."""
    arr = np.asarray(vneg(ctx, np.arange(ctx.q**3)))
    arr.setflags(write=False)
    return arr


def build_D(table: OrbitTable, eps: EpsFn) -> DiffSet:
    """Union of eps(i)*O_i over I."""
    if eps.q != table.ctx.q:
        raise ValueError("eps length does not match the field")
    e = np.asarray(eps.signs, dtype=np.int8)
    mask = (table.sign_of * e[np.maximum(table.index_of, 0)]) == 1
    return DiffSet(table.ctx, mask)


def filter_theorem(eps: EpsFn, ctx: FieldCtx) -> bool:
    """Fusion criterion: mu = +-1 and eps(dot) = (2/p) * mu; eps(inf) is free."""
    mu = eps.mu
    return abs(mu) == 1 and eps.dot == legendre_two(ctx.p) * mu


def valid_count(q: int) -> int:
    return 4 * math.comb(q, (q + 1) // 2)


# -- convolution oracle ---------------------------------------------------

def difference_counts(ctx: FieldCtx, mask: np.ndarray) -> np.ndarray:
    """counts[g] = #{(d, d') in D^2 : d - d' = g}, exactly.

    A point code is ``x + q*y`` with x = w1 and y = (w2, w3).  For each
    y-difference gy, ``M^T @ M[y - gy]`` counts pairs by their x
    coordinates, which are then binned by x-difference.
    """
    q = ctx.q
    m = np.asarray(mask, dtype=np.float64).reshape(q * q, q)
    xsub = np.asarray(ctx.sub(np.arange(q)[:, None], np.arange(q)[None, :])).ravel()
    ysub = _y_sub_table(ctx)
    counts = np.zeros((q * q, q), dtype=np.int64)
    for gy in range(q * q):
        c = m.T @ m[ysub[:, gy]]
        counts[gy] = np.rint(np.bincount(xsub, weights=c.ravel(), minlength=q)).astype(np.int64)
    return counts.ravel()


def difference_counts_pairs(ctx: FieldCtx, mask: np.ndarray) -> np.ndarray:
    """Same as :func:`difference_counts` by enumerating all pairs; small q only."""
    d = np.flatnonzero(mask)
    diffs = vsub(ctx, d[:, None], d[None, :])
    return np.bincount(np.ravel(diffs), minlength=ctx.q**3)


@lru_cache(maxsize=8)
def _y_sub_table(ctx: FieldCtx) -> np.ndarray:
    """ysub[y, y'] = y - y' for y = w2 + q*w3."""
    q = ctx.q
    yy = np.arange(q * q)
    w2, w3 = yy % q, yy // q
    g2 = np.asarray(ctx.sub(w2[:, None], w2[None, :]))
    g3 = np.asarray(ctx.sub(w3[:, None], w3[None, :]))
    out = g2 + q * g3
    out.setflags(write=False)
    return out


def shds_parameters(ctx: FieldCtx) -> tuple[int, int, int]:
    v = ctx.q**3
    return v, (v - 1) // 2, (v - 3) // 4


def is_shds_convolution(D: DiffSet) -> bool:
    """Group-ring check of D D^(-1) = (k - lam) + lam V by counting differences."""
    v, k, lam = shds_parameters(D.ctx)
    if D.size != k:
        return False
    counts = difference_counts(D.ctx, D.mask)
    return bool(counts[0] == k and np.all(counts[1:] == lam))


# -- character oracle -----------------------------------------------------

@lru_cache(maxsize=8)
def _dual_rep_traces(ctx: FieldCtx) -> tuple[np.ndarray, np.ndarray]:
    """Covector representatives of all signed dual orbits and tr(vw) over all w."""
    table = build_orbit_table(ctx)
    reps = []
    for idx in range(table.size):
        v = table.dual_rep(idx)
        reps += [v, int(vneg(ctx, v))]
    reps = np.array(reps, dtype=np.int64)
    pts = np.arange(ctx.q**3)
    traces = np.stack([ctx.trace_table[pairing(ctx, v, pts)] for v in reps])
    reps.setflags(write=False)
    traces.setflags(write=False)
    return reps, traces


def is_a_invariant(D: DiffSet) -> bool:
    table = build_orbit_table(D.ctx)
    for sign in (1, -1):
        for idx in range(table.size):
            vals = D.mask[table.orbit(sign, idx)]
            if vals.any() and not vals.all():
                return False
    return True


def sh3_value(ctx: FieldCtx, D: DiffSet, v: int) -> CycInt:
    """chi_v(D) - conj(chi_v(D))."""
    x = _char_of_set(ctx, D.codes(), v)
    return x - x.conj()


def _char_of_set(ctx: FieldCtx, codes: np.ndarray, v: int) -> CycInt:
    tr = ctx.trace_table[pairing(ctx, v, codes)]
    return CycInt.from_exponent_counts(np.bincount(np.atleast_1d(tr), minlength=ctx.p))


def sh_conditions(D: DiffSet, *, full: bool = False) -> dict[str, bool]:
    """Evaluate SH1, SH2 and SH3 (squared, sign-free form) separately.

    SH3 is tested on one covector per signed dual orbit unless ``full`` is
    set or D is not A-invariant, in which case every nonzero covector is used.
    """
    ctx = D.ctx
    neg = D.mask[neg_perm(ctx)]
    sh1 = not bool(np.any(D.mask & neg))
    cover = D.mask | neg
    sh2 = (not cover[0]) and bool(cover[1:].all())
    out = {"SH1": sh1, "SH2": sh2, "SH3": False}
    if not (sh1 and sh2):
        return out
    target = CycInt.from_int(ctx.p, -(ctx.q**3))
    if full or not is_a_invariant(D):
        codes = D.codes()
        values = (_char_of_set(ctx, codes, v) for v in range(1, ctx.q**3))
    else:
        _, traces = _dual_rep_traces(ctx)
        values = (CycInt.from_exponent_counts(np.bincount(row[D.mask], minlength=ctx.p))
                  for row in traces)
    out["SH3"] = all((x - x.conj()) ** 2 == target for x in values)
    return out


def is_shds_character(D: DiffSet, *, full: bool = False) -> bool:
    return all(sh_conditions(D, full=full).values())


# -- enumeration ----------------------------------------------------------

def iter_valid(ctx: FieldCtx) -> Iterator[EpsFn]:
    """Filter-passing eps functions in lexicographic order, generated lazily."""
    q = ctx.q
    lo, hi = (q - 1) // 2, (q + 1) // 2
    leg = legendre_two(ctx.p)
    prefix: list[int] = []

    def rec(pos: int, plus: int) -> Iterator[EpsFn]:
        if pos == q:
            mu = 2 * plus - q
            for inf in (-1, 1):
                yield EpsFn(tuple(prefix) + (inf, leg * mu))
            return
        rest = q - pos
        for s in (-1, 1):
            k = plus + (s == 1)
            if k <= hi and k + rest - 1 >= lo:
                prefix.append(s)
                yield from rec(pos + 1, k)
                prefix.pop()

    yield from rec(0, 0)


def sample_valid(ctx: FieldCtx, count: int, seed: int) -> list[EpsFn]:
    """Uniform random valid eps functions from an explicit seed."""
    rng = random.Random(seed)
    leg = legendre_two(ctx.p)
    out = []
    for _ in range(count):
        mu = rng.choice((1, -1))
        inf = rng.choice((1, -1))
        J = rng.sample(range(ctx.q), (ctx.q + mu) // 2)
        out.append(EpsFn.from_parts(ctx, J, inf, leg * mu))
    return out


def enumerate_valid(ctx: FieldCtx, mode: str = "exhaustive", *, count: int = 0,
                    seed: Optional[int] = None, budget: int = DEFAULT_BUDGET):
    """Valid eps functions.

    ``exhaustive`` returns a list (guarded by ``budget``), ``stream`` a lazy
    iterator, ``sample`` a list of ``count`` seeded random draws.
    """
    if mode == "exhaustive":
        total = valid_count(ctx.q)
        if total > budget:
            raise BudgetExceeded(f"{total} valid eps functions exceed the budget {budget}")
        return list(iter_valid(ctx))
    if mode == "stream":
        return iter_valid(ctx)
    if mode == "sample":
        if seed is None:
            raise ValueError("sample mode requires an explicit seed")
        return sample_valid(ctx, count, seed)
    raise ValueError(f"unknown enumeration mode {mode!r}")


def all_eps(q: int) -> Iterator[EpsFn]:
    """All 2^(q+2) sign functions in lexicographic order."""
    for bits in range(2 ** (q + 2)):
        yield EpsFn.from_bits(format(bits, f"0{q + 2}b"))


# -- Schur partitions -----------------------------------------------------

def schur_violation(ctx: FieldCtx, partition: Sequence) -> Optional[str]:
    """First failed Schur axiom as text, or None if the partition is Schur."""
    npts = ctx.q**3
    cls = np.full(npts, -1, dtype=np.int64)
    parts = [np.unique(np.asarray(p, dtype=np.int64)) for p in partition]
    for k, part in enumerate(parts):
        if np.any(cls[part] != -1):
            raise ValueError("classes overlap: not a partition")
        cls[part] = k
    if np.any(cls == -1):
        raise ValueError("classes do not cover V: not a partition")
    if len(parts[cls[0]]) != 1:
        return "S1: the class of 0 is not {0}"
    neg = neg_perm(ctx)
    for k, part in enumerate(parts):
        image = np.sort(neg[part])
        j = cls[image[0]]
        if not np.array_equal(image, parts[j]):
            return f"S2: the negation of class {k} is not a class"
    for a, pa in enumerate(parts):
        for b, pb in enumerate(parts):
            counts = np.zeros(npts, dtype=np.int64)
            step = max(1, SCHUR_CHUNK // len(pb))
            for lo in range(0, len(pa), step):
                sums = np.ravel(vadd(ctx, pa[lo:lo + step, None], pb[None, :]))
                counts += np.bincount(sums, minlength=npts)
            for c, pc in enumerate(parts):
                vals = counts[pc]
                if vals.min() != vals.max():
                    return f"S3: product of classes {a} and {b} is not constant on class {c}"
    return None


def schur_check(ctx: FieldCtx, partition: Sequence) -> bool:
    return schur_violation(ctx, partition) is None


def orbit_partition(table: OrbitTable) -> list[np.ndarray]:
    parts = [np.array([0])]
    for so in table.signed_orbits():
        parts.append(table.orbit(so.sign, so.index))
    return parts


def skew_partition(D: DiffSet) -> list[np.ndarray]:
    """{0}, D, -D; only a partition when SH1 and SH2 hold."""
    return [np.array([0]), D.codes(), (-D).codes()]
