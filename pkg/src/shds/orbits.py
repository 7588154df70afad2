"""The space V = F_q^3, the group A = ES, and its signed orbits.

Points of V (and covectors of V*) are encoded as ``w1 + q*w2 + q^2*w3``.
The orbit index set I = F_q + {inf, dot} is laid out as integers:
``0..q-1`` for Fin(i) (by field encoding), ``q`` for inf, ``q+1`` for dot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .gf import FieldCtx


class OrbitError(RuntimeError):
    pass


class SignedOrbit(NamedTuple):
    sign: int
    index: int


def inf_index(ctx: FieldCtx) -> int:
    return ctx.q


def dot_index(ctx: FieldCtx) -> int:
    return ctx.q + 1


def index_label(ctx: FieldCtx, idx: int) -> str:
    if idx == ctx.q:
        return "inf"
    if idx == ctx.q + 1:
        return "dot"
    return str(idx)


def parse_index(ctx: FieldCtx, label: str) -> int:
    if label in ("inf", "∞"):
        return ctx.q
    if label in ("dot", "•"):
        return ctx.q + 1
    idx = int(label)
    if not 0 <= idx < ctx.q:
        raise ValueError(f"orbit index {label!r} out of range")
    return idx


# -- vectors --------------------------------------------------------------

def encode(ctx: FieldCtx, coords) -> np.ndarray | int:
    """coords[..., 3] -> point codes."""
    c = np.asarray(coords, dtype=np.int64)
    code = c[..., 0] + ctx.q * c[..., 1] + ctx.q * ctx.q * c[..., 2]
    return int(code) if code.ndim == 0 else code


def decode(ctx: FieldCtx, codes) -> np.ndarray:
    """point codes -> coords[..., 3]."""
    c = np.asarray(codes, dtype=np.int64)
    q = ctx.q
    return np.stack([c % q, (c // q) % q, c // (q * q)], axis=-1)


def all_points(ctx: FieldCtx) -> np.ndarray:
    return np.arange(ctx.q**3, dtype=np.int64)


def vadd(ctx: FieldCtx, a, b):
    return encode(ctx, ctx.add(decode(ctx, a), decode(ctx, b)))


def vneg(ctx: FieldCtx, a):
    return encode(ctx, ctx.neg(decode(ctx, a)))


def vsub(ctx: FieldCtx, a, b):
    return encode(ctx, ctx.sub(decode(ctx, a), decode(ctx, b)))


def vscale(ctx: FieldCtx, s, a):
    return encode(ctx, ctx.mul(s, decode(ctx, a)))


def star(ctx: FieldCtx, codes):
    """(w1, w2, w3)^t <-> (w3, w2, w1); an involution between V and V*."""
    return encode(ctx, decode(ctx, codes)[..., ::-1])


def pairing(ctx: FieldCtx, v, w):
    """vw = v1*w1 + v2*w2 + v3*w3 for covector codes v and vector codes w."""
    return ctx.sum(ctx.mul(decode(ctx, v), decode(ctx, w)), axis=-1)


# -- 3x3 matrices over F_q ------------------------------------------------

def identity(ctx: FieldCtx) -> np.ndarray:
    return np.eye(3, dtype=np.int64)


def mat(rows) -> np.ndarray:
    return np.asarray(rows, dtype=np.int64).reshape(3, 3)


def mat_mul(ctx: FieldCtx, a, b) -> np.ndarray:
    """Matrix product over F_q; broadcasts over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    prod = ctx.mul(a[..., :, :, None], b[..., None, :, :])
    return np.asarray(ctx.sum(prod, axis=-2))


def mat_vec(ctx: FieldCtx, m, coords) -> np.ndarray:
    """M @ v over F_q; broadcasts over leading axes."""
    m = np.asarray(m)
    v = np.asarray(coords)
    return np.asarray(ctx.sum(ctx.mul(m, v[..., None, :]), axis=-1))


def vec_mat(ctx: FieldCtx, coords, m) -> np.ndarray:
    """Row vector times matrix."""
    m = np.asarray(m)
    v = np.asarray(coords)
    return np.asarray(ctx.sum(ctx.mul(v[..., :, None], m), axis=-2))


def mat_det(ctx: FieldCtx, m) -> int:
    m = np.asarray(m)
    f = ctx
    t1 = f.mul(m[0, 0], f.sub(f.mul(m[1, 1], m[2, 2]), f.mul(m[1, 2], m[2, 1])))
    t2 = f.mul(m[0, 1], f.sub(f.mul(m[1, 0], m[2, 2]), f.mul(m[1, 2], m[2, 0])))
    t3 = f.mul(m[0, 2], f.sub(f.mul(m[1, 0], m[2, 1]), f.mul(m[1, 1], m[2, 0])))
    return int(f.add(f.sub(t1, t2), t3))


def mat_inv(ctx: FieldCtx, m) -> np.ndarray:
    m = np.asarray(m)
    det = mat_det(ctx, m)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    f = ctx
    cof = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != i]
            c = [x for x in range(3) if x != j]
            minor = f.sub(f.mul(m[r[0], c[0]], m[r[1], c[1]]), f.mul(m[r[0], c[1]], m[r[1], c[0]]))
            cof[i, j] = minor if (i + j) % 2 == 0 else f.neg(minor)
    return np.asarray(f.mul(cof.T, f.inv(det)))


def mat_key(m) -> tuple[int, ...]:
    return tuple(int(x) for x in np.asarray(m).ravel())


# -- the groups E, S, A ---------------------------------------------------

def gen_E(ctx: FieldCtx, x: int) -> np.ndarray:
    """Unitriangular E(x) with entries x, x and x^2/2."""
    half_sq = ctx.mul(ctx.mul(x, x), ctx.half)
    return mat([[1, x, half_sq], [0, 1, x], [0, 0, 1]])


def gen_S(ctx: FieldCtx, s: int) -> np.ndarray:
    if ctx.is_square(s) != 1:
        raise ValueError(f"{s} is not a nonzero square")
    return mat([[s, 0, 0], [0, s, 0], [0, 0, s]])


def build_group_A(ctx: FieldCtx) -> np.ndarray:
    """All q(q-1)/2 matrices s*E(x), stacked as an (N, 3, 3) array."""
    xs = np.arange(ctx.q)
    es = np.stack([gen_E(ctx, int(x)) for x in xs])
    ss = np.stack([gen_S(ctx, int(s)) for s in ctx.squares])
    return mat_mul(ctx, ss[:, None], es[None, :]).reshape(-1, 3, 3)


def generators_SE(ctx: FieldCtx) -> list[np.ndarray]:
    """Generators of A = SE: E(p^k) over the additive basis, and one square generating S."""
    gens = [gen_E(ctx, ctx.p**k) for k in range(ctx.n)]
    if len(ctx.squares) > 1:
        gens.append(gen_S(ctx, int(ctx.mul(ctx.primitive, ctx.primitive))))
    return gens


# -- orbit table ----------------------------------------------------------

def orbit_rep(ctx: FieldCtx, idx: int) -> tuple[int, int, int]:
    """Canonical representative of O_idx as a column (w1, w2, w3)."""
    if idx == ctx.q:
        return (0, 1, 0)
    if idx == ctx.q + 1:
        return (1, 0, 0)
    return (idx, 0, 1)


def explicit_orbit(ctx: FieldCtx, idx: int) -> np.ndarray:
    """Sorted codes of O_idx from the closed (x, s) parametrisations."""
    x, s = np.meshgrid(np.arange(ctx.q), ctx.squares, indexing="ij")
    x, s = x.ravel(), s.ravel()
    if idx == ctx.q:
        pts = np.stack([x, s, np.zeros_like(x)], axis=-1)
    elif idx == ctx.q + 1:
        s = ctx.squares
        pts = np.stack([s, np.zeros_like(s), np.zeros_like(s)], axis=-1)
    else:
        top = ctx.mul(s, ctx.add(ctx.mul(ctx.mul(x, x), ctx.half), idx))
        pts = np.stack([top, ctx.mul(s, x), s], axis=-1)
    return np.unique(encode(ctx, pts))


@dataclass
class OrbitTable:
    ctx: FieldCtx
    index_of: np.ndarray
    sign_of: np.ndarray
    members: list[np.ndarray]
    reps: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        """|I| = q + 2."""
        return self.ctx.q + 2

    def locate(self, code: int) -> Optional[SignedOrbit]:
        """Signed orbit of a point, or None for the zero vector."""
        s = int(self.sign_of[code])
        if s == 0:
            return None
        return SignedOrbit(s, int(self.index_of[code]))

    def locate_many(self, codes) -> tuple[np.ndarray, np.ndarray]:
        codes = np.asarray(codes)
        return self.sign_of[codes], self.index_of[codes]

    def locate_dual(self, covector: int) -> Optional[SignedOrbit]:
        """Signed dual orbit O*_i containing a covector."""
        return self.locate(int(star(self.ctx, covector)))

    def orbit(self, sign: int, idx: int) -> np.ndarray:
        pts = self.members[idx]
        return pts if sign == 1 else np.sort(vneg(self.ctx, pts))

    def dual_rep(self, idx: int) -> int:
        """Covector representative of O*_idx: the star of the orbit representative."""
        return int(star(self.ctx, self.reps[idx]))

    def orbit_size(self, idx: int) -> int:
        return len(self.members[idx])

    def sizes(self) -> list[int]:
        return [len(m) for m in self.members]

    def signed_orbits(self):
        for idx in range(self.size):
            for sign in (1, -1):
                yield SignedOrbit(sign, idx)

    def summary(self) -> dict:
        ctx = self.ctx
        return {
            "p": ctx.p,
            "n": ctx.n,
            "q": ctx.q,
            "orbits": [
                {
                    "index": index_label(ctx, idx),
                    "size": self.orbit_size(idx),
                    "representative": [int(c) for c in decode(ctx, self.reps[idx])],
                }
                for idx in range(self.size)
            ],
            "total_nonzero": 2 * sum(self.sizes()),
        }


def _build(ctx: FieldCtx) -> OrbitTable:
    q = ctx.q
    npts = q**3
    group = build_group_A(ctx)
    index_of = np.full(npts, -1, dtype=np.int64)
    sign_of = np.zeros(npts, dtype=np.int8)
    members, reps = [], []
    for idx in range(q + 2):
        rep = np.array(orbit_rep(ctx, idx))
        pts = np.unique(encode(ctx, mat_vec(ctx, group, rep)))
        if not np.array_equal(pts, explicit_orbit(ctx, idx)):
            raise OrbitError(f"orbit {index_label(ctx, idx)} disagrees with its parametrisation")
        for sign, cur in ((1, pts), (-1, vneg(ctx, pts))):
            if np.any(sign_of[cur] != 0):
                raise OrbitError(f"point lies in two orbits (index {index_label(ctx, idx)})")
            index_of[cur] = idx
            sign_of[cur] = sign
        members.append(pts)
        reps.append(int(encode(ctx, rep)))
    if sign_of[0] != 0 or np.count_nonzero(sign_of) != npts - 1:
        raise OrbitError("signed orbits do not partition V minus 0")
    for arr in (index_of, sign_of, *members):
        arr.setflags(write=False)
    return OrbitTable(ctx, index_of, sign_of, members, reps)


@lru_cache(maxsize=16)
def build_orbit_table(ctx: FieldCtx) -> OrbitTable:
    return _build(ctx)
