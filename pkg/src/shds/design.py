"""Translation designs des(V, D) = {D + w : w in V} and their 2-design check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterator, Optional

import numpy as np

from .diffsets import DiffSet, difference_counts
from .gf import FieldCtx
from .orbits import vadd


class DesignError(RuntimeError):
    pass


@dataclass
class Design:
    """Incidence matrix with rows = blocks D + w (w in code order), columns = points."""

    ctx: FieldCtx
    base: DiffSet
    incidence: np.ndarray

    @property
    def v(self) -> int:
        return self.incidence.shape[1]

    @property
    def num_blocks(self) -> int:
        return self.incidence.shape[0]

    def block(self, w: int) -> np.ndarray:
        return np.flatnonzero(self.incidence[w])


def build_design(D: DiffSet) -> Design:
    """All translates D + w; raises if two blocks coincide."""
    ctx = D.ctx
    npts = ctx.q**3
    d = D.codes()
    w = np.arange(npts)
    blocks = vadd(ctx, w[:, None], d[None, :])
    inc = np.zeros((npts, npts), dtype=bool)
    inc[np.repeat(w, len(d)), np.ravel(blocks)] = True
    packed = np.packbits(inc, axis=1)
    if len(np.unique(packed, axis=0)) != npts:
        raise DesignError("repeated blocks: D has a nontrivial translation stabilizer")
    return Design(ctx, D, inc)


@dataclass
class DesignCheck:
    ok: bool
    v: int
    k: Optional[int]
    lam: Optional[int]
    witness: Optional[tuple[int, int]] = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "ok": self.ok, "v": self.v, "k": self.k, "lambda": self.lam,
            "witness": list(self.witness) if self.witness else None, "reason": self.reason,
        }


def _translation_closed(design: Design) -> bool:
    """Every block is the translate of block 0: x + w lies in block w iff x lies in block 0."""
    ctx = design.ctx
    pts = np.arange(design.v)
    shifted = vadd(ctx, pts[None, :], pts[:, None])
    inc = design.incidence
    return bool(np.array_equal(np.take_along_axis(inc, shifted, axis=1),
                               np.broadcast_to(inc[0], inc.shape)))


def verify_2design(design: Design, *, full: bool = False) -> DesignCheck:
    """Check that every pair of distinct points lies in exactly lam blocks.

    The number of blocks through {x, y} depends only on y - x in a
    translation design, so the default path counts blocks through {0, g}
    for every g.  ``full`` computes all pair counts from the incidence matrix.
    """
    inc = design.incidence
    npts = design.v
    sizes = inc.sum(axis=1)
    k = int(sizes[0])
    if np.any(sizes != k):
        bad = int(np.flatnonzero(sizes != k)[0])
        return DesignCheck(False, npts, None, None, reason=f"block {bad} has size {int(sizes[bad])}")
    lam_expected = k * (k - 1) // (npts - 1) if (k * (k - 1)) % (npts - 1) == 0 else None
    if full:
        m = inc.astype(np.int64)
        pairs = m.T @ m
        off = pairs[~np.eye(npts, dtype=bool)]
        lam = int(off[0])
        if lam_expected is None or np.any(off != lam_expected):
            target = lam_expected if lam_expected is not None else lam
            bad = np.argwhere((pairs != target) & ~np.eye(npts, dtype=bool))
            x, y = (int(t) for t in bad[0])
            return DesignCheck(False, npts, k, None, (x, y), f"pair count {int(pairs[x, y])}")
        return DesignCheck(True, npts, k, lam)
    if not _translation_closed(design):
        return DesignCheck(False, npts, k, None, reason="blocks are not the translates of D")
    through0 = inc[:, 0].astype(np.int64)
    counts = through0 @ inc.astype(np.int64)
    off = counts[1:]
    if lam_expected is None or np.any(off != lam_expected):
        target = lam_expected if lam_expected is not None else int(off[0])
        g = int(np.flatnonzero(off != target)[0]) + 1
        return DesignCheck(False, npts, k, None, (0, g), f"pair count {int(counts[g])}")
    return DesignCheck(True, npts, k, lam_expected)


def block_intersections(design: Design) -> np.ndarray:
    """|B_i ∩ B_j| for all block pairs."""
    m = design.incidence.astype(np.int64)
    return m @ m.T


def pair_counts_from_differences(D: DiffSet) -> np.ndarray:
    """Blocks through {0, g} equal #{(d, d') : d - d' = g}."""
    return difference_counts(D.ctx, D.mask)


def iter_incidence(design: Design, fmt: str) -> Iterator[str]:
    if fmt == "dense01":
        for row in design.incidence:
            yield "".join("1" if b else "0" for b in row) + "\n"
    elif fmt == "sparse":
        for row in design.incidence:
            yield " ".join(str(int(c)) for c in np.flatnonzero(row)) + "\n"
    else:
        raise ValueError(f"unknown incidence format {fmt!r}")


def export_incidence(design: Design, fmt: str, out: IO[str]) -> int:
    """Write the incidence structure; returns the number of lines written."""
    count = 0
    for line in iter_incidence(design, fmt):
        out.write(line)
        count += 1
    return count

