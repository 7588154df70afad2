"""Principal character table of the A-orbit Schur ring, by exact summation.

Entries ``[R, O] = sum_{w in O} chi_v(w)`` with ``chi_v(w) = tau(vw)`` and
``v`` any covector in R.  Everything is an exact :class:`CycInt`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cyclotomic import CycInt, as_quad, character_sum, delta, sigma_apply, tau, zeta
from .gf import FieldCtx
from .orbits import OrbitTable, build_orbit_table, index_label, pairing, vneg


def char_value(ctx: FieldCtx, v: int, w: int) -> CycInt:
    """chi_v(w) = tau(vw) for a covector code v and a vector code w."""
    return tau(ctx, pairing(ctx, v, w))


def char_sum(ctx: FieldCtx, v: int, points) -> CycInt:
    """chi_v summed over an array of vector codes."""
    return character_sum(ctx, pairing(ctx, v, np.asarray(points)))


def orbit_char_sum(table: OrbitTable, i: int, j: int, *, rsign: int = 1, osign: int = 1,
                   v: int | None = None) -> CycInt:
    """[rsign*O*_i, osign*O_j] summed directly; v overrides the row representative."""
    ctx = table.ctx
    if v is None:
        v = table.dual_rep(i)
        if rsign == -1:
            v = int(vneg(ctx, v))
    return char_sum(ctx, v, table.orbit(osign, j))


def closed_form(ctx: FieldCtx, i: int, j: int) -> CycInt:
    """Closed-form value of [O*_i, O_j]."""
    q = ctx.q
    inf, dot = q, q + 1
    z = zeta(ctx)
    one = CycInt.from_int(ctx.p, 1)
    if i < q and j < q:
        factor = one + 2 * sigma_apply(ctx, z, 2)
        s = int(ctx.add(i, j))
        if s == 0:
            return (q - 1) // 2 * factor
        return sigma_apply(ctx, z, s) * factor
    half = (q - 1) // 2
    table = {
        ("F", inf): 0, ("F", dot): z,
        (inf, "F"): 0, (inf, inf): q * z, (inf, dot): half,
        (dot, "F"): q * z, (dot, inf): q * half, (dot, dot): half,
    }
    key = ("F" if i < q else i, "F" if j < q else j)
    val = table[key]
    return val if isinstance(val, CycInt) else CycInt.from_int(ctx.p, val)


@dataclass
class CharTable:
    ctx: FieldCtx
    entries: dict[tuple[int, int], CycInt]

    def __getitem__(self, key: tuple[int, int]) -> CycInt:
        return self.entries[key]

    def signed(self, rsign: int, i: int, osign: int, j: int) -> CycInt:
        """[rsign*O*_i, osign*O_j] from the unsigned entries."""
        val = self.entries[(i, j)]
        return val if rsign == osign else val.conj()

    def to_json(self, with_quad: bool = True) -> dict:
        ctx = self.ctx
        size = ctx.q + 2
        rows = []
        for i in range(size):
            for j in range(size):
                val = self.entries[(i, j)]
                cell = {
                    "row": index_label(ctx, i),
                    "col": index_label(ctx, j),
                    "value": val.to_json(),
                }
                if with_quad:
                    qf = as_quad(val, ctx)
                    cell["quad"] = qf.to_json() if qf else None
                    cell["text"] = qf.render() if qf else None
                rows.append(cell)
        return {"p": ctx.p, "n": ctx.n, "q": ctx.q, "entries": rows}

    def to_csv(self) -> str:
        ctx = self.ctx
        size = ctx.q + 2
        labels = [index_label(ctx, k) for k in range(size)]
        lines = ["row," + ",".join(labels)]
        for i in range(size):
            cells = []
            for j in range(size):
                qf = as_quad(self.entries[(i, j)], ctx)
                cells.append(qf.render() if qf else " ".join(map(str, self.entries[(i, j)].coeffs)))
            lines.append(labels[i] + "," + ",".join(f'"{c}"' for c in cells))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=8)
def build_chartable(ctx: FieldCtx) -> CharTable:
    table = build_orbit_table(ctx)
    size = table.size
    entries = {(i, j): orbit_char_sum(table, i, j) for i in range(size) for j in range(size)}
    return CharTable(ctx, entries)


@dataclass
class TableReport:
    q: int
    cells: int
    mismatches: list[dict] = field(default_factory=list)
    reciprocity_failures: list[dict] = field(default_factory=list)
    symmetry: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.reciprocity_failures

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "cells": self.cells,
            "ok": self.ok,
            "mismatches": self.mismatches,
            "reciprocity_failures": self.reciprocity_failures,
            "symmetry": self.symmetry,
        }


def verify_table(ctx: FieldCtx, *, symmetry: bool = True) -> TableReport:
    """Compare every summed entry with its closed form and check reciprocity.

    Reciprocity is checked with denominators cleared:
    ``|O_i| * [O*_i, O_j] == |O_j| * [O*_j, O_i]``.  The sign-symmetry
    variants are evaluated by direct summation over signed orbits and
    reported, not asserted.
    """
    table = build_orbit_table(ctx)
    ct = build_chartable(ctx)
    size = table.size
    rep = TableReport(q=ctx.q, cells=size * size)
    for i in range(size):
        for j in range(size):
            got, want = ct[(i, j)], closed_form(ctx, i, j)
            if got != want:
                rep.mismatches.append({
                    "row": index_label(ctx, i), "col": index_label(ctx, j),
                    "computed": got.to_json(), "expected": want.to_json(),
                })
            lhs = table.orbit_size(i) * ct[(i, j)]
            rhs = table.orbit_size(j) * ct[(j, i)]
            if lhs != rhs:
                rep.reciprocity_failures.append({"row": index_label(ctx, i), "col": index_label(ctx, j)})
    if symmetry:
        rep.symmetry = symmetry_variants(table)
    return rep


def symmetry_variants(table: OrbitTable) -> dict[str, bool]:
    """Which of the sign rules hold for every (i, j), by direct summation."""
    size = table.size
    holds = {"[R,-O]=conj[R,O]": True, "[-R,-O]=[R,O]": True, "[-R,O]=conj[R,O]": True}
    for i in range(size):
        for j in range(size):
            base = orbit_char_sum(table, i, j)
            if orbit_char_sum(table, i, j, osign=-1) != base.conj():
                holds["[R,-O]=conj[R,O]"] = False
            if orbit_char_sum(table, i, j, rsign=-1, osign=-1) != base:
                holds["[-R,-O]=[R,O]"] = False
            if orbit_char_sum(table, i, j, rsign=-1) != base.conj():
                holds["[-R,O]=conj[R,O]"] = False
    return holds


# -- the T matrix ---------------------------------------------------------

@dataclass
class TMatrix:
    ctx: FieldCtx
    entries: list[list[CycInt]]

    def __getitem__(self, key: tuple[int, int]) -> CycInt:
        i, j = key
        return self.entries[i][j]

    def row_permuted(self) -> "TMatrix":
        """T': rows i -> -i for i in F_q; inf and dot rows unchanged."""
        ctx = self.ctx
        order = [int(ctx.neg(i)) for i in range(ctx.q)] + [ctx.q, ctx.q + 1]
        return TMatrix(ctx, [self.entries[r] for r in order])

    def apply(self, eps) -> list[CycInt]:
        """T eps^t for a sign vector over I."""
        out = []
        for row in self.entries:
            acc = CycInt.from_int(self.ctx.p, 0)
            for e, t in zip(eps, row):
                acc = acc + t if e == 1 else acc - t
            out.append(acc)
        return out


def build_T(ctx: FieldCtx) -> TMatrix:
    ct = build_chartable(ctx)
    size = ctx.q + 2
    return TMatrix(ctx, [[ct[(i, j)] - ct[(i, j)].conj() for j in range(size)] for i in range(size)])


def t_closed_form(ctx: FieldCtx, i: int, j: int) -> CycInt:
    """Entry (i, j) of T from the F_q x F_q case analysis (unpermuted rows)."""
    d2 = sigma_apply(ctx, delta(ctx), 2)
    if i < ctx.q and j < ctx.q:
        return (ctx.q - 1) * d2 if ctx.add(i, j) == 0 else -d2
    raise ValueError("only defined on the F_q x F_q block")


def t_prime_closed_form(ctx: FieldCtx, i: int, j: int) -> CycInt:
    """Entry (i, j) of the block matrix T'."""
    q = ctx.q
    d = delta(ctx)
    d2 = sigma_apply(ctx, d, 2)
    zero = CycInt.from_int(ctx.p, 0)
    fi, fj = i < q, j < q
    if fi and fj:
        return (q - 1) * d2 if i == j else -d2
    if fi:
        return zero if j == q else d
    if i == q:
        return q * d if j == q else zero
    return q * d if fj else zero


def verify_T(ctx: FieldCtx) -> list[dict]:
    """Mismatches of T against its F_q-block closed form and of T' against the block form."""
    t = build_T(ctx)
    tp = t.row_permuted()
    size = ctx.q + 2
    bad = []
    for i in range(size):
        for j in range(size):
            if i < ctx.q and j < ctx.q and t[(i, j)] != t_closed_form(ctx, i, j):
                bad.append({"matrix": "T", "row": index_label(ctx, i), "col": index_label(ctx, j)})
            if tp[(i, j)] != t_prime_closed_form(ctx, i, j):
                bad.append({"matrix": "T'", "row": i, "col": j})
            if t[(i, j)].conj() != -t[(i, j)]:
                bad.append({"matrix": "T", "row": i, "col": j, "reason": "not imaginary"})
    return bad
