from __future__ import annotations

import io
import itertools

import numpy as np
import pytest

from shds.design import (
    DesignError, block_intersections, build_design, export_incidence, iter_incidence,
    pair_counts_from_differences, verify_2design,
)
from shds.diffsets import DiffSet, EpsFn, all_eps, build_D, filter_theorem, iter_valid
from shds.gf import make_field
from shds.orbits import build_orbit_table, vadd


def literal_pair_lambda(design):
    """Blocks through every pair of points, counted one pair at a time."""
    inc = design.incidence
    counts = set()
    for x, y in itertools.combinations(range(design.v), 2):
        counts.add(int(np.count_nonzero(inc[:, x] & inc[:, y])))
    return counts


def test_blocks_q3():
    ctx = make_field(3)
    table = build_orbit_table(ctx)
    D = build_D(table, EpsFn.from_bits("00101"))
    des = build_design(D)
    assert des.num_blocks == 27 and des.v == 27
    assert np.array_equal(des.block(0), D.codes())
    assert set(des.incidence.sum(axis=1).tolist()) == {13}
    # translating by u permutes blocks: (D + w) + u = D + (w + u)
    for u in (1, 5, 26):
        for w in range(27):
            moved = np.sort(vadd(ctx, des.block(w), u))
            assert np.array_equal(moved, des.block(int(vadd(ctx, w, u))))


def test_every_valid_eps_q3_is_2_27_13_6():
    ctx = make_field(3)
    table = build_orbit_table(ctx)
    for e in iter_valid(ctx):
        des = build_design(build_D(table, e))
        chk = verify_2design(des)
        assert (chk.ok, chk.v, chk.k, chk.lam) == (True, 27, 13, 6)
        assert verify_2design(des, full=True).lam == 6
        assert literal_pair_lambda(des) == {6}
        inter = block_intersections(des)
        off = inter[~np.eye(27, dtype=bool)]
        assert set(off.tolist()) == {6}


def test_invalid_eps_fails_with_witness():
    ctx = make_field(3)
    table = build_orbit_table(ctx)
    checked = 0
    for e in all_eps(3):
        if filter_theorem(e, ctx):
            continue
        D = build_D(table, e)
        try:
            des = build_design(D)
        except DesignError:
            continue
        chk = verify_2design(des)
        assert not chk.ok
        x, y = chk.witness
        inc = des.incidence
        assert np.count_nonzero(inc[:, x] & inc[:, y]) != 6
        assert not verify_2design(des, full=True).ok
        checked += 1
    assert checked == 20


def test_q7_designs():
    ctx = make_field(7)
    table = build_orbit_table(ctx)
    for e in list(iter_valid(ctx))[:10]:
        des = build_design(build_D(table, e))
        chk = verify_2design(des)
        assert (chk.ok, chk.v, chk.k, chk.lam) == (True, 343, 171, 85)
        col = des.incidence.sum(axis=0)
        assert set(col.tolist()) == {171}


def test_pair_counts_from_differences():
    ctx = make_field(3)
    D = build_D(build_orbit_table(ctx), EpsFn.from_bits("00101"))
    des = build_design(D)
    through0 = des.incidence[:, 0].astype(int) @ des.incidence.astype(int)
    assert np.array_equal(pair_counts_from_differences(D)[1:], through0[1:])


def test_repeated_blocks_rejected():
    ctx = make_field(3)
    plane = DiffSet.from_codes(ctx, np.arange(9))  # a subgroup is fixed by its own translations
    with pytest.raises(DesignError):
        build_design(plane)


def test_export_formats():
    ctx = make_field(3)
    des = build_design(build_D(build_orbit_table(ctx), EpsFn.from_bits("00101")))
    buf = io.StringIO()
    assert export_incidence(des, "dense01", buf) == 27
    rows = buf.getvalue().splitlines()
    assert all(len(r) == 27 and r.count("1") == 13 for r in rows)
    sparse = list(iter_incidence(des, "sparse"))
    assert len(sparse) == 27
    assert [int(c) for c in sparse[0].split()] == des.block(0).tolist()
    with pytest.raises(ValueError):
        list(iter_incidence(des, "xml"))
