from __future__ import annotations

import random

import numpy as np
import pytest

from shds.gf import make_field
from shds.orbits import (
    build_group_A, build_orbit_table, decode, encode, gen_E, generators_SE, index_label,
    mat_det, mat_inv, mat_mul, mat_vec, pairing, parse_index, star, vec_mat, vneg,
)

FIELDS = [(3, 1), (7, 1), (11, 1), (3, 3)]


def closure_orbits(ctx):
    """Orbits of <generators of SE> on V by breadth-first search, no parametrisation used."""
    gens = generators_SE(ctx)
    pts = decode(ctx, np.arange(ctx.q**3))
    images = [encode(ctx, mat_vec(ctx, g, pts)) for g in gens]
    label = np.full(ctx.q**3, -1)
    n = 0
    for start in range(ctx.q**3):
        if label[start] >= 0:
            continue
        label[start] = n
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for img in images:
                    w = int(img[v])
                    if label[w] < 0:
                        label[w] = n
                        nxt.append(w)
            frontier = nxt
        n += 1
    return label


def test_E_basics():
    ctx = make_field(3)
    eye = np.eye(3, dtype=np.int64)
    assert np.array_equal(gen_E(ctx, 0), eye)
    for ctx in (make_field(3), make_field(7), make_field(3, 3)):
        for x in range(ctx.q):
            assert np.array_equal(mat_mul(ctx, gen_E(ctx, x), gen_E(ctx, int(ctx.neg(x)))), eye)
    ctx = make_field(3)
    e1 = gen_E(ctx, 1)
    assert np.array_equal(mat_mul(ctx, e1, mat_mul(ctx, e1, e1)), eye)


def test_E_is_homomorphism():
    ctx = make_field(3, 3)
    for x in range(0, 27, 5):
        for y in range(27):
            assert np.array_equal(mat_mul(ctx, gen_E(ctx, x), gen_E(ctx, y)),
                                  gen_E(ctx, int(ctx.add(x, y))))


def test_group_A():
    a3 = build_group_A(make_field(3))
    assert len(a3) == 3
    ctx = make_field(7)
    a7 = build_group_A(ctx)
    assert len({tuple(m.ravel()) for m in a7}) == 21
    assert any(np.array_equal(m, np.eye(3)) for m in a7)
    ab = mat_mul(ctx, a7[:, None], a7[None, :])
    ba = mat_mul(ctx, a7[None, :], a7[:, None])
    assert np.array_equal(ab, ba)


@pytest.mark.parametrize("p,n", FIELDS)
def test_orbit_sizes(p, n):
    ctx = make_field(p, n)
    table = build_orbit_table(ctx)
    q = ctx.q
    assert table.sizes() == [q * (q - 1) // 2] * (q + 1) + [(q - 1) // 2]
    assert 2 * sum(table.sizes()) == q**3 - 1


def test_q3_sizes_literal():
    assert build_orbit_table(make_field(3)).sizes() == [3, 3, 3, 3, 1]


@pytest.mark.parametrize("p,n", [(3, 1), (7, 1), (3, 3)])
def test_partition_matches_closure(p, n):
    ctx = make_field(p, n)
    table = build_orbit_table(ctx)
    label = closure_orbits(ctx)
    # signed orbits and closure orbits induce the same partition of V
    key = table.index_of * 2 + (table.sign_of == 1)
    key = np.where(table.sign_of == 0, -1, key)
    pairs = set(zip(label.tolist(), key.tolist()))
    assert len(pairs) == len(set(label.tolist())) == len(set(key.tolist()))


def test_locate_examples():
    ctx = make_field(3)
    table = build_orbit_table(ctx)
    assert table.locate(encode(ctx, (1, 0, 0))) == (1, ctx.q + 1)
    assert table.locate(encode(ctx, (0, 2, 0))) == (-1, ctx.q)
    assert table.locate(0) is None


@pytest.mark.parametrize("p,n", [(7, 1), (3, 3)])
def test_locate_invariance_and_negation(p, n):
    ctx = make_field(p, n)
    table = build_orbit_table(ctx)
    rng = random.Random(5)
    group = build_group_A(ctx)
    for _ in range(100):
        v = rng.randrange(1, ctx.q**3)
        s, i = table.locate(v)
        assert table.locate(int(vneg(ctx, v))) == (-s, i)
        g = group[rng.randrange(len(group))]
        gv = int(encode(ctx, mat_vec(ctx, g, decode(ctx, v))))
        assert table.locate(gv) == (s, i)


def test_star():
    ctx = make_field(7)
    v = encode(ctx, (1, 2, 3))
    assert tuple(decode(ctx, star(ctx, v))) == (3, 2, 1)
    codes = np.arange(343)
    assert np.array_equal(star(ctx, star(ctx, codes)), codes)


@pytest.mark.parametrize("p,n", [(3, 1), (7, 1)])
def test_star_intertwines_action(p, n):
    """(g v)* = v* g for g in A: the dual action on row vectors."""
    ctx = make_field(p, n)
    pts = decode(ctx, np.arange(ctx.q**3))
    for g in build_group_A(ctx):
        lhs = star(ctx, encode(ctx, mat_vec(ctx, g, pts)))
        rhs = encode(ctx, vec_mat(ctx, decode(ctx, star(ctx, np.arange(ctx.q**3))), g))
        assert np.array_equal(lhs, rhs)


def test_pairing_bilinear():
    ctx = make_field(3, 3)
    rng = random.Random(1)
    for _ in range(50):
        v, w = rng.randrange(27**3), rng.randrange(27**3)
        direct = 0
        for a, b in zip(decode(ctx, v), decode(ctx, w)):
            direct = ctx.add(direct, ctx.mul(int(a), int(b)))
        assert pairing(ctx, v, w) == direct


def test_matrix_inverse():
    ctx = make_field(3, 3)
    rng = random.Random(2)
    for _ in range(30):
        m = np.array([[rng.randrange(27) for _ in range(3)] for _ in range(3)])
        if mat_det(ctx, m) == 0:
            with pytest.raises(ZeroDivisionError):
                mat_inv(ctx, m)
            continue
        assert np.array_equal(mat_mul(ctx, m, mat_inv(ctx, m)), np.eye(3, dtype=np.int64))


def test_index_labels():
    ctx = make_field(7)
    for idx in range(ctx.q + 2):
        assert parse_index(ctx, index_label(ctx, idx)) == idx
    assert parse_index(ctx, "∞") == 7
    with pytest.raises(ValueError):
        parse_index(ctx, "9")


def test_summary():
    s = build_orbit_table(make_field(3)).summary()
    assert s["total_nonzero"] == 26
    assert [o["index"] for o in s["orbits"]] == ["0", "1", "2", "inf", "dot"]
