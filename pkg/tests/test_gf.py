from __future__ import annotations

import itertools

import numpy as np
import pytest

from shds.gf import FieldError, is_irreducible, legendre_two, make_field, smallest_irreducible

FIELDS = [(3, 1), (7, 1), (11, 1), (19, 1), (3, 3)]


def poly_mul_oracle(ctx, a, b):
    """Schoolbook product of coefficient vectors reduced by the modulus."""
    p, n, m = ctx.p, ctx.n, ctx.modulus_poly
    da = [(a // p**i) % p for i in range(n)]
    db = [(b // p**i) % p for i in range(n)]
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(2 * n - 2, n - 1, -1):
        c = prod[deg]
        if c:
            for k in range(n + 1):
                prod[deg - n + k] = (prod[deg - n + k] - c * m[k]) % p
    return sum(prod[i] * p**i for i in range(n))


def test_small_fields_squares():
    assert list(make_field(3).squares) == [1]
    assert list(make_field(7).squares) == [1, 2, 4]
    assert len(make_field(3, 3).squares) == 13


def test_squares_match_direct_enumeration():
    for p, n in FIELDS:
        ctx = make_field(p, n)
        direct = sorted({int(ctx.mul(x, x)) for x in range(1, ctx.q)})
        assert list(ctx.squares) == direct


def test_prime_field_ops():
    f7 = make_field(7)
    assert f7.mul(3, 5) == 1
    assert make_field(3).inv(2) == 2
    a = np.arange(7)
    b = np.arange(7)[:, None]
    assert np.array_equal(f7.add(a, b), (a + b) % 7)
    assert np.array_equal(f7.mul(a, b), (a * b) % 7)
    assert np.array_equal(f7.sub(a, b), (a - b) % 7)


def test_gf27_multiplication_against_polynomial_oracle():
    ctx = make_field(3, 3)
    for a in range(27):
        for b in range(27):
            assert ctx.mul(a, b) == poly_mul_oracle(ctx, a, b)


def test_gf27_inverses_exhaustive():
    ctx = make_field(3, 3)
    for a in range(1, 27):
        assert ctx.mul(a, ctx.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        ctx.inv(0)


def test_field_axioms_gf27():
    ctx = make_field(3, 3)
    x = np.arange(27)
    a, b, c = np.meshgrid(x, x, x, indexing="ij")
    assert np.array_equal(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)))
    assert np.array_equal(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)))
    assert np.array_equal(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)))


def test_modulus_is_lex_smallest_irreducible():
    ctx = make_field(3, 3)
    m = ctx.modulus_poly
    assert is_irreducible(list(m), 3)
    assert m == smallest_irreducible(3, 3)
    # a cubic is reducible iff it has a root; scan monic cubics in (c0, c1, c2) order
    first = next(c for c in itertools.product(range(3), repeat=3)
                 if all((c[0] + c[1] * x + c[2] * x * x + x**3) % 3 for x in range(3)))
    assert m == (*first, 1)
    assert not is_irreducible([0, 0, 0, 1], 3)


def test_primitive_element_generates():
    for p, n in FIELDS:
        ctx = make_field(p, n)
        powers = {int(ctx.pow(ctx.primitive, k)) for k in range(ctx.q - 1)}
        assert powers == set(range(1, ctx.q))
        for g in range(1, ctx.primitive):
            assert len({int(ctx.pow(g, k)) for k in range(ctx.q - 1)}) < ctx.q - 1


def test_trace():
    f7 = make_field(7)
    assert all(f7.trace(a) == a for a in range(7))
    ctx = make_field(3, 3)
    assert ctx.trace(0) == 0
    assert np.bincount(ctx.trace(np.arange(27)), minlength=3).tolist() == [9, 9, 9]
    # trace = a + a^3 + a^9 computed by powering
    for a in range(27):
        assert ctx.trace(a) == ctx.add(ctx.add(a, ctx.pow(a, 3)), ctx.pow(a, 9))


def test_is_square():
    assert make_field(3).is_square(2) == -1
    assert make_field(7).is_square(4) == 1
    for p, n in FIELDS:
        ctx = make_field(p, n)
        assert ctx.is_square(ctx.minus_one) == -1
        # Euler's criterion
        for a in range(1, ctx.q):
            euler = ctx.pow(a, (ctx.q - 1) // 2)
            assert (euler == 1) == (ctx.is_square(a) == 1)


def test_legendre_two():
    assert legendre_two(3) == -1
    assert legendre_two(7) == 1
    assert legendre_two(11) == -1
    for p in (3, 7, 11, 19, 23, 31):
        direct = 1 if any((x * x - 2) % p == 0 for x in range(p)) else -1
        assert legendre_two(p) == direct


def test_frobenius():
    ctx = make_field(3, 3)
    x = np.arange(27)
    assert np.array_equal(ctx.frobenius(x, 0), x)
    fixed = [a for a in range(27) if ctx.frobenius(a, 1) == a]
    assert fixed == [0, 1, 2]
    assert np.array_equal(ctx.frobenius(x, 3), x)
    assert all(ctx.frobenius(a, 1) == ctx.pow(a, 3) for a in range(27))
    f7 = make_field(7)
    assert np.array_equal(f7.frobenius(np.arange(7), 0), np.arange(7))


@pytest.mark.parametrize("p,n,code", [
    (5, 1, "p_not_3_mod_4"), (9, 1, "composite_p"), (3, 2, "even_degree"),
    (3, 11, "field_too_large"), (1, 1, "composite_p"),
])
def test_field_errors(p, n, code):
    with pytest.raises(FieldError) as exc:
        make_field(p, n)
    assert exc.value.code == code


def test_info_and_cache():
    ctx = make_field(3, 3)
    assert make_field(3, 3) is ctx
    info = ctx.info()
    assert info["q"] == 27 and info["num_squares"] == 13
    assert ctx.mul(ctx.half, 2) == 1
