"""Table-driven arithmetic in GF(p^n) for p = 3 (mod 4) and odd n.

Elements are encoded as integers ``sum(c_i * p**i)`` where ``c_i`` are the
coefficients over the polynomial basis ``1, x, ..., x^(n-1)``.  Under this
encoding the prime subfield is exactly ``{0, ..., p-1}``.

Every elementwise method accepts either a Python int or a numpy integer
array and returns the same shape.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Sequence

import numpy as np

MAX_ORDER = 2**16

SQUARE = 1
NONSQUARE = -1
ZERO = 0


class FieldError(ValueError):
    """Invalid field parameters.  ``code`` identifies the failed precondition."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


def legendre_two(p: int) -> int:
    """Legendre symbol (2/p) for an odd prime p."""
    if p % 2 == 0 or not is_prime(p):
        raise FieldError("composite_p", f"p={p} is not an odd prime")
    return 1 if p % 8 in (1, 7) else -1


# -- polynomial helpers over F_p (little-endian coefficient lists) ---------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, m, p)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Lex-smallest monic irreducible of degree n, compared on (c_0, ..., c_{n-1})."""
    for low in itertools.product(range(p), repeat=n):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """Immutable arithmetic context for GF(p^n)."""

    def __init__(self, p: int, n: int):
        if not isinstance(p, int) or not is_prime(p):
            raise FieldError("composite_p", f"p={p} is not prime")
        if p % 4 != 3:
            raise FieldError("p_not_3_mod_4", f"p={p} is not congruent to 3 mod 4")
        if n < 1 or n % 2 == 0:
            raise FieldError("even_degree", f"n={n} must be a positive odd integer")
        if p**n > MAX_ORDER:
            raise FieldError("field_too_large", f"q={p}**{n} exceeds the table limit {MAX_ORDER}")
        self.p = p
        self.n = n
        self.q = q = p**n
        self.modulus_poly = smallest_irreducible(p, n)
        self.powers = p ** np.arange(n, dtype=np.int64)
        self.digits = np.array(
            [[(a // p**i) % p for i in range(n)] for a in range(q)], dtype=np.int64
        ).reshape(q, n)

        self.primitive, exp = self._find_primitive()
        self.exp_table = np.array(exp + exp, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        log[self.exp_table[: q - 1]] = np.arange(q - 1)
        self.log_table = log

        neg = ((-self.digits) % p) @ self.powers
        self.neg_table = neg.astype(np.int64)
        flags = np.where(log % 2 == 0, SQUARE, NONSQUARE).astype(np.int8)
        flags[0] = ZERO
        self.square_flags = flags
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = self.exp_table[(log[1:] * p) % (q - 1)]
        self.frob_table = frob
        tr = np.arange(q, dtype=np.int64)
        acc = tr.copy()
        img = tr.copy()
        for _ in range(n - 1):
            img = frob[img]
            acc = self.add(acc, img)
        self.trace_table = acc
        for arr in (self.exp_table, self.log_table, self.neg_table, self.square_flags,
                    self.frob_table, self.trace_table, self.digits, self.powers):
            arr.setflags(write=False)
        self.squares = np.flatnonzero(flags == SQUARE)
        self.nonsquares = np.flatnonzero(flags == NONSQUARE)
        self.squares.setflags(write=False)
        self.nonsquares.setflags(write=False)

    def _encode(self, coeffs: Sequence[int]) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(coeffs))

    def _find_primitive(self) -> tuple[int, list[int]]:
        p, q, m = self.p, self.q, self.modulus_poly
        for g in range(1, q):
            gpoly = _poly_trim([int(c) for c in self.digits[g]])
            exp = [1]
            cur = [1]
            for _ in range(q - 2):
                cur = _poly_mulmod(cur, gpoly, m, p)
                code = self._encode(cur)
                if code == 1:
                    break
                exp.append(code)
            else:
                return g, exp
        raise AssertionError("multiplicative group has no generator")  # unreachable

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, n={self.n})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self) -> int:
        return hash((self.p, self.n))

    # -- elementwise arithmetic -------------------------------------------

    def add(self, a, b):
        if self.n == 1:
            return _out((np.asarray(a) + b) % self.p)
        return _out(((self.digits[a] + self.digits[b]) % self.p) @ self.powers)

    def sum(self, a, axis: int = 0):
        """Field sum of an array along ``axis``."""
        a = np.asarray(a)
        axis = axis % a.ndim
        if self.n == 1:
            return _out(a.sum(axis=axis) % self.p)
        return _out((self.digits[a].sum(axis=axis) % self.p) @ self.powers)

    def neg(self, a):
        return _out(self.neg_table[a])

    def sub(self, a, b):
        return self.add(a, self.neg_table[b])

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        r = self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]
        return _out(np.where((a == 0) | (b == 0), 0, r))

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return _out(self.exp_table[(-self.log_table[a]) % (self.q - 1)])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        a = np.asarray(a)
        if e < 0:
            a = np.asarray(self.inv(a))
            e = -e
        if e == 0:
            return _out(np.ones_like(a))
        r = self.exp_table[(self.log_table[a] * e) % (self.q - 1)]
        return _out(np.where(a == 0, 0, r))

    def trace(self, a):
        """Absolute trace to F_p; the result is an F_p value in 0..p-1."""
        return _out(self.trace_table[a])

    def is_square(self, a):
        """1 for nonzero squares, -1 for nonsquares, 0 for zero."""
        return _out(self.square_flags[a])

    def frobenius(self, a, k: int = 1):
        """a -> a**(p**k)."""
        k %= self.n
        a = np.asarray(a)
        if k == 0:
            return _out(a.copy())
        r = self.exp_table[(self.log_table[a] * self.p**k) % (self.q - 1)]
        return _out(np.where(a == 0, 0, r))

    def element(self, coeffs: Sequence[int]) -> int:
        """Encode a coefficient vector (little-endian) as a field element."""
        if len(coeffs) > self.n:
            raise ValueError("too many coefficients")
        return self._encode([c % self.p for c in coeffs])

    def elements(self) -> range:
        return range(self.q)

    @cached_property
    def half(self) -> int:
        return int(self.inv(2))

    @cached_property
    def minus_one(self) -> int:
        return int(self.neg(1))

    def info(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "q": self.q,
            "modulus_poly": list(self.modulus_poly),
            "primitive_element": self.primitive,
            "num_squares": int(len(self.squares)),
            "legendre_two": legendre_two(self.p),
        }


def _out(x):
    x = np.asarray(x)
    return int(x) if x.ndim == 0 else x


_CACHE: dict[tuple[int, int], FieldCtx] = {}


def make_field(p: int, n: int = 1) -> FieldCtx:
    """Return the (cached) field context for GF(p^n)."""
    key = (p, n)
    if key not in _CACHE:
        _CACHE[key] = FieldCtx(p, n)
    return _CACHE[key]
