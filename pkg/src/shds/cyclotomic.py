"""Exact arithmetic in Z[w], w a primitive p-th root of unity.

A :class:`CycInt` stores coordinates in the Z-basis ``w, w^2, ..., w^(p-1)``;
the constant 1 is rewritten as ``-(w + ... + w^(p-1))``.  Coefficients are
Python ints, so no overflow is possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .gf import FieldCtx


def _normalize(full: Iterable[int], p: int) -> tuple[int, ...]:
    """Map a length-p vector over powers w^0..w^(p-1) to basis coordinates."""
    full = list(full)
    c0 = full[0]
    return tuple(int(c) - int(c0) for c in full[1:])


@dataclass(frozen=True)
class CycInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coefficients, got {len(self.coeffs)}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, p: int, value: int) -> "CycInt":
        return cls(p, (-int(value),) * (p - 1))

    @classmethod
    def root(cls, p: int, k: int = 1) -> "CycInt":
        """w^k."""
        full = [0] * p
        full[k % p] = 1
        return cls(p, _normalize(full, p))

    @classmethod
    def from_exponent_counts(cls, counts: Iterable[int]) -> "CycInt":
        """sum_t counts[t] * w^t for a length-p count vector."""
        counts = [int(c) for c in counts]
        return cls(len(counts), _normalize(counts, len(counts)))

    def full(self) -> list[int]:
        """Coordinates over w^0..w^(p-1) with a zero constant term."""
        return [0, *self.coeffs]

    # -- ring operations --------------------------------------------------

    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError(f"mixed cyclotomic orders {self.p} and {other.p}")
            return other
        if isinstance(other, (int, np.integer)):
            return CycInt.from_int(self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        out = [0] * p
        a, b = self.full(), other.full()
        for i in range(1, p):
            ai = a[i]
            if ai:
                for j in range(1, p):
                    if b[j]:
                        out[(i + j) % p] += ai * b[j]
        return CycInt(p, _normalize(out, p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not defined in Z[w]")
        result = CycInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = CycInt.from_int(self.p, int(other))
        if not isinstance(other, CycInt):
            return NotImplemented
        if other.p != self.p:
            raise ValueError(f"mixed cyclotomic orders {self.p} and {other.p}")
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def conj(self) -> "CycInt":
        """Complex conjugation w^k -> w^(p-k)."""
        return CycInt(self.p, tuple(reversed(self.coeffs)))

    def galois(self, a: int) -> "CycInt":
        """The automorphism w -> w^a for a unit a mod p."""
        p = self.p
        if a % p == 0:
            raise ValueError("Galois exponent must be a unit mod p")
        out = [0] * p
        for k, c in enumerate(self.full()):
            out[(k * a) % p] += c
        return CycInt(p, _normalize(out, p))

    def as_int(self) -> Optional[int]:
        """The rational integer this equals, if any."""
        if len(set(self.coeffs)) == 1:
            return -self.coeffs[0]
        return None

    def to_complex(self) -> complex:
        w = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return complex(np.dot(self.full(), w))

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> "CycInt":
        return cls(int(obj["p"]), tuple(int(c) for c in obj["coeffs"]))

    def __repr__(self):
        return f"CycInt(p={self.p}, {list(self.coeffs)})"


Number = Union[CycInt, int]


def conj(x: CycInt) -> CycInt:
    return x.conj()


def sigma_apply(ctx: FieldCtx, x: CycInt, a: int) -> CycInt:
    """x^sigma(a): identity when a is a nonzero square, conjugation otherwise."""
    flag = ctx.is_square(a)
    if flag == 0:
        raise ValueError("sigma(a) is undefined for a = 0")
    return x if flag == 1 else x.conj()


def tau(ctx: FieldCtx, a: int) -> CycInt:
    """Additive character w^tr(a)."""
    return CycInt.root(ctx.p, ctx.trace(a))


def character_sum(ctx: FieldCtx, values) -> CycInt:
    """sum of tau(x) over an array of field elements (with multiplicity)."""
    tr = ctx.trace_table[np.asarray(values, dtype=np.int64).ravel()]
    return CycInt.from_exponent_counts(np.bincount(tr, minlength=ctx.p))


def zeta(ctx: FieldCtx) -> CycInt:
    """Gauss period: sum of tau over the nonzero squares."""
    return character_sum(ctx, ctx.squares)


def delta(ctx: FieldCtx) -> CycInt:
    z = zeta(ctx)
    return z - z.conj()


@dataclass(frozen=True)
class QuadForm:
    """a + b*zeta."""

    a: int
    b: int

    def to_cyc(self, ctx: FieldCtx) -> CycInt:
        return self.a + self.b * zeta(ctx)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b}

    def render(self) -> str:
        if self.b == 0:
            return str(self.a)
        zpart = "ζ" if self.b == 1 else ("-ζ" if self.b == -1 else f"{self.b}·ζ")
        if self.a == 0:
            return zpart
        if zpart.startswith("-"):
            return f"{self.a}{zpart}"
        return f"{self.a}+{zpart}"


def as_quad(x: CycInt, ctx: FieldCtx) -> Optional[QuadForm]:
    """Write x = a + b*zeta with integer a, b, or return None."""
    z = zeta(ctx).coeffs
    xs = x.coeffs
    k1 = 0
    k2 = next((k for k in range(1, len(z)) if z[k] != z[k1]), None)
    if k2 is None:
        raise AssertionError("zeta has constant coordinates")
    num = xs[k1] - xs[k2]
    den = z[k1] - z[k2]
    if num % den:
        return None
    b = num // den
    a = b * z[k1] - xs[k1]
    qf = QuadForm(a, b)
    return qf if qf.to_cyc(ctx) == x else None
