"""Bounded coefficient sequences used by diagonal, shift and banded operators.

Each law knows its first terms, a sup bound and its generating function
G(t) = sum_n a_n t^n for |t| < 1; the closed-form Berezin values are built
from G, while the series oracle only ever uses the terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SequenceLaw:
    def values(self, n: int) -> np.ndarray:
        """The first n terms a_0, ..., a_{n-1}."""
        raise NotImplementedError

    def generating(self, t):
        raise NotImplementedError

    def bound(self) -> float:
        raise NotImplementedError

    def is_nonnegative(self) -> bool:
        return False


def _c(x) -> complex:
    return complex(x)


@dataclass(frozen=True)
class MonomialAtK(SequenceLaw):
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("k must be a non-negative integer")
        object.__setattr__(self, "k", int(self.k))

    def values(self, n):
        out = np.zeros(n, dtype=complex)
        if self.k < n:
            out[self.k] = 1.0
        return out

    def generating(self, t):
        return np.asarray(t, dtype=complex) ** self.k

    def bound(self):
        return 1.0

    def is_nonnegative(self):
        return True


@dataclass(frozen=True)
class Alternating(SequenceLaw):
    """a, b, a, b, ..."""

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("alternating law requires a, b >= 0")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def values(self, n):
        out = np.full(n, self.a, dtype=complex)
        out[1::2] = self.b
        return out

    def generating(self, t):
        t = np.asarray(t, dtype=complex)
        return (self.a + self.b * t) / ((1.0 - t) * (1.0 + t))

    def bound(self):
        return max(self.a, self.b)

    def is_nonnegative(self):
        return True


@dataclass(frozen=True)
class Geometric(SequenceLaw):
    """beta^n with |beta| < 1."""

    beta: complex

    def __post_init__(self):
        beta = _c(self.beta)
        if not abs(beta) < 1.0:
            raise ValueError("geometric law requires |beta| < 1")
        object.__setattr__(self, "beta", beta)

    def values(self, n):
        return np.power(self.beta, np.arange(n))

    def generating(self, t):
        return 1.0 / (1.0 - self.beta * np.asarray(t, dtype=complex))

    def bound(self):
        return 1.0

    def is_nonnegative(self):
        return self.beta.imag == 0 and self.beta.real >= 0


@dataclass(frozen=True)
class PowersOfI(SequenceLaw):
    def values(self, n):
        return np.array([1, 1j, -1, -1j], dtype=complex)[np.arange(n) % 4]

    def generating(self, t):
        return 1.0 / (1.0 - 1j * np.asarray(t, dtype=complex))

    def bound(self):
        return 1.0


@dataclass(frozen=True)
class ExplicitList(SequenceLaw):
    """Finitely many terms, zero afterwards."""

    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(_c(v) for v in self.items))

    def values(self, n):
        out = np.zeros(n, dtype=complex)
        m = min(n, len(self.items))
        out[:m] = self.items[:m]
        return out

    def generating(self, t):
        t = np.asarray(t, dtype=complex)
        if not self.items:
            return np.zeros_like(t)
        return np.polynomial.polynomial.polyval(t, np.array(self.items))

    def bound(self):
        return max((abs(v) for v in self.items), default=0.0)

    def is_nonnegative(self):
        return all(v.imag == 0 and v.real >= 0 for v in self.items)


@dataclass(frozen=True)
class Combination(SequenceLaw):
    """sum_i c_i * law_i + const (the constant sequence)."""

    terms: tuple
    const: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((_c(c), law) for c, law in self.terms))
        object.__setattr__(self, "const", _c(self.const))

    def values(self, n):
        out = np.full(n, self.const, dtype=complex)
        for c, law in self.terms:
            out += c * law.values(n)
        return out

    def generating(self, t):
        t = np.asarray(t, dtype=complex)
        out = self.const / (1.0 - t)
        for c, law in self.terms:
            out = out + c * law.generating(t)
        return out

    def bound(self):
        return sum(abs(c) * law.bound() for c, law in self.terms) + abs(self.const)

    def is_nonnegative(self):
        nonneg = lambda z: z.imag == 0 and z.real >= 0  # noqa: E731
        return nonneg(self.const) and all(nonneg(c) and law.is_nonnegative() for c, law in self.terms)


def affine_law(law: SequenceLaw, a, b) -> Combination:
    """The law a * law + b."""
    return Combination(((a, law),), b)
