"""Operator classes on H^2(D) with two independent evaluation routes.

``closed`` evaluates <T k̂_{w1}, k̂_{w2}> from a closed formula valid on
constrained pairs; the series oracle instead applies the operator to the
truncated Taylor coefficients of k̂_{w1} and pairs the result with those of
k̂_{w2}.  The two routes share nothing beyond the coefficient sequences.

All ``closed`` methods are vectorized: ``w1``, ``w2`` are complex arrays and
``t`` is the real array conj(w1) w2.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import ConsistencyError, DomainError, LengthOverflowError, TruncationError
from .kernel import ConstrainedPair, normalized_kernel_coeffs, t_of_pair
from .laws import SequenceLaw

DEFAULT_MAX_TRUNCATION = 200_000
BOUND_SLACK = 1e-8


def max_truncation() -> int:
    return int(os.environ.get("QBEREZIN_MAX_TRUNCATION", DEFAULT_MAX_TRUNCATION))


def _poly(coeffs, z):
    return np.polynomial.polynomial.polyval(z, np.asarray(coeffs, dtype=complex))


def _cx_tuple(values) -> tuple:
    return tuple(complex(v) for v in values)


def _pad(c: np.ndarray, n: int) -> np.ndarray:
    if len(c) >= n:
        return c
    return np.concatenate([c, np.zeros(n - len(c), dtype=complex)])


class OperatorSpec:
    type_name = ""

    def closed(self, q, w1, w2, t):
        raise NotImplementedError

    def apply(self, c: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def output_length(self, n: int) -> int:
        return n

    def norm_bound(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class RankOneMonomial(OperatorSpec):
    """T f = <f, z^n> z^m."""

    n: int
    m: int
    type_name = "rank_one_monomial"

    def closed(self, q, w1, w2, t):
        return q * (1.0 - t) * np.conj(w1) ** self.n * w2**self.m

    def apply(self, c):
        out = np.zeros(self.output_length(len(c)), dtype=complex)
        if self.n < len(c):
            out[self.m] = c[self.n]
        return out

    def output_length(self, n):
        return max(n, self.m + 1)

    def norm_bound(self):
        return 1.0


@dataclass(frozen=True)
class FiniteRank(OperatorSpec):
    """T f = sum_i <f, g_i> h_i for polynomial g_i, h_i (coefficients low to high)."""

    terms: tuple
    type_name = "finite_rank"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((_cx_tuple(g), _cx_tuple(h)) for g, h in self.terms))

    @property
    def real_coefficients(self) -> bool:
        return all(v.imag == 0 for g, h in self.terms for v in g + h)

    def closed(self, q, w1, w2, t):
        acc = 0j
        for g, h in self.terms:
            acc = acc + np.conj(_poly(g, w1)) * _poly(h, w2)
        return q * (1.0 - t) * acc

    def apply(self, c):
        out = np.zeros(self.output_length(len(c)), dtype=complex)
        for g, h in self.terms:
            g = np.asarray(g, dtype=complex)
            m = min(len(g), len(c))
            out[: len(h)] += np.dot(c[:m], np.conj(g[:m])) * np.asarray(h, dtype=complex)
        return out

    def output_length(self, n):
        return max([n] + [len(h) for _, h in self.terms])

    def norm_bound(self):
        return sum(np.linalg.norm(g) * np.linalg.norm(h) for g, h in self.terms)


def _check_nonnegative(law: SequenceLaw):
    if not law.is_nonnegative():
        raise ValueError(f"{law} does not describe non-negative weights |a_n|^2")


@dataclass(frozen=True)
class DiagonalModSquared(OperatorSpec):
    """T f = sum <f, a_n z^n> a_n z^n; ``weights`` is the law of |a_n|^2."""

    weights: SequenceLaw
    type_name = "diagonal_mod_squared"

    def __post_init__(self):
        _check_nonnegative(self.weights)

    def closed(self, q, w1, w2, t):
        return q * (1.0 - t) * self.weights.generating(t)

    def apply(self, c):
        return self.weights.values(len(c)) * c

    def norm_bound(self):
        return self.weights.bound()


@dataclass(frozen=True)
class DiagonalGeneral(OperatorSpec):
    """T f = sum alpha_n <f, z^n> z^n."""

    alpha: SequenceLaw
    type_name = "diagonal_general"

    def closed(self, q, w1, w2, t):
        return q * (1.0 - t) * self.alpha.generating(t)

    def apply(self, c):
        return self.alpha.values(len(c)) * c

    def norm_bound(self):
        return self.alpha.bound()


@dataclass(frozen=True)
class MultPoly(OperatorSpec):
    """Multiplication by a polynomial p (coefficients low to high)."""

    coeffs: tuple
    _bound: float = field(default=0.0, init=False, repr=False, compare=False)
    type_name = "mult_poly"

    def __post_init__(self):
        coeffs = _cx_tuple(self.coeffs)
        if not coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)
        roots = np.exp(2j * np.pi * np.arange(4096) / 4096)
        with np.errstate(over="ignore", invalid="ignore"):
            bound = 1.01 * float(np.max(np.abs(_poly(coeffs, roots))))
        object.__setattr__(self, "_bound", bound)

    def closed(self, q, w1, w2, t):
        return q * _poly(self.coeffs, w2) * np.ones_like(t)

    def apply(self, c):
        return np.convolve(c, np.asarray(self.coeffs, dtype=complex))

    def output_length(self, n):
        return n + len(self.coeffs) - 1

    def norm_bound(self):
        return self._bound


@dataclass(frozen=True)
class ToeplitzTwoCos(OperatorSpec):
    """T_phi with phi(e^{it}) = 2 cos t, i.e. M_z + M_z^*."""

    type_name = "toeplitz_two_cos"

    def closed(self, q, w1, w2, t):
        return q * (w2 + np.conj(w1))

    def apply(self, c):
        out = np.zeros(len(c) + 1, dtype=complex)
        out[1:] += c
        out[: len(c) - 1] += c[1:]
        return out

    def output_length(self, n):
        return n + 1

    def norm_bound(self):
        return 2.0


@dataclass(frozen=True)
class WeightedShift(OperatorSpec):
    """T f = sum alpha_n <f, z^n> z^{n+1}."""

    weights: SequenceLaw
    type_name = "weighted_shift"

    def closed(self, q, w1, w2, t):
        return q * (1.0 - t) * w2 * self.weights.generating(t)

    def apply(self, c):
        out = np.zeros(len(c) + 1, dtype=complex)
        out[1:] = self.weights.values(len(c)) * c
        return out

    def output_length(self, n):
        return n + 1

    def norm_bound(self):
        return self.weights.bound()


@dataclass(frozen=True)
class Banded(OperatorSpec):
    """T f = sum_i sum_n alpha^(i)_n <f, z^n> z^{n+i}, i = 0..k."""

    bands: tuple
    type_name = "banded"

    def __post_init__(self):
        if not self.bands:
            raise ValueError("banded operator needs at least one band")
        object.__setattr__(self, "bands", tuple(self.bands))

    @property
    def k(self) -> int:
        return len(self.bands) - 1

    @property
    def band_bounds(self) -> list[float]:
        return [law.bound() for law in self.bands]

    def closed(self, q, w1, w2, t):
        acc = 0j
        for i, law in enumerate(self.bands):
            acc = acc + w2**i * law.generating(t)
        return q * (1.0 - t) * acc

    def apply(self, c):
        n = len(c)
        out = np.zeros(n + self.k, dtype=complex)
        for i, law in enumerate(self.bands):
            out[i : i + n] += law.values(n) * c
        return out

    def output_length(self, n):
        return n + self.k

    def norm_bound(self):
        return sum(self.band_bounds)


@dataclass(frozen=True)
class CompositionLinear(OperatorSpec):
    """C_phi with phi(z) = xi z, |xi| <= 1."""

    xi: complex
    type_name = "composition_linear"

    def __post_init__(self):
        xi = complex(self.xi)
        if abs(xi) > 1.0:
            raise DomainError("composition_linear requires |xi| <= 1")
        object.__setattr__(self, "xi", xi)

    def closed(self, q, w1, w2, t):
        if self.xi == 1:
            return np.full(np.shape(t), q, dtype=complex)
        return q * (1.0 - t) / (1.0 - self.xi * t)

    def apply(self, c):
        return np.power(self.xi, np.arange(len(c))) * c

    def norm_bound(self):
        return 1.0


def mobius(alpha: complex, z):
    """phi_alpha(z) = (z - alpha) / (1 - conj(alpha) z)."""
    return (z - alpha) / (1.0 - np.conj(alpha) * z)


@dataclass(frozen=True)
class CompositionMobius(OperatorSpec):
    """C_phi with the disc automorphism phi_alpha."""

    alpha: complex
    type_name = "composition_mobius"

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not abs(alpha) < 1.0:
            raise DomainError("composition_mobius requires |alpha| < 1")
        object.__setattr__(self, "alpha", alpha)

    def closed(self, q, w1, w2, t):
        if self.alpha == 0:
            return np.full(np.shape(t), q, dtype=complex)
        cw = np.conj(w1)
        return q * (1.0 - cw * w2) / (1.0 - cw * mobius(self.alpha, w2))

    def apply(self, c):
        return compose_series(c, self.alpha, len(c) - 1)

    def norm_bound(self):
        a = abs(self.alpha)
        return math.sqrt((1.0 + a) / (1.0 - a))


@dataclass(frozen=True)
class Affine(OperatorSpec):
    """a T + b I."""

    op: OperatorSpec
    a: complex = 1.0
    b: complex = 0.0
    type_name = "affine"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def closed(self, q, w1, w2, t):
        return self.a * self.op.closed(q, w1, w2, t) + self.b * q

    def apply(self, c):
        out = self.a * self.op.apply(c)
        out[: len(c)] += self.b * c
        return out

    def output_length(self, n):
        return self.op.output_length(n)

    def norm_bound(self):
        return abs(self.a) * self.op.norm_bound() + abs(self.b)


@dataclass(frozen=True)
class UnitaryConjugate(OperatorSpec):
    """U T U^* for the unitary U = C_{xi z}, |xi| = 1.

    U^* k_w = k_{xi w}, so on a constrained pair the value is the value of T
    on the rotated pair (xi w1, xi w2).
    """

    op: OperatorSpec
    xi: complex
    type_name = "unitary_conjugate"

    def __post_init__(self):
        xi = complex(self.xi)
        if abs(abs(xi) - 1.0) > 1e-12:
            raise DomainError("unitary_conjugate requires |xi| = 1")
        object.__setattr__(self, "xi", xi)

    def closed(self, q, w1, w2, t):
        return self.op.closed(q, self.xi * w1, self.xi * w2, t)

    def apply(self, c):
        inner = self.op.apply(np.power(np.conj(self.xi), np.arange(len(c))) * c)
        return np.power(self.xi, np.arange(len(inner))) * inner

    def output_length(self, n):
        return self.op.output_length(n)

    def norm_bound(self):
        return self.op.norm_bound()


def compose_series(coeffs, alpha, N: int) -> np.ndarray:
    """First N+1 Taylor coefficients of f o phi_alpha.

    Horner's scheme in phi_alpha; multiplying a truncated series by
    phi_alpha is a convolution with (z - alpha) followed by the geometric
    expansion of 1 / (1 - conj(alpha) z), run as a first-order recurrence.
    """
    alpha = complex(alpha)
    if not abs(alpha) < 1.0:
        raise DomainError("compose_series requires |alpha| < 1")
    c = np.asarray(coeffs, dtype=complex)
    if alpha == 0:
        return _pad(c[: N + 1].copy(), N + 1)
    acc = np.zeros(N + 1, dtype=complex)
    lin = np.array([-alpha, 1.0])
    den = np.array([1.0, -alpha.conjugate()])
    for cn in c[::-1]:
        acc = lfilter([1.0], den, np.convolve(acc, lin)[: N + 1])
        acc[0] += cn
    return acc


def apply_coeffs(op: OperatorSpec, coeffs, max_length: int | None = None) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    cap = max_length if max_length is not None else 2 * max_truncation() + 2
    n_out = op.output_length(len(c))
    if n_out > cap:
        raise LengthOverflowError(f"output length {n_out} exceeds cap {cap}")
    return op.apply(c)


def operator_norm_bound(op: OperatorSpec) -> float:
    return float(op.norm_bound())


@dataclass(frozen=True)
class BerezinValue:
    value: complex
    pair: ConstrainedPair
    method: str
    truncation: int | None = None
    bound: float | None = None

    def __post_init__(self):
        if self.method not in ("closed_form", "series_oracle"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.bound is not None and abs(self.value) > self.bound + BOUND_SLACK:
            raise ConsistencyError(f"|value| = {abs(self.value)} exceeds the norm bound {self.bound}")


def berezin_value_closed(op: OperatorSpec, pair: ConstrainedPair) -> BerezinValue:
    t = t_of_pair(pair)
    value = complex(op.closed(pair.q, np.complex128(pair.w1), np.complex128(pair.w2), np.float64(t)))
    return BerezinValue(value, pair, "closed_form", None, op.norm_bound())


def truncation_for(bound: float, rho: float, tol: float) -> int:
    """Smallest N with bound * rho^(N+1) * max(2, 1/(1-rho)) <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rho == 0.0 or bound == 0.0:
        return 0
    factor = max(2.0, 1.0 / (1.0 - rho))
    need = math.log(tol / (bound * factor)) / math.log(rho) - 1.0
    return max(0, math.ceil(need))


def series_inner(op: OperatorSpec, w1: complex, w2: complex, tol: float = 1e-10, cap: int | None = None):
    """<T k̂_{w1}, k̂_{w2}> by coefficient truncation; returns (value, N)."""
    cap = max_truncation() if cap is None else cap
    rho = max(abs(w1), abs(w2))
    N = truncation_for(op.norm_bound(), rho, tol)
    if N > cap:
        raise TruncationError(f"series oracle needs N = {N} > cap {cap} at rho = {rho:.6f}")
    out = apply_coeffs(op, normalized_kernel_coeffs(w1, N))
    k2 = normalized_kernel_coeffs(w2, len(out) - 1)
    return complex(np.vdot(k2, out)), N


def berezin_value_series(op: OperatorSpec, pair: ConstrainedPair, tol: float = 1e-10) -> BerezinValue:
    value, N = series_inner(op, pair.w1, pair.w2, tol)
    return BerezinValue(value, pair, "series_oracle", N, op.norm_bound())


def adjoint_value(op: OperatorSpec, pair: ConstrainedPair, tol: float = 1e-10) -> complex:
    """<T^* k̂_{w1}, k̂_{w2}> = conj(<T k̂_{w2}, k̂_{w1}>), via the series oracle."""
    swapped = pair.swapped()
    value, _ = series_inner(op, swapped.w1, swapped.w2, tol)
    return value.conjugate()


def berezin_transform_series(op: OperatorSpec, w, tol: float = 1e-13) -> complex:
    """Classical Berezin transform <T k̂_w, k̂_w> from the series oracle."""
    return series_inner(op, complex(w), complex(w), tol)[0]
