"""Truncated Fourier series on a circle of circumference ``L``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, IncompatibleAlgebraError
from . import fourier


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """``f(x) = sum_{|k| <= N} c_k exp(2 pi i k x / L)``."""

    L: float
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise DomainError("coefficients must be a 1-d array of odd length")
        if self.real:
            c = 0.5 * (c + np.conj(c[::-1]))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "L", float(self.L))

    # construction

    @classmethod
    def constant(cls, value, L: float, N: int = 0) -> "PeriodicFunction":
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N] = value
        return cls(L, c, real=np.isreal(value))

    @classmethod
    def mode(cls, k: int, L: float, N: int | None = None, scale=1.0) -> "PeriodicFunction":
        N = abs(k) if N is None else N
        if abs(k) > N:
            raise DomainError("mode outside truncation")
        c = np.zeros(2 * N + 1, dtype=complex)
        c[k + N] = scale
        return cls(L, c)

    @classmethod
    def from_callable(cls, fun, L: float, N: int, real: bool = False, M: int | None = None):
        return cls(L, fourier.sample(fun, L, N, M), real=real)

    # basic data

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coefficient(self, k: int) -> complex:
        return complex(self.coeffs[k + self.N]) if abs(k) <= self.N else 0j

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = fourier.modes(self.N)
        e = np.exp(2j * np.pi * np.multiply.outer(x, k) / self.L)
        return e @ self.coeffs

    def samples(self, M: int) -> np.ndarray:
        return fourier.to_samples(self.coeffs, M)

    def mean(self) -> complex:
        return complex(self.coeffs[self.N])

    def integral(self) -> complex:
        """Exact integral over one period: ``L * c_0``."""
        return self.L * self.mean()

    def norm(self, n: int = 0) -> float:
        """Wiener-type ``C^n`` norm ``max_{j<=n} sum_k |c_k| |2 pi k / L|^j``."""
        w = np.abs(2 * np.pi * fourier.modes(self.N) / self.L)
        a = np.abs(self.coeffs)
        return max(float(np.sum(a * w**j)) for j in range(n + 1))

    def is_real(self, tol: float = 1e-12) -> bool:
        c = self.coeffs
        return bool(np.max(np.abs(c - np.conj(c[::-1])), initial=0.0) <= tol)

    # algebra

    def _check(self, other: "PeriodicFunction"):
        if other.L != self.L:
            raise IncompatibleAlgebraError("functions live on circles of different length")

    def truncate(self, N: int) -> "PeriodicFunction":
        return PeriodicFunction(self.L, fourier.resize(self.coeffs, N), self.real)

    def __add__(self, other):
        if not isinstance(other, PeriodicFunction):
            return self + PeriodicFunction.constant(other, self.L)
        self._check(other)
        N = max(self.N, other.N)
        return PeriodicFunction(self.L, fourier.resize(self.coeffs, N) + fourier.resize(other.coeffs, N),
                                self.real and other.real)

    __radd__ = __add__

    def __neg__(self):
        return PeriodicFunction(self.L, -self.coeffs, self.real)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PeriodicFunction):
            return PeriodicFunction(self.L, self.coeffs * other, self.real and np.isreal(other))
        return self.multiply(other)

    __rmul__ = __mul__

    def multiply(self, other: "PeriodicFunction", N: int | None = None) -> "PeriodicFunction":
        """Product truncated to ``N`` (default: larger of the two orders)."""
        self._check(other)
        N = max(self.N, other.N) if N is None else N
        return PeriodicFunction(self.L, fourier.mul(self.coeffs, other.coeffs, N), self.real and other.real)

    def conj(self) -> "PeriodicFunction":
        return PeriodicFunction(self.L, np.conj(self.coeffs[::-1]), self.real)

    def derivative(self, order: int = 1) -> "PeriodicFunction":
        return PeriodicFunction(self.L, fourier.derivative(self.coeffs, self.L, order), False)

    def pullback(self, sign: int, shift: float) -> "PeriodicFunction":
        """``x -> f(sign * x + shift)``."""
        return PeriodicFunction(self.L, fourier.pullback(self.coeffs, sign, shift, self.L), self.real)

    def pullback_by(self, group, g) -> "PeriodicFunction":
        sign, shift = group.action(g)
        return self.pullback(sign, shift)

    def reciprocal(self, N: int | None = None, M: int | None = None) -> "PeriodicFunction":
        """``1/f`` resampled to order ``N``; raises if ``f`` vanishes on the sample grid."""
        N = self.N if N is None else N
        M = M or fourier.fft_size(max(16 * max(N, self.N), 1024))
        s = self.samples(M)
        if np.min(np.abs(s)) <= 1e-14 * max(np.max(np.abs(s)), 1e-300):
            raise DomainError("function vanishes on the circle")
        return PeriodicFunction(self.L, fourier.from_samples(1.0 / s, N))

    def allclose(self, other: "PeriodicFunction", tol: float = 1e-12) -> bool:
        N = max(self.N, other.N)
        d = fourier.resize(self.coeffs, N) - fourier.resize(other.coeffs, N)
        return bool(np.sum(np.abs(d)) <= tol)
