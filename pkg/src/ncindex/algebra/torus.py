"""The smooth noncommutative torus spanned by ``U^j V^k``.

On functions of the real line ``(Uf)(x) = f(x + 1)`` and
``(Vf)(x) = exp(-2 pi i x / theta) f(x)``, so ``VU = exp(2 pi i / theta) UV``.
In the crossed-product picture over ``Z`` acting on the circle of length
``theta``, ``U = T(1)`` and ``V`` is the Fourier mode ``-1``; the monomial
``U^j V^k`` is the component ``j`` carrying the single mode ``-k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, IncompatibleAlgebraError
from .crossed import CrossedElement
from .groups import is_torus_action, torus_action


@dataclass(frozen=True, eq=False)
class NCTorusElement:
    """``sum a[j, k] U^j V^k`` with ``|j|, |k| <= N``; ``a`` is indexed ``[j + N, k + N]``."""

    theta: float
    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 == 0:
            raise DomainError("coefficient array must be square with odd side")
        if not 0 < self.theta <= 1:
            raise DomainError("theta must lie in (0, 1]")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return (self.a.shape[0] - 1) // 2

    @classmethod
    def monomial(cls, theta: float, j: int, k: int, N: int | None = None, coeff=1.0):
        N = max(abs(j), abs(k)) if N is None else N
        a = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        a[j + N, k + N] = coeff
        return cls(theta, a)

    @classmethod
    def unit(cls, theta: float, N: int = 0):
        return cls.monomial(theta, 0, 0, N)

    def coefficient(self, j: int, k: int) -> complex:
        N = self.N
        if abs(j) > N or abs(k) > N:
            return 0j
        return complex(self.a[j + N, k + N])

    def resize(self, N: int) -> "NCTorusElement":
        out = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        m = min(N, self.N)
        out[N - m:N + m + 1, N - m:N + m + 1] = self.a[self.N - m:self.N + m + 1, self.N - m:self.N + m + 1]
        return NCTorusElement(self.theta, out)

    def _check(self, other):
        if not isinstance(other, NCTorusElement) or other.theta != self.theta:
            raise IncompatibleAlgebraError("torus elements with different theta")

    def __add__(self, other):
        self._check(other)
        N = max(self.N, other.N)
        return NCTorusElement(self.theta, self.resize(N).a + other.resize(N).a)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, NCTorusElement):
            return self.multiply(other)
        return NCTorusElement(self.theta, self.a * other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self.multiply(other)

    def multiply(self, other: "NCTorusElement", N: int | None = None) -> "NCTorusElement":
        """Product truncated to ``N`` (default: the larger order).

        ``(U^j V^k)(U^j' V^k') = exp(2 pi i k j' / theta) U^{j+j'} V^{k+k'}``.
        """
        self._check(other)
        N = max(self.N, other.N) if N is None else N
        Na, Nb = self.N, other.N
        full = Na + Nb
        c = np.zeros((2 * full + 1, 2 * full + 1), dtype=complex)
        jb = np.arange(-Nb, Nb + 1)
        for k in range(-Na, Na + 1):
            col = self.a[:, k + Na]
            if not np.any(col):
                continue
            twisted = other.a * np.exp(2j * np.pi * k * jb / self.theta)[:, None]
            for j in np.nonzero(col)[0]:
                jj = j - Na
                c[jj + full - Nb + np.arange(2 * Nb + 1)[:, None],
                  k + full - Nb + np.arange(2 * Nb + 1)[None, :]] += col[j] * twisted
        return NCTorusElement(self.theta, c).resize(N)

    def tau(self) -> complex:
        """Trace ``a_00``."""
        return self.coefficient(0, 0)

    def decay_profile(self, lmax: int = 4) -> list[float]:
        """``max |a_jk| (1 + |j| + |k|)^l`` for ``l = 0..lmax``."""
        r = np.arange(-self.N, self.N + 1)
        w = 1 + np.abs(r)[:, None] + np.abs(r)[None, :]
        mag = np.abs(self.a)
        return [float(np.max(mag * w**l)) for l in range(lmax + 1)]

    def max_abs_diff(self, other: "NCTorusElement") -> float:
        N = max(self.N, other.N)
        return float(np.max(np.abs(self.resize(N).a - other.resize(N).a)))

    # crossed-product picture

    def to_crossed(self, N: int | None = None) -> CrossedElement:
        N = self.N if N is None else N
        if N < self.N:
            raise DomainError("crossed truncation must hold every V power")
        G = torus_action(self.theta)
        data = {}
        for j in range(-self.N, self.N + 1):
            row = self.a[j + self.N]
            if not np.any(row):
                continue
            c = np.zeros(2 * N + 1, dtype=complex)
            # V^k is Fourier mode -k
            c[N - np.arange(-self.N, self.N + 1)] = row
            data[(j,)] = c
        return CrossedElement(G, N, data)

    @classmethod
    def from_crossed(cls, x: CrossedElement, N: int | None = None) -> "NCTorusElement":
        if not is_torus_action(x.group) or x.rank != 1:
            raise DomainError("element is not over the unit-shift action")
        N = max([x.N] + [abs(g[0]) for g in x.support]) if N is None else N
        a = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        m = min(N, x.N)
        for (j,), v in x.items():
            if abs(j) > N:
                continue
            coeffs = v[0, 0]
            for k in range(-m, m + 1):
                a[j + N, k + N] = coeffs[x.N - k]
        return cls(x.group.L, a)


def U(theta: float, N: int = 1) -> NCTorusElement:
    return NCTorusElement.monomial(theta, 1, 0, N)


def V(theta: float, N: int = 1) -> NCTorusElement:
    return NCTorusElement.monomial(theta, 0, 1, N)


def tau_e_torus(a: NCTorusElement) -> complex:
    return a.tau()
