"""Low-level helpers on truncated Fourier coefficient arrays.

Coefficient arrays store modes ``-N..N`` along the last axis, so index ``k + N``
holds ``c_k``. Leading axes (matrix entries) broadcast through everything.
"""

from __future__ import annotations

import numpy as np


def modes(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


def order_of(c: np.ndarray) -> int:
    return (c.shape[-1] - 1) // 2


def fft_size(n: int) -> int:
    m = 16
    while m < n:
        m *= 2
    return m


def to_samples(c: np.ndarray, M: int) -> np.ndarray:
    """Values on ``M`` equispaced points ``x_j = j L / M``."""
    N = order_of(c)
    buf = np.zeros(c.shape[:-1] + (M,), dtype=complex)
    buf[..., modes(N) % M] = c
    return np.fft.ifft(buf, axis=-1) * M


def from_samples(s: np.ndarray, N: int) -> np.ndarray:
    M = s.shape[-1]
    return (np.fft.fft(s, axis=-1) / M)[..., modes(N) % M]


def resize(c: np.ndarray, N: int) -> np.ndarray:
    """Truncate or zero-pad a coefficient array to order ``N``."""
    N0 = order_of(c)
    if N == N0:
        return c
    if N < N0:
        return c[..., N0 - N:N0 + N + 1]
    out = np.zeros(c.shape[:-1] + (2 * N + 1,), dtype=complex)
    out[..., N - N0:N + N0 + 1] = c
    return out


def phase(N: int, shift: float, L: float) -> np.ndarray:
    return np.exp(2j * np.pi * modes(N) * (np.fmod(shift, L) / L))


def pullback(c: np.ndarray, sign: int, shift: float, L: float) -> np.ndarray:
    """Coefficients of ``f(sign * x + shift)``."""
    out = c * phase(order_of(c), shift, L)
    if sign < 0:
        out = out[..., ::-1]
    return out


def derivative(c: np.ndarray, L: float, order: int = 1) -> np.ndarray:
    return c * (2j * np.pi * modes(order_of(c)) / L) ** order


def mul(a: np.ndarray, b: np.ndarray, N: int | None = None) -> np.ndarray:
    """Pointwise product of two scalar-valued coefficient arrays, truncated to ``N``.

    ``N=None`` keeps the full product bandwidth.
    """
    Na, Nb = order_of(a), order_of(b)
    if N is None:
        N = Na + Nb
    M = fft_size(Na + Nb + N + 1)
    prod = to_samples(a, M) * to_samples(b, M)
    return from_samples(prod, N)


def sample(fun, L: float, N: int, M: int | None = None) -> np.ndarray:
    """Fourier coefficients of a callable by an oversampled FFT."""
    M = M or max(16 * N, 8192)
    x = np.arange(M) * (L / M)
    return from_samples(np.asarray(fun(x), dtype=complex), N)


def toeplitz_mul(c: np.ndarray, n_in: int, n_out: int) -> np.ndarray:
    """Matrix of ``u -> c * u`` from modes ``|k| <= n_in`` to ``|k| <= n_out``."""
    Nc = order_of(c)
    diff = modes(n_out)[:, None] - modes(n_in)[None, :]
    inside = np.abs(diff) <= Nc
    T = np.zeros(diff.shape, dtype=complex)
    T[inside] = c[diff[inside] + Nc]
    return T
