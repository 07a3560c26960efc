"""Isomorphism between rapidly decaying functions on the line and sections over the torus.

Coordinates ``0 <= phi < theta`` and ``0 <= psi < 1``. The forward map is
``g(phi, psi) = sum_n f(phi + theta n) exp(2 pi i n psi)``; its image satisfies
``g(phi + theta, psi) = g(phi, psi) exp(-2 pi i psi)``. The inverse is the
Fourier coefficient in ``psi``, ``f(phi + theta n) = int_0^1 g(phi, psi) exp(-2 pi i n psi) dpsi``.

On a grid with ``m_psi > 2 n_max`` points the ``psi`` transform is an exact
DFT. ``phi`` derivatives and shifts of the quasi-periodic ``g`` go through the
periodic function ``h = g exp(2 pi i psi phi / theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class TorusGrid:
    theta: float
    m_phi: int = 64
    m_psi: int = 128
    n_max: int = 50

    def __post_init__(self):
        if self.m_psi <= 2 * self.n_max:
            raise DomainError("m_psi must exceed 2 n_max")

    @classmethod
    def for_theta(cls, theta: float, half_width: float = 22.0, m_phi: int = 64) -> "TorusGrid":
        """Line window ``|x| <= half_width`` and the smallest admissible ``m_psi``."""
        n_max = int(math.ceil(half_width / theta))
        return cls(theta, m_phi, 2 * n_max + 2, n_max)

    @property
    def phi(self) -> np.ndarray:
        return np.arange(self.m_phi) * self.theta / self.m_phi

    @property
    def psi(self) -> np.ndarray:
        return np.arange(self.m_psi) / self.m_psi

    @property
    def n(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def line_points(self, phi: np.ndarray | None = None) -> np.ndarray:
        """``x = phi + theta n`` as an array of shape ``(len(phi), 2 n_max + 1)``."""
        phi = self.phi if phi is None else np.asarray(phi, dtype=float)
        return phi[:, None] + self.theta * self.n[None, :]


def line_samples(u, grid: TorusGrid, phi: np.ndarray | None = None) -> np.ndarray:
    return np.asarray(u(grid.line_points(phi)), dtype=complex)


def line_to_torus(samples: np.ndarray, grid: TorusGrid, decay_tol: float = 1e-12) -> np.ndarray:
    """``g[j, m]`` at ``(phi_j, psi_m)`` from samples at ``phi_j + theta n``."""
    amp = np.abs(samples)
    top = amp.max()
    if top > 0 and max(amp[:, 0].max(), amp[:, -1].max()) > decay_tol * top:
        raise DomainError("samples do not decay at the ends of the line window; raise n_max")
    phase = np.exp(2j * np.pi * np.outer(grid.n, grid.psi))
    return samples @ phase


def torus_to_line(g: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Inverse map: Fourier coefficients in ``psi`` (normalization 1 on the unit circle)."""
    phase = np.exp(-2j * np.pi * np.outer(grid.psi, grid.n))
    return g @ phase / grid.m_psi


def quasi_periodicity_residual(u, grid: TorusGrid) -> float:
    """Relative ``max |g(phi + theta, psi) - g(phi, psi) exp(-2 pi i psi)|``."""
    g0 = line_to_torus(line_samples(u, grid), grid)
    g1 = line_to_torus(line_samples(u, grid, grid.phi + grid.theta), grid)
    return float(np.max(np.abs(g1 - g0 * np.exp(-2j * np.pi * grid.psi)[None, :])) / np.max(np.abs(g0)))


def _periodize(g: np.ndarray, grid: TorusGrid, sign: int = 1) -> np.ndarray:
    return g * np.exp(sign * 2j * np.pi * np.outer(grid.phi, grid.psi) / grid.theta)


def d_phi(g: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """``dg/dphi`` by spectral differentiation of the periodic part."""
    h = _periodize(g, grid)
    k = np.fft.fftfreq(grid.m_phi, d=1.0 / grid.m_phi)
    dh = np.fft.ifft(np.fft.fft(h, axis=0) * (2j * np.pi * k / grid.theta)[:, None], axis=0)
    return _periodize(dh, grid, -1) - (2j * np.pi * grid.psi / grid.theta)[None, :] * g


def d_psi(g: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """``dg/dpsi``; exact on the grid since ``g`` is a trigonometric polynomial in ``psi``."""
    k = np.fft.fftfreq(grid.m_psi, d=1.0 / grid.m_psi)
    return np.fft.ifft(np.fft.fft(g, axis=1) * (2j * np.pi * k)[None, :], axis=1)


def shift_phi(g: np.ndarray, grid: TorusGrid, a: float) -> np.ndarray:
    """``g(phi + a, psi)`` by trigonometric interpolation of the periodic part."""
    h = _periodize(g, grid)
    k = np.fft.fftfreq(grid.m_phi, d=1.0 / grid.m_phi)
    if grid.m_phi % 2 == 0:
        k[grid.m_phi // 2] = 0.0  # drop the unpaired Nyquist mode
    H = np.fft.fft(h, axis=0) / grid.m_phi
    y = grid.phi + a
    hs = np.exp(2j * np.pi * np.outer(y, k) / grid.theta) @ H
    return hs * np.exp(-2j * np.pi * np.outer(y, grid.psi) / grid.theta)


def correspondence_residuals(u, du, grid: TorusGrid) -> dict:
    """Relative errors of the four operator correspondences for a test function ``u`` with derivative ``du``.

    * ``-i d/dx``        vs ``-i d/dphi``
    * ``x``               vs ``-i (theta / 2 pi) d/dpsi + phi``
    * ``exp(-2 pi i x / theta)`` vs ``exp(-2 pi i phi / theta)``
    * ``f(x) -> f(x + 1)`` vs ``g(phi, psi) -> g(phi + 1, psi)``
    """
    th = grid.theta
    g = line_to_torus(line_samples(u, grid), grid)
    scale = np.max(np.abs(g))
    phi = grid.phi[:, None]

    def rel(a, b):
        return float(np.max(np.abs(a - b)) / scale)

    out = {}
    lhs = line_to_torus(line_samples(lambda x: -1j * du(x), grid), grid)
    out["derivative"] = rel(lhs, -1j * d_phi(g, grid))
    lhs = line_to_torus(line_samples(lambda x: x * u(x), grid), grid)
    out["position"] = rel(lhs, -1j * th / (2 * np.pi) * d_psi(g, grid) + phi * g)
    lhs = line_to_torus(line_samples(lambda x: np.exp(-2j * np.pi * x / th) * u(x), grid), grid)
    out["exponential"] = rel(lhs, np.exp(-2j * np.pi * phi / th) * g)
    lhs = line_to_torus(line_samples(lambda x: u(x + 1), grid), grid)
    out["shift"] = rel(lhs, shift_phi(g, grid, 1.0))
    return out
