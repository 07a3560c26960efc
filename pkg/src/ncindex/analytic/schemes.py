"""Discretization schemes and the discretized-operator record."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class CircleFourier:
    """Fourier modes ``|k| <= N`` on the domain and ``|k| <= N + B`` on the codomain."""

    N: int
    B: int = 0

    def __post_init__(self):
        if self.N < 1 or self.B < 0:
            raise DomainError("need N >= 1 and B >= 0")


@dataclass(frozen=True)
class LineGrid:
    """Grid ``x_j = j h`` on ``[-L, L]`` with ``h = 1/q``.

    The domain keeps points with ``|x| <= L - margin``; ``p`` is the order of
    the central difference for ``d/dx``.
    """

    q: int = 64
    L: float = 26.0
    margin: float | None = None
    p: int = 8

    def __post_init__(self):
        if self.q < 8:
            raise DomainError("q must be at least 8")
        if self.p % 2 or self.p < 2:
            raise DomainError("difference order must be even")
        if self.margin is not None and self.margin < 1 + self.p * self.h - 1e-12:
            raise DomainError("margin must be at least 1 + p h")
        if self.L <= self.interior_margin + 1:
            raise DomainError("box too short for the margin")

    @property
    def h(self) -> float:
        return 1.0 / self.q

    @property
    def interior_margin(self) -> float:
        return 1 + self.p * self.h if self.margin is None else self.margin

    @property
    def x(self) -> np.ndarray:
        n = int(round(self.L * self.q))
        return np.arange(-n, n + 1) * self.h

    @property
    def domain_mask(self) -> np.ndarray:
        return np.abs(self.x) <= self.L - self.interior_margin + 1e-12


@dataclass(frozen=True)
class TorusViaLine:
    line: LineGrid
    theta: float


@dataclass(frozen=True)
class Basis:
    """Basis descriptor: ``kind`` is ``"fourier"`` (``labels`` are modes) or ``"grid"`` (points)."""

    kind: str
    labels: np.ndarray
    L: float | None = None
    note: str = ""

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    """Rectangular matrix of an operator with the matching adjoint-side assembly.

    ``adjoint`` is the rectangular discretization of the formal adjoint, used
    for the cokernel count. ``column_weights`` rescale the domain so that the
    matrix has order zero before singular values are compared.
    """

    matrix: np.ndarray
    adjoint: np.ndarray
    domain: Basis
    codomain: Basis
    adjoint_domain: Basis
    exact: bool
    column_weights: np.ndarray | None = None
    adjoint_column_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def scaled(self) -> tuple[np.ndarray, np.ndarray]:
        A, As = self.matrix, self.adjoint
        if self.column_weights is not None:
            A = A * self.column_weights[None, :]
        if self.adjoint_column_weights is not None:
            As = As * self.adjoint_column_weights[None, :]
        return A, As

    def swapped(self) -> "DiscretizedOperator":
        """The adjoint viewed as the primary operator."""
        return DiscretizedOperator(self.adjoint, self.matrix, self.adjoint_domain, self.domain,
                                   self.domain, self.exact, self.adjoint_column_weights,
                                   self.column_weights, dict(self.meta))
