"""Fredholm index of a rectangular discretization by singular-value counting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import IndeterminateIndexError
from .schemes import DiscretizedOperator

GAP_ACCEPT = 1e3
GAP_MIN = 10.0


@dataclass(frozen=True)
class SideDiagnostics:
    """Kernel count on one side, with singular values relative to the largest."""

    dim: int
    smallest_retained: float
    largest_discarded: float
    gap_ratio: float
    smallest: tuple[float, ...]


@dataclass(frozen=True)
class AnalyticIndex:
    kernel_dim: int
    cokernel_dim: int
    index: int
    gap_ratio: float
    kernel: SideDiagnostics
    cokernel: SideDiagnostics

    @property
    def certified(self) -> bool:
        return self.gap_ratio >= GAP_ACCEPT

    def as_dict(self) -> dict:
        return {"index": self.index, "kerDim": self.kernel_dim, "cokerDim": self.cokernel_dim,
                "gap_ratio": self.gap_ratio,
                "kernel_smallest": list(self.kernel.smallest),
                "cokernel_smallest": list(self.cokernel.smallest)}


def singular_values(A: np.ndarray) -> np.ndarray:
    if A.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(A, check_finite=False)


def count_side(A: np.ndarray, tol: float) -> SideDiagnostics:
    """Near-null directions of ``A`` acting on its columns.

    A tall or square matrix has one singular value per column. A wide matrix
    has ``cols - rows`` exact null directions on top of the small singular
    values.
    """
    rows, cols = A.shape
    s = singular_values(A)
    smax = float(s[0]) if s.size else 0.0
    rel = s / smax if smax > 0 else np.zeros_like(s)
    small = rel < tol
    dim = int(np.sum(small)) + max(cols - rows, 0)
    kept = rel[~small]
    gone = rel[small]
    smallest_kept = float(kept.min()) if kept.size else math.inf
    largest_gone = float(gone.max()) if gone.size else 0.0
    # with nothing discarded the threshold itself is the gap's lower edge
    denom = largest_gone if gone.size else tol
    ratio = math.inf if denom == 0 else smallest_kept / denom
    return SideDiagnostics(dim, smallest_kept, largest_gone, ratio, tuple(float(v) for v in np.sort(rel)[:6]))


def numerical_index(D: DiscretizedOperator, tol: float = 1e-7, normalize: bool = True,
                    min_gap: float = GAP_MIN) -> AnalyticIndex:
    """``kerDim - cokerDim`` from the operator and its adjoint-side assembly.

    Raises ``IndeterminateIndexError`` if either side shows a gap ratio below
    ``min_gap``; the acceptance gate is ``GAP_ACCEPT``.
    """
    A, As = D.scaled() if normalize else (D.matrix, D.adjoint)
    ker = count_side(A, tol)
    cok = count_side(As, tol)
    gap = min(ker.gap_ratio, cok.gap_ratio)
    if gap < min_gap:
        raise IndeterminateIndexError(
            f"no spectral gap at tol={tol:g}: kernel side ratio {ker.gap_ratio:.3g}, "
            f"cokernel side ratio {cok.gap_ratio:.3g}")
    return AnalyticIndex(ker.dim, cok.dim, ker.dim - cok.dim, gap, ker, cok)
