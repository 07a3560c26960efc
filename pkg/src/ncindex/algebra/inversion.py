"""Inversion in the truncated crossed product.

Two strategies, tried in order:

1. a Neumann series, either for ``1 - a`` directly or after dividing by the
   pointwise inverse of the identity component;
2. a dense least-squares solve of ``a b = 1`` in the left regular
   representation restricted to a ball of group elements and to the working
   frequency band.

Both residuals ``max(||ab - 1||, ||ba - 1||)`` (seminorm ``(0, 0)``) are
reported; if neither meets the tolerance a ``NotInvertibleError`` carries them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, NotInvertibleError, TruncationOverflowError
from . import fourier
from .crossed import CrossedElement, cp_mul, cp_seminorm
from .groups import LATTICE


@dataclass(frozen=True)
class InverseResult:
    inverse: CrossedElement
    strategy: str
    neumann_residual: float | None
    dense_residual: float | None

    @property
    def residual(self) -> float:
        return self.neumann_residual if self.strategy == "neumann" else self.dense_residual


def inverse_residual(a: CrossedElement, b: CrossedElement) -> float:
    one = CrossedElement.identity(a.group, a.N, a.rank)
    return max(cp_seminorm(cp_mul(a, b) - one), cp_seminorm(cp_mul(b, a) - one))


def pointwise_inverse(a: CrossedElement) -> CrossedElement | None:
    """``delta_e * a(e)^{-1}`` computed on samples, or ``None`` if ``a(e)`` is singular somewhere."""
    N = a.N
    M = fourier.fft_size(16 * max(N, 8))
    s = fourier.to_samples(a.component(a.group.identity), M)
    mats = np.moveaxis(s, -1, 0)
    sv = np.linalg.svd(mats, compute_uv=False)
    if np.min(sv[:, -1]) <= 1e-10 * max(np.max(sv[:, 0]), 1e-300):
        return None
    inv = np.moveaxis(np.linalg.inv(mats), 0, -1)
    return CrossedElement(a.group, N, {a.group.identity: fourier.from_samples(inv, N)},
                          rank=a.rank, cap=a.cap)


def neumann_partial_sums(a: CrossedElement, K: int) -> list[CrossedElement]:
    """Partial sums ``sum_{n <= k} (1 - a)^n`` for ``k = 0..K``."""
    one = CrossedElement.identity(a.group, a.N, a.rank).with_cap(a.cap)
    d = one - a
    term, total, out = one, one, [one]
    for _ in range(K):
        term = cp_mul(term, d)
        total = total + term
        out.append(total)
    return out


def _neumann(a: CrossedElement, tol: float, max_terms: int) -> CrossedElement | None:
    one = CrossedElement.identity(a.group, a.N, a.rank).with_cap(a.cap)
    d = one - a
    pre = None
    q = cp_seminorm(d)
    if q >= 1:
        pre = pointwise_inverse(a)
        if pre is None:
            return None
        d = -cp_mul(pre, a - CrossedElement(a.group, a.N, {a.group.identity: a.component(a.group.identity)},
                                            rank=a.rank))
        q = cp_seminorm(d)
        if q >= 1:
            return None
    if q == 0:
        return one if pre is None else pre
    # keep the dropped mass well under the tolerance
    prune = tol * 1e-3 * (1 - q)
    stop = tol * 0.05 * (1 - q)
    term, total = one, one
    for _ in range(max_terms):
        try:
            term = cp_mul(term, d).prune(prune)
        except TruncationOverflowError:
            return None
        total = total + term
        if cp_seminorm(term) <= stop:
            break
    return total if pre is None else cp_mul(total, pre)


def _ball(a: CrossedElement, radius: int | None, budget: int):
    G = a.group
    if G.kind != LATTICE:
        return list(G.elements())
    per = a.rank * (2 * a.N + 1)
    if radius is None:
        radius = max(4 * a.radius, 8)
    while radius > 0 and len(G.ball(radius)) * per > budget:
        radius -= 1
    return G.ball(radius)


def _dense(a: CrossedElement, radius: int | None, budget: int) -> CrossedElement:
    G, N, n = a.group, a.N, a.rank
    ball = _ball(a, radius, budget)
    targets = sorted({G.mul(g, h) for g in a.support for h in ball} | {G.identity})
    row_of = {k: i for i, k in enumerate(targets)}
    No = 2 * N
    nr, nc = 2 * No + 1, 2 * N + 1
    A = np.zeros((len(targets) * n * nr, len(ball) * n * nc), dtype=complex)
    for hi, h in enumerate(ball):
        sign, shift = G.action(h)
        for g, v in a.items():
            pulled = fourier.pullback(v, sign, shift, G.L)
            ki = row_of[G.mul(g, h)]
            for r in range(n):
                for c in range(n):
                    T = fourier.toeplitz_mul(pulled[r, c], N, No)
                    r0 = (ki * n + r) * nr
                    c0 = (hi * n + c) * nc
                    A[r0:r0 + nr, c0:c0 + nc] += T
    rhs = np.zeros((A.shape[0], n), dtype=complex)
    e = row_of[G.identity]
    for j in range(n):
        rhs[(e * n + j) * nr + No, j] = 1.0
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    data = {}
    for hi, h in enumerate(ball):
        blk = x[hi * n * nc:(hi + 1) * n * nc].reshape(n, nc, n)
        data[h] = np.transpose(blk, (0, 2, 1))
    return CrossedElement(G, N, data, rank=n, cap=a.cap)


def invert(a: CrossedElement, tol: float = 1e-10, max_terms: int = 400,
           dense_radius: int | None = None, dense_budget: int = 4000) -> InverseResult:
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    rn = rd = None
    b = _neumann(a, tol, max_terms)
    if b is not None:
        rn = inverse_residual(a, b)
        if rn <= tol:
            return InverseResult(b, "neumann", rn, None)
    try:
        bd = _dense(a, dense_radius, dense_budget)
        rd = inverse_residual(a, bd)
    except (np.linalg.LinAlgError, TruncationOverflowError):
        rd = math.inf
    if rd <= tol:
        return InverseResult(bd, "dense", rn, rd)
    raise NotInvertibleError(
        f"no inverse within tol={tol:g} (neumann residual {rn}, dense residual {rd})",
        neumann_residual=rn, dense_residual=rd)


def cp_invert(a: CrossedElement, tol: float = 1e-10) -> CrossedElement:
    return invert(a, tol).inverse
