"""Projector pair representing the K-class of an elliptic symbol.

With ``s = sin psi`` and ``c = cos psi`` for a profile ``psi(|xi|)`` rising
from ``-pi/2`` to ``pi/2``,

    q2 = 1/2 [[(1 - s) P1, c r], [c sigma', (1 + s) P2]],    q1 = diag(0, P2),

where ``r = P1 sigma^{-1} P2`` and ``sigma' = P2 sigma P1``. Symbols are
extended homogeneously of degree zero, so at each radius the entries are the
cosphere values scaled by the scalars ``s`` and ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra.crossed import CrossedElement, block, cp_mul, cp_seminorm
from ..errors import IdempotencyError, InvarianceViolationError
from ..rieffel import smooth_step
from .operators import SymbolPair

NODES = 33


def radial_profile(n: int = NODES, profile: str = "exp"):
    """Nodes ``t`` in ``[0, 1]`` (compactified ``|xi|``) with exact sine and cosine of ``psi`` at the ends."""
    t = np.linspace(0.0, 1.0, n)
    psi = -np.pi / 2 + np.pi * smooth_step(t, profile)
    s, c = np.sin(psi), np.cos(psi)
    s[0], c[0], s[-1], c[-1] = -1.0, 0.0, 1.0, 0.0
    return t, psi, s, c


@dataclass(frozen=True, eq=False)
class KClassPair:
    radii: np.ndarray
    psi: np.ndarray
    q2: tuple[CrossedElement, ...]
    q1: CrossedElement
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))


def k_class_projectors(sigma: SymbolPair, sigma_inv: SymbolPair, P1: SymbolPair, P2: SymbolPair,
                       nodes: int = NODES, tol: float = 1e-8, profile: str = "exp") -> KClassPair:
    """Build ``q2`` at every radial node and ``q1``; all blocks use the two-sheet matrix encoding."""
    S, Si = sigma.to_matrix(), sigma_inv.to_matrix()
    A1, A2 = P1.to_matrix(), P2.to_matrix()
    comm = cp_seminorm(cp_mul(S, A1) - cp_mul(A2, S))
    if comm > tol:
        raise InvarianceViolationError(f"symbol does not intertwine P1 and P2 ({comm:.2e})")
    r = cp_mul(A1, cp_mul(Si, A2))
    sp_ = cp_mul(A2, cp_mul(S, A1))
    # q2 = (1 - s)/2 X0 + c/2 X1 + (1 + s)/2 X2, so q2^2 - q2 is a fixed
    # quadratic form in the three scalars; products are taken blockwise
    Xb = [[[A1, None], [None, None]], [[None, r], [sp_, None]], [[None, None], [None, A2]]]
    zero = (A1 * 0.0, A2 * 0.0)
    X = [_full(x, zero) for x in Xb]
    XX = [_full(_block_mul(x, y), zero) for x in Xb for y in Xb]
    keys = sorted({g for e in XX + X for g in e.support})
    stackXX = np.stack([[e.component(g) for g in keys] for e in XX])
    stackX = np.stack([[e.component(g) for g in keys] for e in X])
    G, N, n = S.group, S.N, 2 * S.rank
    t, psi, s, c = radial_profile(nodes, profile)
    q2s, res = [], []
    for i in range(nodes):
        w = np.array([0.5 * (1 - s[i]), 0.5 * c[i], 0.5 * (1 + s[i])])
        q = X[0] * w[0] + X[1] * w[1] + X[2] * w[2]
        d = np.tensordot(np.outer(w, w).ravel(), stackXX, axes=1) - np.tensordot(w, stackX, axes=1)
        e = cp_seminorm(CrossedElement(G, N, dict(zip(keys, d)), rank=n, cap=q.cap))
        if e > tol:
            raise IdempotencyError(f"q2 is not idempotent at node {i} (residual {e:.2e})", i, e)
        q2s.append(q)
        res.append(e)
    q1 = block([[A1 * 0.0, None], [None, A2]])
    return KClassPair(t, psi, tuple(q2s), q1, np.array(res))


def _block_mul(X, Y):
    out = [[None, None], [None, None]]
    for i in range(2):
        for k in range(2):
            for j in range(2):
                if X[i][j] is not None and Y[j][k] is not None:
                    p = cp_mul(X[i][j], Y[j][k])
                    out[i][k] = p if out[i][k] is None else out[i][k] + p
    return out


def _full(X, zero):
    return block([[X[i][j] if X[i][j] is not None else zero[i] for j in range(2)] for i in range(2)])
