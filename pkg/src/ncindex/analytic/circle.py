"""Fourier discretization of noncommutative operators on the circle.

On the basis ``e_k = exp(2 pi i k x / L)``:

* ``K^l`` is diagonal ``kappa^l`` with ``kappa = 2 pi k / L`` (``kappa^l`` for
  ``l < 0`` is set to zero on ``k = 0``);
* a rotation ``T(g)`` is diagonal ``exp(-2 pi i k t_g / L)``, the reflection
  sends ``e_k`` to ``e_{-k}``;
* multiplication by ``b`` is a banded Toeplitz matrix.

The domain ``|k| <= N`` maps into the codomain ``|k| <= N + B`` without
truncation once ``B`` covers the coefficient bandwidth.
"""

from __future__ import annotations

import numpy as np

from ..algebra import fourier
from ..symbols.operators import NCOperatorSpec
from ..errors import DomainError
from .schemes import Basis, CircleFourier, DiscretizedOperator


def multiplier(k: np.ndarray, l: int, L: float, sheet: str | None = None) -> np.ndarray:
    kap = 2 * np.pi * k / L
    if l >= 0:
        d = kap.astype(complex) ** l
    else:
        d = np.zeros(k.shape, dtype=complex)
        nz = k != 0
        d[nz] = kap[nz] ** l
    if sheet == "+":
        d = d * (k >= 0)
    elif sheet == "-":
        d = d * (k < 0)
    return d


def operator_matrix(op: NCOperatorSpec, n_in: int, n_out: int) -> np.ndarray:
    """Matrix from modes ``|k| <= n_in`` to modes ``|k| <= n_out`` (no bandwidth check)."""
    G, L = op.group, op.L
    k_in = fourier.modes(n_in)
    k_out = fourier.modes(n_out)
    A = np.zeros((k_out.size, k_in.size), dtype=complex)
    for t in op.terms:
        col = multiplier(k_in, t.l, L, t.sheet)
        M = fourier.toeplitz_mul(t.coeff.coeffs, n_in, n_out) * col[None, :]
        sign, shift = G.action(t.g)
        if sign > 0:
            M = M * fourier.phase(n_out, -shift, L)[:, None]
        else:
            M = M[::-1]
        A += M
    return A


def order_weights(k: np.ndarray, order: int, L: float) -> np.ndarray:
    kap = 2 * np.pi * k / L
    return (1 + kap**2) ** (-order / 2)


def assemble_circle(op: NCOperatorSpec, scheme: CircleFourier) -> DiscretizedOperator:
    """Rectangular assembly and its adjoint-side counterpart.

    The adjoint side is the conjugate transpose of the rows ``|k| <= N`` of
    the operator assembled on ``|k| <= N + B``, which is the exact matrix of the
    formal adjoint from ``|k| <= N`` into ``|k| <= N + B``.
    """
    N, B = scheme.N, scheme.B
    bw = op.bandwidth
    if bw > B:
        raise DomainError(f"coefficient bandwidth {bw} exceeds codomain buffer B={B}")
    A = operator_matrix(op, N, N + B)
    wide = operator_matrix(op, N + B, N + 2 * B)
    rows = slice(2 * B, 2 * B + 2 * N + 1)
    As = wide[rows].conj().T
    k = fourier.modes(N)
    dom = Basis("fourier", k, op.L)
    cod = Basis("fourier", fourier.modes(N + B), op.L)
    w = order_weights(k, op.order, op.L)
    return DiscretizedOperator(A, As, dom, cod, dom, True, w, w,
                               meta={"order": op.order, "N": N, "B": B})


def compress(D: DiscretizedOperator, Q_dom: np.ndarray, Q_cod: np.ndarray,
             Q_adj_dom: np.ndarray, Q_adj_cod: np.ndarray) -> DiscretizedOperator:
    """Restrict to subspaces with orthonormal column bases (twisted operators)."""
    A = Q_cod.conj().T @ D.matrix @ Q_dom
    As = Q_adj_cod.conj().T @ D.adjoint @ Q_adj_dom
    w = None
    if D.column_weights is not None:
        # exact when the subspaces are spanned by Fourier modes
        w = np.sqrt(np.abs(Q_dom.conj().T @ (D.column_weights[:, None] ** 2 * Q_dom)).diagonal())
    wa = None
    if D.adjoint_column_weights is not None:
        wa = np.sqrt(np.abs(Q_adj_dom.conj().T @ (D.adjoint_column_weights[:, None] ** 2 * Q_adj_dom)).diagonal())
    dom = Basis("subspace", np.arange(A.shape[1]), D.domain.L, "compressed")
    cod = Basis("subspace", np.arange(A.shape[0]), D.codomain.L, "compressed")
    adom = Basis("subspace", np.arange(As.shape[1]), D.domain.L, "compressed")
    return DiscretizedOperator(A, As, dom, cod, adom, D.exact, w, wa, dict(D.meta))


def apply_pointwise(op: NCOperatorSpec, u_coeffs: np.ndarray, M: int) -> np.ndarray:
    """Direct evaluation of ``op u`` on ``M`` grid points from Fourier data of ``u``.

    Independent of the matrix assembly: derivatives and projections act on
    the coefficients of ``u``, coefficients multiply pointwise, and shifts are
    applied as composition with ``g^{-1}`` through exact evaluation.
    """
    G, L = op.group, op.L
    x = np.arange(M) * L / M
    Nu = fourier.order_of(u_coeffs)
    k = fourier.modes(Nu)
    out = np.zeros(M, dtype=complex)
    for t in op.terms:
        v = u_coeffs * multiplier(k, t.l, L, t.sheet)
        sign, shift = G.action(t.g)
        # (T(g) w)(x) = w(g^{-1} x), g^{-1} x = sign (x - shift)
        y = sign * (x - shift)
        w = np.exp(2j * np.pi * np.outer(y, k) / L) @ v
        b = t.coeff(y)
        out += b * w
    return out
