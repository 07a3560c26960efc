"""Twisting by crossed-product projections.

A projection ``P`` in the crossed product acts on sections of an
equivariant bundle ``E`` by ``sum_g T_E(g) P(g)``. On the circle the bundles
used are functions (``T_E = T``) and one-forms, where the reflection acts on
``dphi`` by ``-1``. The character ``chi(g)`` carries that sign.
"""

from __future__ import annotations

import numpy as np

from ..algebra.crossed import CrossedElement, cp_mul, cp_seminorm
from ..algebra.functions import PeriodicFunction
from ..algebra.groups import GroupSpec
from ..analytic.circle import assemble_circle, compress, operator_matrix
from ..analytic.schemes import CircleFourier, DiscretizedOperator, LineGrid
from ..errors import DomainError, InvarianceViolationError, PreconditionError
from .operators import NCOperatorSpec, SymbolPair, Term


def trivial_character(G: GroupSpec, g) -> int:
    return 1


def orientation_character(G: GroupSpec, g) -> int:
    """Action on one-forms ``dphi``: orientation-reversing elements flip the sign."""
    return G.orientation(g)


CHARACTERS = {"functions": trivial_character, "one-forms": orientation_character}


def _character(chi):
    if chi is None:
        return trivial_character
    if isinstance(chi, str):
        if chi not in CHARACTERS:
            raise DomainError(f"unknown bundle {chi!r}")
        return CHARACTERS[chi]
    return chi


def as_operator(P: CrossedElement, chi=None) -> NCOperatorSpec:
    """The order-zero operator ``sum_g chi(g) T(g) P(g)`` for a scalar crossed element."""
    if P.rank != 1:
        raise DomainError("scalar projections only")
    chi = _character(chi)
    G = P.group
    terms = [Term(g, 0, PeriodicFunction(G.L, v[0, 0] * chi(G, g))) for g, v in P.items()]
    return NCOperatorSpec(G, 0, terms, N=P.N, check_order=False)


def twist_projection(P, rep, chi=None) -> np.ndarray:
    """Matrix of ``sum_g T_E(g) P(g)`` on a discretized section space.

    ``rep`` is an integer ``N`` (Fourier modes ``|k| <= N`` on the circle) or
    a ``LineGrid`` (``P`` a Rieffel projection or an element over the
    unit-shift action). Coefficients are truncated to the same modes, which is
    exact for constant coefficients.
    """
    if isinstance(rep, LineGrid):
        from ..analytic.line import twist_line
        return twist_line(P, rep).toarray()
    if not isinstance(rep, (int, np.integer)):
        raise DomainError("rep must be a mode count or a LineGrid")
    op = as_operator(P, chi)
    return operator_matrix(op, int(rep), int(rep))


def range_basis(Pm: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the range of a (near) orthogonal projection matrix."""
    H = 0.5 * (Pm + Pm.conj().T)
    w, V = np.linalg.eigh(H)
    bad = np.abs(w * (1 - w)) > tol
    if np.any(bad):
        raise PreconditionError(f"matrix is not a projection (eigenvalue {w[bad][0]:.3g})")
    return V[:, w > 0.5]


def projection_symbol(P: CrossedElement, chi=None) -> SymbolPair:
    """Symbol of the order-zero operator ``sum_g chi(g) T(g) P(g)`` (equal on both sheets)."""
    chi = _character(chi)
    G = P.group
    data = {g: v * chi(G, g) for g, v in P.items()}
    Q = CrossedElement(G, P.N, data, rank=P.rank, cap=P.cap)
    return SymbolPair(Q, Q)


def _close(a, b) -> float:
    if isinstance(a, SymbolPair):
        return a.distance(b)
    return cp_seminorm(a - b)


def _mul(a, b):
    if isinstance(a, SymbolPair):
        return a @ b
    return cp_mul(a, b)


def twisted_symbol_inverse(sigma_D, sigma_D_inv, P_dom, P_cod, tol: float = 1e-8):
    """``sigma(P_E) sigma(D)^{-1} sigma(P_F)``, the inverse of ``sigma(P_F) sigma(D) sigma(P_E)``.

    All arguments are ``SymbolPair`` values, or crossed elements for symbols
    evaluated at a fixed covector. Checks the invariance
    ``sigma(D) sigma(P_E) = sigma(P_F) sigma(D)`` and both intertwining
    identities; failure raises ``InvarianceViolationError``.
    """
    inv_res = max(_close(_mul(sigma_D, sigma_D_inv), _identity_like(sigma_D)),
                  _close(_mul(sigma_D_inv, sigma_D), _identity_like(sigma_D)))
    if inv_res > tol:
        raise InvarianceViolationError(f"sigma_D_inv is not an inverse (residual {inv_res:.2e})")
    inv_res_comm = _close(_mul(sigma_D, P_dom), _mul(P_cod, sigma_D))
    if inv_res_comm > tol:
        raise InvarianceViolationError(f"symbol does not intertwine the projections ({inv_res_comm:.2e})")
    twisted = _mul(P_cod, _mul(sigma_D, P_dom))
    inverse = _mul(P_dom, _mul(sigma_D_inv, P_cod))
    r1 = _close(_mul(twisted, inverse), P_cod)
    r2 = _close(_mul(inverse, twisted), P_dom)
    if max(r1, r2) > tol:
        raise InvarianceViolationError(f"twisted inverse fails ({r1:.2e}, {r2:.2e})")
    return inverse, max(r1, r2)


def _identity_like(a):
    if isinstance(a, SymbolPair):
        return SymbolPair.constant(a.group, a.N) if a.plus.rank == 1 else SymbolPair(
            CrossedElement.identity(a.group, a.N, a.plus.rank), CrossedElement.identity(a.group, a.N, a.plus.rank))
    return CrossedElement.identity(a.group, a.N, a.rank)


def assemble_twisted_circle(op: NCOperatorSpec, P: CrossedElement, scheme: CircleFourier,
                            chi_dom=None, chi_cod=None) -> DiscretizedOperator:
    """``op`` compressed from ``range P_E`` to ``range P_F`` on Fourier modes.

    ``P_E`` and ``P_F`` twist ``P`` with the characters of the domain and
    codomain bundles. The adjoint side maps ``range P_F`` back to ``range P_E``.
    """
    N, B = scheme.N, scheme.B
    D = assemble_circle(op, scheme)
    Qd = range_basis(twist_projection(P, N, chi_dom))
    Qc = range_basis(twist_projection(P, N + B, chi_cod))
    Qad = range_basis(twist_projection(P, N, chi_cod))
    Qac = range_basis(twist_projection(P, N + B, chi_dom))
    return compress(D, Qd, Qc, Qad, Qac)
