"""Twisted Dirac operator ``P (x + d/dx) P`` on a grid of the real line.

``U`` is the index shift by ``q`` (``h = 1/q``), so the projection
``P = U^{-1} g + f + g U`` couples only the sites ``x`` and ``x + 1``. It is
block diagonal with ``1 x 1`` and ``2 x 2`` blocks, and its range has an
orthonormal basis of vectors supported on at most two sites. The index of
``A = P B P + (1 - P)`` on the full space equals the index of ``P B`` from
``range P`` to itself, so the matrix that gets counted is
``Q^T B Q_dom`` with ``Q`` that basis and ``Q_dom`` its interior part.

``d/dx`` is the order-``p`` central difference plus a Wilson-type term
``(1/h) (-Delta/2)^{p/2}``. The bare central difference has a doubler at the
edge of the Brillouin zone (a second copy of the continuum kernel), which
makes the index vanish. The extra term is ``O(h^{p-1})`` on smooth functions
and lifts the doubler to order ``1/h``.
"""

from __future__ import annotations

from math import factorial

import numpy as np
import scipy.sparse as sp

from ..algebra.crossed import CrossedElement
from ..algebra.groups import is_torus_action
from ..errors import BoundaryTailError, DomainError, GridMismatchError
from ..rieffel import RieffelProjection
from .index import AnalyticIndex, numerical_index
from .schemes import Basis, DiscretizedOperator, LineGrid


# half-width where exp(-x^2 / 2) drops to 1e-12
GAUSSIAN_ROOM = float(np.sqrt(2 * np.log(1e12)))


def central_stencil(p: int) -> np.ndarray:
    """Weights at offsets ``-p/2..p/2`` of the order-``p`` first derivative (unit spacing)."""
    r = p // 2
    w = np.zeros(p + 1)
    for m in range(1, r + 1):
        c = (-1) ** (m + 1) * factorial(r) ** 2 / (m * factorial(r - m) * factorial(r + m))
        w[r + m], w[r - m] = c, -c
    return w


def wilson_stencil(p: int) -> np.ndarray:
    """Weights of ``(-Delta/2)^{p/2}`` at offsets ``-p/2..p/2``."""
    s = np.array([1.0])
    for _ in range(p // 2):
        s = np.convolve(s, np.array([-0.5, 1.0, -0.5]))
    return s


def banded(stencil: np.ndarray, n: int) -> sp.csr_matrix:
    r = len(stencil) // 2
    offs = list(range(-r, r + 1))
    return sp.diags([np.full(n - abs(o), stencil[o + r]) for o in offs], offs, shape=(n, n), format="csr")


def dirac_parts(grid: LineGrid, wilson: bool = True):
    """Sparse ``X``, ``D`` (antisymmetric) and ``W`` (symmetric) on the grid."""
    x = grid.x
    n = x.size
    X = sp.diags(x, 0, format="csr")
    D = banded(central_stencil(grid.p), n) / grid.h
    W = banded(wilson_stencil(grid.p), n) / grid.h if wilson else sp.csr_matrix((n, n))
    return X, D, W


def _couplings(P, x: np.ndarray):
    """Diagonal ``f(x)`` and the couplings ``P[x, x+1]``, ``P[x, x-1]`` on the grid."""
    if isinstance(P, RieffelProjection):
        r = P.ramp
        return r.f(x), r.g(x), r.g(x - 1)
    if not is_torus_action(P.group) or P.rank != 1:
        raise DomainError("line twisting needs a scalar element over the unit-shift action")
    if any(abs(g[0]) > 1 for g in P.support):
        raise DomainError("line twisting handles components -1, 0, 1 only")
    # (T(m) a u)(x) = a(x + m) u(x + m)
    f = P.function((0,))(x)
    up = P.function((1,))(x + 1)
    down = P.function((-1,))(x - 1)
    return f, up, down


def twist_line(P, grid: LineGrid) -> sp.csr_matrix:
    """``sum_n T(n) P(n)`` on the grid with ``(T(n)u)(x) = u(x + n)``."""
    x = grid.x
    n, q = x.size, grid.q
    f, up, down = _couplings(P, x)
    j = np.arange(n)
    hi, lo = j + q < n, j - q >= 0
    rows = np.concatenate([j, j[hi], j[lo]])
    cols = np.concatenate([j, j[hi] + q, j[lo] - q])
    vals = np.concatenate([f, up[hi], down[lo]])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def range_basis(P, grid: LineGrid, tol: float = 1e-9):
    """Orthonormal basis of the range of the line projection on complete blocks.

    Returns a sparse matrix with one column per range vector, the sites each
    column touches, and the largest deviation of a block spectrum from
    ``{0, 1}``. Blocks cut by the box edge are left out.
    """
    x = grid.x
    n, q = x.size, grid.q
    f, up, down = _couplings(P, x)
    f, up, down = np.real_if_close(f), np.real_if_close(up), np.real_if_close(down)
    cols: list[tuple] = []
    worst = 0.0
    for j in range(n):
        if abs(down[j]) > 0:
            continue  # handled with its lower partner
        if abs(up[j]) > 0:
            if j + q >= n:
                continue
            M = np.array([[f[j], up[j]], [down[j + q], f[j + q]]])
            w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
            worst = max(worst, abs(w[0]), abs(w[1] - 1))
            cols.append(((j, j + q), V[:, 1]))
        elif abs(f[j] - 1) <= tol:
            cols.append(((j,), np.array([1.0])))
        else:
            worst = max(worst, min(abs(f[j]), abs(f[j] - 1)))
    rows, cc, vals = [], [], []
    for i, (idx, v) in enumerate(cols):
        rows.extend(idx)
        cc.extend([i] * len(idx))
        vals.extend(v)
    Q = sp.csc_matrix((vals, (rows, cc)), shape=(n, len(cols)))
    return Q, [c[0] for c in cols], worst


def assemble_twisted_dirac_line(P, grid: LineGrid, method: str = "reduced",
                                wilson: bool = True, perturbation=None) -> DiscretizedOperator:
    """Discretize ``P (x + d/dx) P`` restricted to the range of ``P``.

    ``P`` is a ``RieffelProjection`` (closed-form ramps) or a crossed element
    over the unit-shift action; ``perturbation`` is an optional callable
    ``c(x)`` added to ``x + d/dx`` as a bounded multiplication.

    ``method="reduced"`` counts on the range basis; ``method="full"`` builds
    ``A = P B P + (1 - P)`` literally (dense, small grids only).
    """
    theta = P.theta if isinstance(P, RieffelProjection) else P.group.L
    x = grid.x
    if abs(grid.q - round(grid.q)) > 0:
        raise GridMismatchError("unit shift must be an integer number of grid steps")
    X, D, W = dirac_parts(grid, wilson)
    if perturbation is not None:
        X = X + sp.diags(np.asarray(perturbation(x), dtype=complex), 0)
    B = (X + D + W).tocsc()
    Bs = (X.conj() - D + W).tocsc()
    dom = grid.domain_mask
    meta = {"q": grid.q, "L": grid.L, "p": grid.p, "margin": grid.interior_margin,
            "theta": theta, "method": method}
    if method == "full":
        Pm = twist_line(P, grid).toarray()
        I = np.eye(x.size)
        A = Pm @ (B @ Pm) + I - Pm
        As = Pm @ (Bs @ Pm) + I - Pm
        basis = Basis("grid", x[dom], None, "interior points")
        return DiscretizedOperator(A[:, dom], As[:, dom], basis, Basis("grid", x), basis, True, meta=meta)
    if method != "reduced":
        raise DomainError(f"unknown method {method!r}")
    Q, sites, worst = range_basis(P, grid)
    keep = np.array([all(dom[s] for s in idx) for idx in sites], dtype=bool)
    Qd = Q[:, keep]
    A = (Q.T @ (B @ Qd)).toarray()
    As = (Q.T @ (Bs @ Qd)).toarray()
    labels = np.array([x[idx[0]] for idx in sites])
    dom_basis = Basis("grid", labels[keep], None, "range vectors inside the margin")
    meta.update({"range_dim": int(Q.shape[1]), "domain_dim": int(keep.sum()), "block_error": worst})
    return DiscretizedOperator(A, As, dom_basis, Basis("grid", labels, None, "range vectors"), dom_basis,
                               True, meta=meta | {"_Qd": Qd})


def null_vectors(A: np.ndarray, tol: float) -> np.ndarray:
    _, s, Vh = np.linalg.svd(A, full_matrices=False)
    return Vh[s < tol * s[0]].conj().T


def boundary_tail(D: DiscretizedOperator, grid: LineGrid, tol: float = 1e-7, band: float = 1.0) -> float:
    """Largest relative amplitude of near-null vectors (both sides) in the outer ``band`` of the domain."""
    Qd = D.meta.get("_Qd")
    x = grid.x
    edge = grid.L - grid.interior_margin
    worst = 0.0
    for M in (D.matrix, D.adjoint):
        V = null_vectors(M, tol)
        if V.size == 0:
            continue
        U = Qd @ V if Qd is not None else np.zeros((x.size, V.shape[1]), dtype=complex)
        if Qd is None:
            U[grid.domain_mask] = V
        amp = np.abs(U)
        outer = np.abs(x) > edge - band
        worst = max(worst, float(np.max(amp[outer]) / np.max(amp)))
    return worst


def line_index(P, grid: LineGrid, tol: float = 1e-7, tail_tol: float | None = 1e-6,
               **kw) -> tuple[AnalyticIndex, DiscretizedOperator, float]:
    """Numerical index of the twisted Dirac operator with a boundary-tail check.

    A box too short to hold Gaussian tails below ``1e-12`` is rejected up
    front: there the kernel vectors stop being near-null and would be missed
    silently rather than caught by the tail check.
    """
    room = grid.L - grid.interior_margin
    if room < GAUSSIAN_ROOM:
        raise BoundaryTailError(
            f"interior half-width {room:g} is below {GAUSSIAN_ROOM:.2f}, where Gaussian tails reach 1e-12; enlarge L")
    D = assemble_twisted_dirac_line(P, grid, **kw)
    res = numerical_index(D, tol, normalize=False)
    tail = boundary_tail(D, grid, tol)
    if tail_tol is not None and tail > tail_tol:
        raise BoundaryTailError(
            f"near-null vectors reach the box edge (relative amplitude {tail:.2e}); enlarge L")
    return res, D, tail
