"""Smooth crossed products ``C^inf(S^1) x| Gamma`` at finite truncation.

An element ``a`` stands for the operator ``A = sum_g T(g) a(g)`` with
``(T(g)u)(x) = u(g^{-1} x)``; each ``a(g)`` is an ``n x n`` matrix of truncated
Fourier series. Products follow from ``a(g) T(h) = T(h) (a(g) o h)``:

    (ab)(k) = sum_{gh = k} (a(g) o h) b(h).
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from ..errors import DomainError, GridMismatchError, IncompatibleAlgebraError, TruncationOverflowError
from . import fourier
from .functions import PeriodicFunction
from .groups import LATTICE, Element, GroupSpec

DEFAULT_CAP = 256


def _as_block(value, N: int, rank: int | None) -> np.ndarray:
    """Coerce a component value to an ``(n, n, 2N+1)`` complex array."""
    if isinstance(value, PeriodicFunction):
        arr = fourier.resize(value.coeffs, N)[None, None, :]
    elif np.isscalar(value):
        arr = np.zeros((1, 1, 2 * N + 1), dtype=complex)
        arr[0, 0, N] = value
    else:
        arr = np.asarray(value)
        if arr.dtype == object:
            rows = [[_as_block(v, N, 1)[0, 0] for v in row] for row in value]
            arr = np.array(rows, dtype=complex)
        elif arr.ndim == 1:
            arr = fourier.resize(arr.astype(complex), N)[None, None, :]
        elif arr.ndim == 2:
            # constant matrix
            n = arr.shape[0]
            out = np.zeros((n, n, 2 * N + 1), dtype=complex)
            out[:, :, N] = arr
            arr = out
        else:
            arr = fourier.resize(arr.astype(complex), N)
    if rank is not None and arr.shape[0] != rank:
        raise IncompatibleAlgebraError("component rank mismatch")
    return arr


class CrossedElement:
    """Finitely supported ``Gamma``-indexed family of ``n x n`` Fourier matrices.

    Values are immutable after construction. Components are kept in sorted
    key order so every reduction runs in a fixed order.
    """

    __slots__ = ("group", "N", "rank", "cap", "_data")
    __array_ufunc__ = None

    def __init__(self, group: GroupSpec, N: int, data: Mapping | None = None,
                 rank: int | None = None, cap: int = DEFAULT_CAP):
        self.group = group
        self.N = int(N)
        self.cap = int(cap)
        blocks: dict[Element, np.ndarray] = {}
        for g, v in (data or {}).items():
            g = group.canonical(g)
            arr = _as_block(v, self.N, rank)
            rank = arr.shape[0] if rank is None else rank
            if g in blocks:
                arr = blocks[g] + arr
            blocks[g] = arr
        self.rank = 1 if rank is None else rank
        for arr in blocks.values():
            arr.setflags(write=False)
        self._data = dict(sorted(blocks.items()))

    # construction helpers

    @classmethod
    def identity(cls, group: GroupSpec, N: int, rank: int = 1) -> "CrossedElement":
        return cls(group, N, {group.identity: np.eye(rank)}, rank=rank)

    @classmethod
    def zero(cls, group: GroupSpec, N: int, rank: int = 1) -> "CrossedElement":
        return cls(group, N, {}, rank=rank)

    @classmethod
    def delta(cls, group: GroupSpec, g, value=1.0, N: int = 0) -> "CrossedElement":
        """``T(g) value``."""
        if isinstance(value, PeriodicFunction):
            N = max(N, value.N)
        return cls(group, N, {g: value})

    def _new(self, data, N=None, rank=None) -> "CrossedElement":
        return CrossedElement(self.group, self.N if N is None else N, data,
                              rank=self.rank if rank is None else rank, cap=self.cap)

    # inspection

    @property
    def L(self) -> float:
        return self.group.L

    @property
    def support(self) -> list[Element]:
        return list(self._data)

    @property
    def radius(self) -> int:
        return max((self.group.norm(g) for g in self._data), default=0)

    def items(self):
        return self._data.items()

    def component(self, g) -> np.ndarray:
        g = self.group.canonical(g)
        if g in self._data:
            return self._data[g]
        return np.zeros((self.rank, self.rank, 2 * self.N + 1), dtype=complex)

    def function(self, g, i: int = 0, j: int = 0) -> PeriodicFunction:
        return PeriodicFunction(self.L, self.component(g)[i, j])

    def entry(self, i: int, j: int) -> "CrossedElement":
        return self._new({g: v[i:i + 1, j:j + 1] for g, v in self._data.items()}, rank=1)

    def with_cap(self, cap: int) -> "CrossedElement":
        return CrossedElement(self.group, self.N, self._data, rank=self.rank, cap=cap)

    def resize(self, N: int) -> "CrossedElement":
        return self._new({g: fourier.resize(v, N) for g, v in self._data.items()}, N=N)

    def prune(self, tol: float = 0.0) -> "CrossedElement":
        """Drop components whose coefficient l1 mass is ``<= tol``."""
        return self._new({g: v for g, v in self._data.items() if np.sum(np.abs(v)) > tol})

    def restrict(self, radius: int) -> "CrossedElement":
        return self._new({g: v for g, v in self._data.items() if self.group.norm(g) <= radius})

    # linear structure

    def _check(self, other: "CrossedElement"):
        if not isinstance(other, CrossedElement):
            raise IncompatibleAlgebraError("operand is not a crossed element")
        if other.group != self.group:
            raise IncompatibleAlgebraError("elements live over different group actions")
        if other.N != self.N:
            raise IncompatibleAlgebraError(f"truncation mismatch: N={self.N} vs N={other.N}")
        if other.rank != self.rank:
            raise IncompatibleAlgebraError("matrix rank mismatch")

    def __add__(self, other):
        if not isinstance(other, CrossedElement):
            other = CrossedElement.identity(self.group, self.N, self.rank) * other
        self._check(other)
        out = dict(self._data)
        for g, v in other._data.items():
            out[g] = out[g] + v if g in out else v
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({g: -v for g, v in self._data.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        if isinstance(s, CrossedElement):
            return cp_mul(self, s)
        return self._new({g: v * s for g, v in self._data.items()})

    def __rmul__(self, s):
        return self._new({g: s * v for g, v in self._data.items()})

    def __matmul__(self, other):
        return cp_mul(self, other)

    def __repr__(self):
        return (f"CrossedElement(group={self.group.kind}, N={self.N}, rank={self.rank}, "
                f"support={self.support})")

    def norm(self, n: int = 0, l: int = 0) -> float:
        return cp_seminorm(self, n, l)

    def distance(self, other: "CrossedElement") -> float:
        return cp_seminorm(self - other, 0, 0)


def block(rows: Iterable[Iterable[CrossedElement | None]]) -> CrossedElement:
    """Assemble a block matrix of crossed elements (``None`` means zero)."""
    rows = [list(r) for r in rows]
    ref = next(e for r in rows for e in r if e is not None)
    sizes_r = [next(e.rank for e in r if e is not None) for r in rows]
    sizes_c = [next(rows[i][j].rank for i in range(len(rows)) if rows[i][j] is not None)
               for j in range(len(rows[0]))]
    n = sum(sizes_r)
    keys = sorted({g for r in rows for e in r if e is not None for g in e.support})
    data = {}
    for g in keys:
        arr = np.zeros((n, n, 2 * ref.N + 1), dtype=complex)
        r0 = 0
        for i, row in enumerate(rows):
            c0 = 0
            for j, e in enumerate(row):
                if e is not None:
                    if e.group != ref.group or e.N != ref.N:
                        raise IncompatibleAlgebraError("blocks live in different algebras")
                    arr[r0:r0 + sizes_r[i], c0:c0 + sizes_c[j]] = e.component(g)
                c0 += sizes_c[j]
            r0 += sizes_r[i]
        data[g] = arr
    return CrossedElement(ref.group, ref.N, data, rank=n, cap=ref.cap)


def sub_block(a: CrossedElement, rows: slice, cols: slice) -> CrossedElement:
    data = {g: v[rows, cols] for g, v in a.items()}
    n = len(range(*rows.indices(a.rank)))
    return CrossedElement(a.group, a.N, data, rank=n, cap=a.cap)


def cp_mul(a: CrossedElement, b: CrossedElement, cap: int | None = None) -> CrossedElement:
    """Crossed product with re-truncation of every component to ``N``."""
    a._check(b)
    cap = min(a.cap, b.cap) if cap is None else cap
    if a.group.kind == LATTICE and a.radius + b.radius > cap:
        raise TruncationOverflowError(
            f"product support radius {a.radius + b.radius} exceeds cap {cap}")
    G, N = a.group, a.N
    M = fourier.fft_size(3 * N + 2)
    if not a._data or not b._data:
        return a._new({})
    keys_a = list(a._data)
    A = np.stack([a._data[g] for g in keys_a])
    acc: dict[Element, np.ndarray] = {}
    for h, bv in b._data.items():
        sign, shift = G.action(h)
        Bs = np.moveaxis(fourier.to_samples(bv, M), -1, 0)
        As = np.moveaxis(fourier.to_samples(fourier.pullback(A, sign, shift, G.L), M), -1, 1)
        prods = As @ Bs  # (g, M, i, k): pointwise matrix products
        for idx, g in enumerate(keys_a):
            k = G.mul(g, h)
            if k in acc:
                acc[k] += prods[idx]
            else:
                acc[k] = prods[idx].copy()
    out = {k: fourier.from_samples(np.moveaxis(acc[k], 0, -1), N) for k in sorted(acc)}
    return a._new(out).with_cap(cap)


def cp_seminorm(a: CrossedElement, n: int = 0, l: int = 0) -> float:
    """``sup_g ||a(g)||_n (1 + |g|)^l`` with the Wiener-type ``C^n`` norm on coefficients.

    Matrix components use the max-row-sum of entry norms.
    """
    if n < 0 or l < 0:
        raise DomainError("seminorm orders must be non-negative")
    w = np.abs(2 * np.pi * fourier.modes(a.N) / a.L)
    # a fixed set of orders keeps the summation order, hence monotonicity in n, exact
    weights = np.stack([w**j for j in range(max(n, 4) + 1)])
    best = 0.0
    for g, v in a.items():
        entry = np.max((np.abs(v) @ weights.T)[..., :n + 1], axis=-1)
        val = float(np.max(np.sum(entry, axis=1))) * (1 + a.group.norm(g)) ** l
        best = max(best, val)
    return best


def derive_phi(a: CrossedElement, order: int = 1) -> CrossedElement:
    """Componentwise derivative in the circle coordinate."""
    return a._new({g: fourier.derivative(v, a.L, order) for g, v in a.items()})


def comm_phi(a: CrossedElement) -> CrossedElement:
    """The derivation ``[phi, .]``: ``[phi, T(g)] = (g . alpha) T(g)`` for rotations.

    On the unit-shift action (``U = T(1)``, ``alpha = -1``) the component at
    ``n`` is multiplied by ``-n``.
    """
    if a.group.kind != LATTICE:
        raise DomainError("[phi, .] needs a rotation action by a lattice")
    return a._new({g: v * a.group.displacement(g) for g, v in a.items()})


def _grid_index(shift: float, L: float, M: int, tol: float = 1e-9) -> int | None:
    s = shift / (L / M)
    r = round(s)
    return int(r) % M if abs(s - r) <= tol * max(1.0, abs(s)) else None


def cp_apply(a: CrossedElement, u: np.ndarray, interpolate: bool = False) -> np.ndarray:
    """Apply ``A = sum_g T(g) a(g)`` to samples on ``x_j = j L / M``.

    ``u`` has shape ``(M,)`` for scalar elements or ``(n, M)``. Shifts must be
    grid multiples unless ``interpolate`` is set, in which case the shifted
    values are obtained by trigonometric interpolation.
    """
    u = np.asarray(u, dtype=complex)
    vector = u.ndim == 1
    if vector:
        u = u[None, :]
    M = u.shape[-1]
    G = a.group
    out = np.zeros_like(u)
    idx = np.arange(M)
    for g, v in a.items():
        w = np.einsum("ijm,jm->im", fourier.to_samples(v, M), u)
        sign, shift = G.action(g)
        j0 = _grid_index(shift, G.L, M)
        if j0 is not None:
            # (w o g^{-1})(x_j) = w(sign (x_j - t))
            out += w[:, (sign * (idx - j0)) % M]
        elif interpolate:
            K = (M - 1) // 2
            wc = np.fft.fft(w, axis=-1) / M
            coeffs = wc[:, fourier.modes(K) % M]
            # g^{-1}(y) = sign*y - sign*shift
            moved = fourier.pullback(coeffs, sign, -sign * shift, G.L)
            out += fourier.to_samples(moved, M)
        else:
            raise GridMismatchError(
                f"shift {shift} is not a multiple of the grid spacing {G.L / M}")
    return out[0] if vector else out
