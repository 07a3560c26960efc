"""Differential traces of degree zero on finite-group crossed products."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from . import fourier
from .crossed import CrossedElement
from .functions import PeriodicFunction


@dataclass(frozen=True)
class TauValue:
    """``tau_g(a)`` restricted to the fixed set of ``g``.

    ``kind`` is ``"circle"`` (``coeffs`` holds an ``n x n`` Fourier matrix),
    ``"points"`` (``values[i]`` is the matrix at ``points[i]``), ``"empty"``,
    or ``"point"`` for the one-point space.
    """

    kind: str
    L: float
    coeffs: np.ndarray | None = None
    points: tuple[float, ...] = ()
    values: np.ndarray | None = None

    def trace(self):
        if self.kind == "circle":
            return PeriodicFunction(self.L, np.trace(self.coeffs, axis1=0, axis2=1))
        if self.kind == "empty":
            return np.zeros(0, dtype=complex)
        return np.trace(self.values, axis1=-2, axis2=-1)


def tau_g_finite(a: CrossedElement, g, point_space: bool = False) -> TauValue:
    """``sum_{g' in <g>}`` of the centralizer average of ``a(g') o h``, on the fixed set of ``g``.

    The centralizer carries the normalized counting measure. With
    ``point_space`` the group acts on a single point and components are read
    as constants.
    """
    G = a.group
    if not G.is_finite:
        raise DomainError("tau_g_finite needs a finite group")
    if not G.contains(g):
        raise DomainError(f"{g} is not an element of the group")
    g = G.canonical(g)
    cls = G.conjugacy_class(g)
    cent = G.centralizer(g)
    if point_space:
        val = sum(a.component(gp)[:, :, a.N] for gp in cls)
        return TauValue("point", a.L, points=(0.0,), values=np.asarray(val)[None])
    acc = np.zeros((a.rank, a.rank, 2 * a.N + 1), dtype=complex)
    for gp in cls:
        comp = a.component(gp)
        for h in cent:
            sign, shift = G.action(h)
            acc = acc + fourier.pullback(comp, sign, shift, G.L)
    acc = acc / len(cent)
    fixed = G.fixed_points(g)
    if fixed == "circle":
        return TauValue("circle", a.L, coeffs=acc)
    if not fixed:
        return TauValue("empty", a.L, points=(), values=np.zeros((0, a.rank, a.rank), dtype=complex))
    pts = np.asarray(fixed, dtype=float)
    k = fourier.modes(a.N)
    e = np.exp(2j * np.pi * np.outer(pts, k) / a.L)
    vals = np.einsum("pk,ijk->pij", e, acc)
    return TauValue("points", a.L, points=tuple(fixed), values=vals)


def tau_e_mean(a: CrossedElement) -> np.ndarray:
    """Mean value of the identity component; the trivial-class trace for rotation actions."""
    return a.component(a.group.identity)[:, :, a.N].copy()
