"""Topological index formulas on the circle.

* winding formula for torsion-free rotation groups, where only the trivial
  class contributes and the odd Chern character reduces to the winding density
  of the identity component of ``sigma^{-1} d sigma``;
* Euler fixed-point formula for finite groups, summing ``chi(M^g) ch^0_g(P)``
  over conjugacy classes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..algebra.crossed import CrossedElement, cp_mul, cp_seminorm, derive_phi
from ..algebra.groups import LATTICE, GroupSpec
from ..algebra.inversion import invert
from ..algebra.traces import tau_g_finite
from ..errors import DomainError, NonIntegralIndexError, NotInvertibleError, PreconditionError
from .operators import SymbolPair

# test hook: "winding-sign" flips the sign of the winding formula
FAULT_ENV = "NCINDEX_FAULT"


def _fault(name: str) -> bool:
    return name in os.environ.get(FAULT_ENV, "").split(",")


@dataclass(frozen=True)
class WindingIndex:
    value: float
    snapped: int
    residual: float
    plus: complex
    minus: complex


def _log_derivative_mean(s: CrossedElement, tol: float) -> complex:
    inv = invert(s, tol).inverse
    dens = cp_mul(inv, derive_phi(s))
    e = s.group.identity
    return complex(np.trace(dens.component(e)[:, :, s.N]))


def winding_index(sigma: SymbolPair, tol: float = 1e-6, inv_tol: float = 1e-11) -> WindingIndex:
    """``-(1/2 pi i) int [(s_+^{-1} s_+')(e) - (s_-^{-1} s_-')(e)] dphi`` by exact Fourier means."""
    G = sigma.group
    sigma = sigma.resize(max(sigma.N, 64))
    if G.kind != LATTICE:
        raise PreconditionError("the winding formula needs a torsion-free rotation group")
    try:
        wp = _log_derivative_mean(sigma.plus, inv_tol)
        wm = _log_derivative_mean(sigma.minus, inv_tol)
    except NotInvertibleError as exc:
        raise PreconditionError(f"symbol is not elliptic at this truncation: {exc}") from exc
    z = -(G.L * (wp - wm)) / (2j * np.pi)
    if _fault("winding-sign"):
        z = -z
    snapped = int(round(z.real))
    residual = abs(z - snapped)
    if residual > tol:
        raise NonIntegralIndexError(f"winding integral {z} is not integral")
    return WindingIndex(float(z.real), snapped, float(residual), G.L * wp / (2j * np.pi),
                        G.L * wm / (2j * np.pi))


# -- fixed-point strata ------------------------------------------------------


@dataclass(frozen=True)
class FixedComponent:
    euler_characteristic: int
    location: str | float  # "circle" or a point


@dataclass(frozen=True)
class FixedPointStratum:
    representative: tuple[int, ...]
    components: tuple[FixedComponent, ...]


def fixed_point_strata(G: GroupSpec) -> list[FixedPointStratum]:
    """Analytic fixed sets for every conjugacy class of a finite circle action."""
    if not G.is_finite:
        raise DomainError("strata are enumerated for finite groups only")
    out = []
    for g in G.elements():
        fixed = G.fixed_points(g)
        if fixed == "circle":
            comps = (FixedComponent(0, "circle"),)
        else:
            comps = tuple(FixedComponent(1, float(p)) for p in fixed)
        out.append(FixedPointStratum(g, comps))
    return out


@dataclass(frozen=True)
class ClassContribution:
    representative: tuple[int, ...]
    raw: float
    snapped: Fraction
    flagged: bool


@dataclass(frozen=True)
class EulerIndex:
    contributions: tuple[ClassContribution, ...]
    total: float
    total_snapped: Fraction

    def by_class(self) -> dict:
        return {c.representative: c for c in self.contributions}


def euler_index_finite(P: CrossedElement, strata: list[FixedPointStratum] | None = None,
                       idempotency_tol: float = 1e-9) -> EulerIndex:
    """Per-class contributions ``sum_components chi * tr tau_g(P)`` and their total."""
    G = P.group
    if not G.is_finite:
        raise PreconditionError("the Euler formula here needs a finite group")
    if cp_seminorm(cp_mul(P, P) - P) > idempotency_tol:
        raise PreconditionError("input is not a projection")
    strata = fixed_point_strata(G) if strata is None else strata
    order = G.size
    contribs = []
    for st in strata:
        tau = tau_g_finite(P, st.representative)
        tr = tau.trace()
        raw = 0.0 + 0j
        if tau.kind == "circle":
            raw = sum(c.euler_characteristic for c in st.components) * tr.mean()
        elif tau.kind == "points":
            pts = list(tau.points)
            for c in st.components:
                raw += c.euler_characteristic * tr[pts.index(c.location)]
        snapped = Fraction(raw.real).limit_denominator(order)
        flagged = abs(raw - float(snapped)) > 1e-9
        contribs.append(ClassContribution(st.representative, float(raw.real), snapped, flagged))
    total = sum(c.raw for c in contribs)
    return EulerIndex(tuple(contribs), total, sum((c.snapped for c in contribs), Fraction(0)))
