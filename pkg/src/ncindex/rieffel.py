"""Rieffel projection and the curvature integral on the noncommutative torus.

Work on the unit-shift action of ``Z`` on the circle of length ``theta``
(``U = T(1)``). In the rescaled coordinate ``y = x / theta`` the shift moves
``y`` by ``beta = {1/theta}``. The function ``f`` rises on ``[0, eps]``, equals
1 up to ``beta`` and falls on ``[beta, beta + eps]`` as ``1 - f(y - beta)``;
``g = sqrt(f - f^2)`` lives on the rising arc only. Then

    P = U^{-1} g + f + g U

is a projection with trace ``beta``, and its curvature integral is ``-[1/theta]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import fourier
from .algebra.crossed import CrossedElement, comm_phi, cp_mul, cp_seminorm, derive_phi
from .algebra.functions import PeriodicFunction
from .algebra.groups import is_torus_action, torus_action
from .errors import (DegenerateParameterError, DomainError, NonIntegralIndexError, PreconditionError,
                     ResolutionError, TruncationOverflowError)


# smooth steps s(t) = psi(t) / (psi(t) + psi(1 - t)) built from flat functions psi

def _psi_exp(t):
    return np.exp(-1.0 / t)


def _dpsi_exp(t):
    return np.exp(-1.0 / t) / t**2


def _psi_exp_sq(t):
    return np.exp(-1.0 / t**2)


def _dpsi_exp_sq(t):
    return 2.0 * np.exp(-1.0 / t**2) / t**3


PROFILES = {
    "exp": (_psi_exp, _dpsi_exp),
    "exp-sq": (_psi_exp_sq, _dpsi_exp_sq),
}


def smooth_step(t, profile: str = "exp", derivative: bool = False):
    """Flat ``C^inf`` step from 0 (``t <= 0``) to 1 (``t >= 1``) and optionally its derivative."""
    psi, dpsi = PROFILES[profile]
    t = np.asarray(t, dtype=float)
    inner = (t > 0) & (t < 1)
    ti = np.where(inner, t, 0.5)
    a, b = psi(ti), psi(1 - ti)
    s = np.where(inner, a / (a + b), np.where(t >= 1, 1.0, 0.0))
    if not derivative:
        return s
    ds = (dpsi(ti) * b + a * dpsi(1 - ti)) / (a + b) ** 2
    return s, np.where(inner, ds, 0.0)


def frac_inverse(theta: float) -> float:
    return math.fmod(1.0 / theta, 1.0)


@dataclass(frozen=True)
class RampData:
    theta: float
    beta: float
    eps: float
    profile: str

    def _angle(self, x):
        """Return ``y`` and the ramp angle ``h`` (``f = sin^2 h``) with ``dh/dx``."""
        y = np.mod(np.asarray(x, dtype=float) / self.theta, 1.0)
        up, dup = smooth_step(y / self.eps, self.profile, derivative=True)
        down, ddown = smooth_step((y - self.beta) / self.eps, self.profile, derivative=True)
        on_up = y < self.eps
        plateau = (y >= self.eps) & (y < self.beta)
        on_down = (y >= self.beta) & (y < self.beta + self.eps)
        h = np.where(on_up, 0.5 * np.pi * up,
                     np.where(plateau, 0.5 * np.pi, np.where(on_down, 0.5 * np.pi * (1 - down), 0.0)))
        scale = 0.5 * np.pi / (self.eps * self.theta)
        dh = np.where(on_up, scale * dup, np.where(on_down, -scale * ddown, 0.0))
        return y, h, dh, on_up

    def f(self, x):
        _, h, _, _ = self._angle(x)
        return np.sin(h) ** 2

    def g(self, x):
        _, h, _, on_up = self._angle(x)
        return np.where(on_up, np.sin(h) * np.cos(h), 0.0)

    def df(self, x):
        _, h, dh, _ = self._angle(x)
        return np.sin(2 * h) * dh

    def dg(self, x):
        _, h, dh, on_up = self._angle(x)
        return np.where(on_up, np.cos(2 * h) * dh, 0.0)


@dataclass(frozen=True)
class RieffelProjection:
    ramp: RampData
    N: int
    f: PeriodicFunction
    g: PeriodicFunction
    P: CrossedElement
    idempotency_residual: float
    trace_residual: float

    @property
    def theta(self) -> float:
        return self.ramp.theta

    @property
    def beta(self) -> float:
        return self.ramp.beta

    @property
    def eps(self) -> float:
        return self.ramp.eps

    @property
    def trace(self) -> float:
        return self.f.mean().real


def assemble_projection(f: PeriodicFunction, g: PeriodicFunction, theta: float) -> CrossedElement:
    """``U^{-1} g + f + g U`` as a crossed element; ``g U = T(1) g(x - 1)``."""
    G = torus_action(theta)
    return CrossedElement(G, f.N, {(-1,): g, (0,): f, (1,): g.pullback(1, -1.0)})


def _suggest_modes(ramp: RampData, tol: float = 1e-13) -> int:
    big = 4096
    c = np.abs(fourier.sample(ramp.f, ramp.theta, big, M=16 * big))
    k = np.nonzero(c > tol)[0]
    need = int(np.max(np.abs(k - big))) if k.size else 16
    m = 16
    while m < need:
        m *= 2
    return m


def build_rieffel(theta: float, eps: float | None = None, N: int = 256, profile: str = "exp",
                  idempotency_tol: float = 1e-9, trace_tol: float = 1e-8,
                  certify: bool = True) -> RieffelProjection:
    """Build and certify the Rieffel projection for ``theta`` at truncation ``N``.

    ``eps`` is the ramp width in the rescaled coordinate and defaults to the
    largest admissible value ``min(beta, 1 - beta) / 2``.
    """
    if not 0 < theta < 1:
        raise DomainError("theta must lie in (0, 1)")
    if profile not in PROFILES:
        raise DomainError(f"unknown ramp profile {profile!r}")
    beta = frac_inverse(theta)
    gap = min(beta, 1 - beta)
    if gap < 1e-12:
        raise DegenerateParameterError(
            f"1/theta = {1 / theta:g} is an integer: the ramp arcs cannot be disjoint")
    bound = gap / 2
    eps = bound if eps is None else float(eps)
    if not 0 < eps <= bound * (1 + 1e-12):
        raise DomainError(f"ramp width must lie in (0, {bound:g}]")
    ramp = RampData(theta, beta, eps, profile)
    f = PeriodicFunction.from_callable(ramp.f, theta, N, real=True)
    g = PeriodicFunction.from_callable(ramp.g, theta, N, real=True)
    P = assemble_projection(f, g, theta)
    idem = cp_seminorm(cp_mul(P, P) - P)
    tr = abs(f.mean() - beta)
    if certify and (idem > idempotency_tol or tr > trace_tol):
        raise ResolutionError(
            f"Rieffel projection at N={N}: idempotency residual {idem:.3g}, trace residual {tr:.3g}",
            suggested_modes=_suggest_modes(ramp))
    return RieffelProjection(ramp, N, f, g, P, idem, tr)


def unit_projection(theta: float, N: int = 0) -> CrossedElement:
    return CrossedElement.identity(torus_action(theta), N)


def curvature_e_density(P: CrossedElement) -> PeriodicFunction:
    """Identity component of ``P - P [[phi, P], P']`` by plain crossed-product arithmetic."""
    if not is_torus_action(P.group):
        raise DomainError("curvature density needs the unit-shift action")
    for attempt in range(2):
        try:
            C, D = comm_phi(P), derive_phi(P)
            bracket = cp_mul(C, D) - cp_mul(D, C)
            E = P - cp_mul(P, bracket)
            return E.function(E.group.identity)
        except TruncationOverflowError:
            if attempt:
                raise
            P = P.with_cap(2 * P.cap + 3 * P.radius)


def curvature_reference(ramp: RampData, x) -> np.ndarray:
    """Hand-reduced identity component from closed-form ``f, g`` and their derivatives.

    With ``h_+ (x) = h(x + 1)`` and ``h_- (x) = h(x - 1)``:

        E = f - [2 f ((g g')_- - g g') - g_-^2 (f' - f'_-) + g^2 (f' - f'_+)].
    """
    x = np.asarray(x, dtype=float)
    f, g, df, dg = ramp.f, ramp.g, ramp.df, ramp.dg
    gm, dgm, dfm, dfp = g(x - 1), dg(x - 1), df(x - 1), df(x + 1)
    gx, dgx, dfx = g(x), dg(x), df(x)
    bracket_e = 2 * (gm * dgm - gx * dgx)
    return f(x) - (f(x) * bracket_e - gm**2 * (dfx - dfm) + gx**2 * (dfx - dfp))


def pointwise_identity_residual(ramp: RampData, n: int = 4096) -> float:
    """``max |f'(4f - 4f^2 + (1-2f)^2) - f'|`` on ``n`` samples of one period."""
    x = np.arange(n) * ramp.theta / n
    f, df = ramp.f(x), ramp.df(x)
    return float(np.max(np.abs(df * (4 * f - 4 * f**2 + (1 - 2 * f) ** 2) - df)))


@dataclass(frozen=True)
class ChernIndex:
    value: float
    snapped: int
    residual: float
    imag: float


def connes_index(P, tol: float = 1e-6) -> ChernIndex:
    """``(1/theta) * integral of the curvature density over one period``.

    Accepts a ``RieffelProjection`` or a projection given as a crossed element.
    """
    if isinstance(P, RieffelProjection):
        P = P.P
    if not is_torus_action(P.group):
        raise PreconditionError("projection must live over the unit-shift action")
    theta = P.group.L
    E = curvature_e_density(P)
    z = E.integral() / theta
    snapped = int(round(z.real))
    residual = abs(z - snapped)
    if residual > tol:
        raise NonIntegralIndexError(
            f"curvature integral {z.real:.12g} is {residual:.3g} away from an integer")
    return ChernIndex(float(z.real), snapped, float(residual), float(z.imag))


def reflect_torus(a: CrossedElement) -> CrossedElement:
    """Automorphism induced by ``x -> -x``: component ``n`` goes to ``-n`` with ``a(-x)``."""
    if not is_torus_action(a.group):
        raise DomainError("reflection is defined for the unit-shift action")
    return CrossedElement(a.group, a.N, {(-g[0],): v[..., ::-1] for g, v in a.items()},
                          rank=a.rank, cap=a.cap)


def conjugate_by_V(a: CrossedElement) -> CrossedElement:
    """``V a V^*`` with ``V`` the multiplication by ``exp(-2 pi i x / theta)``."""
    G = a.group
    V = CrossedElement.delta(G, G.identity, PeriodicFunction.mode(-1, G.L, a.N))
    Vs = CrossedElement.delta(G, G.identity, PeriodicFunction.mode(1, G.L, a.N))
    return cp_mul(cp_mul(V, a), Vs)


def build_rieffel_adaptive(theta: float, eps: float | None = None, N: int = 256, max_N: int = 8192,
                           **kw) -> RieffelProjection:
    """``build_rieffel`` that follows the suggested truncation until ``max_N``."""
    while True:
        try:
            return build_rieffel(theta, eps, N, **kw)
        except ResolutionError as exc:
            nxt = max(exc.suggested_modes or 0, 2 * N)
            if nxt > max_N:
                raise
            N = nxt
