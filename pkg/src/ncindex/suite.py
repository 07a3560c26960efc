"""Reference operators and random generators shared by the runner, the acceptance suite and tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra.crossed import CrossedElement
from .algebra.functions import PeriodicFunction
from .algebra.groups import GroupSpec, lattice
from .symbols.operators import NCOperatorSpec, SymbolPair, Term

GOLDEN = math.pi * (math.sqrt(5) - 1)  # 2 pi / golden ratio


def golden_group(L: float = 2 * math.pi) -> GroupSpec:
    return lattice([GOLDEN], L)


@dataclass(frozen=True)
class SuiteOperator:
    name: str
    op: NCOperatorSpec
    expected: int
    shifts: bool


def _f(G, coeffs: dict, N: int) -> PeriodicFunction:
    c = np.zeros(2 * N + 1, dtype=complex)
    for k, v in coeffs.items():
        c[N + k] = v
    return PeriodicFunction(G.L, c)


def elliptic_suite(N: int = 32, G: GroupSpec | None = None) -> list[SuiteOperator]:
    """Elliptic circle operators with known indices, several with genuine shift coefficients."""
    G = golden_group() if G is None else G
    e, a = (0,), (1,)
    one = _f(G, {0: 1}, N)
    z = _f(G, {1: 1}, N)
    z2 = _f(G, {2: 1}, N)
    ops = [
        ("toeplitz", 0, [Term(e, 0, z, "+"), Term(e, 0, one, "-")], -1, False),
        ("toeplitz-reversed", 0, [Term(e, 0, one, "+"), Term(e, 0, z, "-")], 1, False),
        ("shifted-toeplitz", 0, [Term(e, 0, z, "+"), Term(e, 0, one, "-"),
                                 Term(a, 0, z * -0.5, "+"), Term(a, 0, one * -0.5, "-")], -1, True),
        ("double-winding", 0, [Term(e, 0, z2, "+"), Term(e, 0, one, "-"),
                               Term(a, 0, one * -0.5, "-")], -2, True),
        ("mixed-shift", 0, [Term(e, 0, z, "+"), Term(a, 0, z2 * 0.3, "+"), Term(e, 0, one, "-")], -1, True),
        ("shifted-derivative", 1, [Term(e, 1, one), Term(a, 1, one * -0.5)], 0, True),
        ("massive-derivative", 1, [Term(e, 1, one), Term(e, 0, one * 0.5)], 0, False),
    ]
    return [SuiteOperator(name, NCOperatorSpec(G, m, terms, N=N), exp, sh) for name, m, terms, exp, sh in ops]


def random_function(rng: np.random.Generator, L: float, N: int, band: int = 3, scale: float = 1.0) -> PeriodicFunction:
    c = np.zeros(2 * N + 1, dtype=complex)
    b = min(band, N)
    c[N - b:N + b + 1] = (rng.normal(size=2 * b + 1) + 1j * rng.normal(size=2 * b + 1)) / (1 + np.abs(np.arange(-b, b + 1))) ** 2
    return PeriodicFunction(L, c * scale)


def random_element(rng: np.random.Generator, G: GroupSpec, N: int, radius: int = 1, band: int = 3,
                   rank: int = 1) -> CrossedElement:
    data = {}
    for g in G.ball(radius):
        blk = np.zeros((rank, rank, 2 * N + 1), dtype=complex)
        for i in range(rank):
            for j in range(rank):
                blk[i, j] = random_function(rng, G.L, N, band).coeffs
        data[g] = blk
    return CrossedElement(G, N, data, rank=rank)


def random_elliptic_symbol(rng: np.random.Generator, G: GroupSpec, N: int, size: float = 0.3,
                           rank: int = 1) -> SymbolPair:
    """``1 + small`` on each sheet, Neumann invertible by construction."""
    def part():
        a = random_element(rng, G, N, 1, 3, rank)
        return CrossedElement.identity(G, N, rank) + a * (size / a.norm())
    return SymbolPair(part(), part())


def random_operator(rng: np.random.Generator, G: GroupSpec, N: int, order: int, n_terms: int = 4,
                    band: int = 3, radius: int = 1) -> NCOperatorSpec:
    """Random differential operator with shifts; top order always present."""
    elems = G.ball(radius)
    terms = []
    for i in range(n_terms):
        l = order if i == 0 else int(rng.integers(0, order + 1))
        g = elems[int(rng.integers(len(elems)))]
        terms.append(Term(g, l, random_function(rng, G.L, N, band)))
    return NCOperatorSpec(G, order, terms, N=N)


def lower_order_perturbation(rng: np.random.Generator, op: NCOperatorSpec, size: float = 0.1) -> NCOperatorSpec:
    """``op`` plus a random smooth term of order ``m - 1`` (order zero stays bounded: uses ``kappa^{-1}``)."""
    G = op.group
    l = op.order - 1
    c = random_function(rng, G.L, op.N, 2)
    c = c * (size / max(c.norm(), 1e-300))
    return op + NCOperatorSpec(G, max(l, 0), [Term(G.identity, l, c)], N=op.N, check_order=False)


# -- finite-group Euler setups ------------------------------------------------


def d_phi_operator(G: GroupSpec) -> NCOperatorSpec:
    """``d/dphi = i K`` from functions to one-forms (the de Rham differential on the circle)."""
    return NCOperatorSpec(G, 1, [Term(G.identity, 1, PeriodicFunction.constant(1j, G.L))])


def character_projection(G: GroupSpec, j: int = 0) -> CrossedElement:
    """``(1/|G|) sum_g chi_j(g) T(g)`` with ``chi_j(k) = exp(2 pi i j k / m)`` on a cyclic group.

    For the reflection group ``j = 0`` gives ``(1 + T(r))/2`` and ``j = 1`` gives ``(1 - T(r))/2``.
    """
    if not G.is_finite:
        raise ValueError("character projections need a finite group")
    m = G.size
    data = {g: np.array([[[np.exp(2j * np.pi * j * g[0] / m) / m]]]) for g in G.elements()}
    return CrossedElement(G, 0, data)


REFLECTION_PROJECTIONS = {"even": 0, "odd": 1}
