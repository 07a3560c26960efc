import math

import numpy as np
import pytest

from conftest import band_limited
from ncindex.algebra import fourier
from ncindex.algebra.crossed import (CrossedElement, comm_phi, cp_apply, cp_mul, cp_seminorm,
                                     derive_phi)
from ncindex.algebra.functions import PeriodicFunction
from ncindex.algebra.groups import cyclic, lattice, reflection, torus_action
from ncindex.algebra.inversion import inverse_residual, invert, neumann_partial_sums
from ncindex.algebra.io import element_from_json, element_to_json, torus_from_json, torus_to_json
from ncindex.algebra.torus import NCTorusElement, U, V, tau_e_torus
from ncindex.algebra.traces import tau_g_finite
from ncindex.errors import (DomainError, GridMismatchError, IncompatibleAlgebraError,
                            NotInvertibleError, TruncationOverflowError)
from ncindex.rieffel import build_rieffel
from ncindex.suite import random_element


def dist(a, b):
    return cp_seminorm(a - b)


# -- products ---------------------------------------------------------------


def test_unit_is_neutral(rng, torus_group):
    a = random_element(rng, torus_group, 16, radius=2)
    one = CrossedElement.identity(torus_group, 16)
    assert dist(cp_mul(one, a), a) < 1e-13
    assert dist(cp_mul(a, one), a) < 1e-13


def test_torus_commutation_relation():
    theta = 0.45
    G = torus_action(theta)
    u, v = U(theta, 2).to_crossed(4), V(theta, 2).to_crossed(4)
    lhs = NCTorusElement.from_crossed(cp_mul(v, u), 2)
    rhs = NCTorusElement.from_crossed(cp_mul(u, v), 2)
    assert abs(lhs.coefficient(1, 1) - np.exp(2j * np.pi / theta) * rhs.coefficient(1, 1)) < 1e-12
    assert lhs.max_abs_diff(NCTorusElement(theta, np.exp(2j * np.pi / theta) * rhs.a)) < 1e-12
    assert G == u.group


def test_torus_product_matches_crossed(rng):
    theta = 0.3
    a = NCTorusElement(theta, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    b = NCTorusElement(theta, rng.normal(size=(5, 5)))
    direct = a.multiply(b, 4)
    via = NCTorusElement.from_crossed(cp_mul(a.to_crossed(8), b.to_crossed(8)), 4)
    assert direct.max_abs_diff(via) < 1e-11


def test_product_matches_regular_representation(rng, torus_group):
    # both operators applied to 64 band-limited test functions
    a = random_element(rng, torus_group, 8, radius=2)
    b = random_element(rng, torus_group, 8, radius=2)
    ab = cp_mul(a, b).with_cap(64)
    M = 64
    worst = 0.0
    for _ in range(64):
        u = band_limited(rng, M, 4, torus_group.L)
        lhs = cp_apply(ab, u, interpolate=True)
        rhs = cp_apply(a, cp_apply(b, u, interpolate=True), interpolate=True)
        worst = max(worst, np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    assert worst < 1e-10


def test_associativity(rng, golden):
    for _ in range(5):
        a, b, c = (random_element(rng, golden, 64, radius=2) for _ in range(3))
        assert dist(cp_mul(cp_mul(a, b), c), cp_mul(a, cp_mul(b, c))) < 1e-9


def test_incompatible_groups_rejected(rng):
    a = random_element(rng, torus_action(0.45), 4)
    b = random_element(rng, torus_action(0.3), 4)
    with pytest.raises(IncompatibleAlgebraError):
        cp_mul(a, b)


def test_support_cap(rng, torus_group):
    a = random_element(rng, torus_group, 4, radius=3).with_cap(4)
    with pytest.raises(TruncationOverflowError):
        cp_mul(a, a)
    assert cp_mul(a.with_cap(6), a.with_cap(6)).radius == 6


# -- regular representation ------------------------------------------------


def test_apply_unit_and_shift_phase():
    G = lattice([2 * math.pi / 8])
    M = 64
    x = np.arange(M) * (2 * math.pi / M)
    u = np.exp(3j * x)
    assert np.allclose(cp_apply(CrossedElement.identity(G, 0), u), u, atol=1e-14)
    g = (2,)
    out = cp_apply(CrossedElement.delta(G, g), u)
    # T(g)u = u(x - g alpha)
    assert np.allclose(out, np.exp(-3j * 2 * (2 * math.pi / 8)) * u, atol=1e-12)


def test_apply_needs_commensurate_grid(torus_group):
    u = np.ones(64)
    with pytest.raises(GridMismatchError):
        cp_apply(CrossedElement.delta(torus_group, (1,)), u)


def test_rieffel_projection_idempotent_on_samples(rng):
    r = build_rieffel(0.45, N=256)
    P = r.P
    M = 2048
    x = np.arange(M) * (0.45 / M)
    u = np.exp(-((x - 0.2) / 0.05) ** 2)
    Pu = cp_apply(P, u, interpolate=True)
    assert np.max(np.abs(cp_apply(P, Pu, interpolate=True) - Pu)) < 1e-9


# -- seminorms ----------------------------------------------------------------


def test_seminorm_examples(rng, golden):
    one = CrossedElement.identity(golden, 8)
    for n in range(3):
        for l in range(3):
            assert cp_seminorm(one, n, l) == pytest.approx(1.0)
    e3 = CrossedElement.delta(golden, (3,), 1.0, N=4)
    assert cp_seminorm(e3, 0, 2) == pytest.approx(16.0)
    a = random_element(rng, golden, 16, radius=3)
    grid = [[cp_seminorm(a, n, l) for l in range(4)] for n in range(4)]
    assert np.all(np.diff(grid, axis=0) >= 0) and np.all(np.diff(grid, axis=1) >= 0)
    with pytest.raises(DomainError):
        cp_seminorm(a, -1, 0)


# -- inversion ------------------------------------------------------------------


def test_invert_unit(golden):
    one = CrossedElement.identity(golden, 8)
    res = invert(one)
    assert dist(res.inverse, one) < 1e-14


def test_neumann_residual_halves(golden):
    N = 16
    a = CrossedElement.identity(golden, N) - 0.5 * CrossedElement.delta(golden, (1,), 1.0, N)
    sums = neumann_partial_sums(a, 8)
    res = [inverse_residual(a, s) for s in sums]
    ratios = np.array(res[1:]) / np.array(res[:-1])
    assert np.allclose(ratios, 0.5, atol=1e-12)
    for n in range(1, 8):
        assert sums[-1].function((n,)).coefficient(0) == pytest.approx(0.5**n)


def test_dense_inverse_matches_dense_solve(rng, golden):
    N = 16
    p = random_element(rng, golden, N, radius=1)
    a = CrossedElement.identity(golden, N) + p * (0.3 / p.norm())
    res = invert(a, tol=1e-9)
    assert res.residual <= 1e-9
    # dense regular-representation check on band-limited samples
    G = golden
    M = 128
    worst = 0.0
    for _ in range(8):
        u = band_limited(rng, M, 4, G.L)
        back = cp_apply(res.inverse, cp_apply(a, u, interpolate=True), interpolate=True)
        worst = max(worst, np.max(np.abs(back - u)) / np.max(np.abs(u)))
    assert worst < 1e-8


def test_non_invertible_reported(golden):
    N = 32
    s = PeriodicFunction.from_callable(np.sin, golden.L, N)
    a = CrossedElement(golden, N, {(0,): s})
    with pytest.raises(NotInvertibleError) as exc:
        invert(a, tol=1e-10, dense_budget=600)
    assert exc.value.dense_residual is not None


# -- derivations ----------------------------------------------------------------


def test_derive_phi_examples(rng, golden):
    c = CrossedElement.identity(golden, 4)
    assert cp_seminorm(derive_phi(c)) == 0
    e = CrossedElement(golden, 4, {(0,): PeriodicFunction.mode(1, golden.L, 4)})
    expect = e * (2j * math.pi / golden.L)
    assert dist(derive_phi(e), expect) < 1e-14
    a, b = random_element(rng, golden, 32), random_element(rng, golden, 32)
    lhs = derive_phi(cp_mul(a, b))
    rhs = cp_mul(derive_phi(a), b) + cp_mul(a, derive_phi(b))
    assert dist(lhs, rhs) < 1e-10


def test_comm_phi_examples(rng, torus_group):
    G = torus_group
    u = CrossedElement.delta(G, (1,), 1.0, 4)
    assert dist(comm_phi(u), -u) < 1e-15
    assert cp_seminorm(comm_phi(CrossedElement.identity(G, 4))) == 0
    r = build_rieffel(0.45, N=256)
    P = r.P
    g = P.function((-1,))
    # U^{-1} g - g U in components: -1 -> g, +1 -> -(g o shift)
    expect = CrossedElement(G, P.N, {(-1,): P.component((-1,)), (1,): -P.component((1,))})
    assert dist(comm_phi(P), expect) < 1e-12
    assert g.N == P.N
    a, b = random_element(rng, G, 8, 2), random_element(rng, G, 8, 2)
    lhs = comm_phi(cp_mul(a, b))
    rhs = cp_mul(comm_phi(a), b) + cp_mul(a, comm_phi(b))
    assert dist(lhs, rhs) < 1e-12
    with pytest.raises(DomainError):
        comm_phi(CrossedElement.identity(reflection(), 0))


# -- traces -------------------------------------------------------------------


def test_tau_one_point_space():
    G = cyclic(2)
    a = CrossedElement(G, 0, {(0,): 2.0, (1,): 5.0})
    assert tau_g_finite(a, (1,), point_space=True).trace()[0] == pytest.approx(5.0)
    assert tau_g_finite(a, (0,), point_space=True).trace()[0] == pytest.approx(2.0)


def test_tau_reflection_average():
    G = reflection()
    P = CrossedElement(G, 0, {(0,): 0.5, (1,): 0.5})
    t = tau_g_finite(P, (0,))
    assert t.kind == "circle"
    assert t.trace().mean() == pytest.approx(0.5)
    with pytest.raises(DomainError):
        tau_g_finite(P, (5,))


def test_tau_trace_property(rng):
    G = reflection()
    a, b = random_element(rng, G, 16, 1), random_element(rng, G, 16, 1)
    for g in G.elements():
        x = tau_g_finite(cp_mul(a, b), g).trace()
        y = tau_g_finite(cp_mul(b, a), g).trace()
        diff = x - y
        val = diff.norm() if hasattr(diff, "norm") else np.max(np.abs(diff))
        assert val < 1e-12


def test_tau_torus(rng):
    theta = 0.45
    assert tau_e_torus(NCTorusElement.unit(theta, 2)) == 1
    assert tau_e_torus(NCTorusElement.monomial(theta, 1, -2, 3)) == 0
    a = NCTorusElement(theta, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    b = NCTorusElement(theta, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    assert abs(tau_e_torus(a.multiply(b, 8)) - tau_e_torus(b.multiply(a, 8))) < 1e-10
    r = build_rieffel(theta, N=256)
    P = NCTorusElement.from_crossed(r.P)
    assert abs(tau_e_torus(P) - (1 / theta - 2)) < 1e-8


# -- serialization ---------------------------------------------------------------


def test_json_round_trip(rng, golden):
    a = random_element(rng, golden, 8, radius=1, rank=2)
    b = element_from_json(element_to_json(a))
    assert dist(a, b) == 0 and b.rank == 2
    t = NCTorusElement(0.3, rng.normal(size=(3, 3)))
    assert torus_from_json(torus_to_json(t)).max_abs_diff(t) == 0


def test_fourier_helpers():
    c = fourier.sample(lambda x: np.cos(x) ** 2, 2 * math.pi, 4)
    assert abs(c[4] - 0.5) < 1e-14 and abs(c[6] - 0.25) < 1e-14
    assert fourier.resize(c, 2).size == 5
