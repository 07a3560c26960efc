import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import band_limited
from ncindex.algebra.crossed import comm_phi, cp_apply, cp_mul, cp_seminorm, derive_phi
from ncindex.algebra.groups import torus_action
from ncindex.algebra.torus import NCTorusElement, tau_e_torus
from ncindex.analytic.circle import assemble_circle
from ncindex.analytic.index import numerical_index
from ncindex.analytic.schemes import CircleFourier
from ncindex.suite import elliptic_suite, golden_group, lower_order_perturbation, random_element

SETTINGS = settings(max_examples=25, deadline=None)
seeds = st.integers(0, 2**32 - 1)
thetas = st.floats(0.2, 0.95).filter(lambda t: abs(1 / t - round(1 / t)) > 1e-3)


@SETTINGS
@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    G = golden_group()
    a, b, c = (random_element(rng, G, 24, radius=2) for _ in range(3))
    assert cp_seminorm(cp_mul(cp_mul(a, b), c) - cp_mul(a, cp_mul(b, c))) <= 1e-9


@SETTINGS
@given(seeds, thetas)
def test_product_is_operator_composition(seed, theta):
    rng = np.random.default_rng(seed)
    G = torus_action(theta)
    a, b = random_element(rng, G, 8, 1), random_element(rng, G, 8, 1)
    u = band_limited(rng, 48, 3, theta)
    lhs = cp_apply(cp_mul(a, b), u, interpolate=True)
    rhs = cp_apply(a, cp_apply(b, u, interpolate=True), interpolate=True)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(rhs)))


@SETTINGS
@given(seeds, thetas)
def test_comm_phi_is_a_derivation(seed, theta):
    rng = np.random.default_rng(seed)
    G = torus_action(theta)
    a, b = random_element(rng, G, 8, 2), random_element(rng, G, 8, 2)
    lhs = comm_phi(cp_mul(a, b))
    rhs = cp_mul(comm_phi(a), b) + cp_mul(a, comm_phi(b))
    assert cp_seminorm(lhs - rhs) <= 1e-12


@SETTINGS
@given(seeds)
def test_derive_phi_leibniz(seed):
    rng = np.random.default_rng(seed)
    G = golden_group()
    a, b = random_element(rng, G, 32), random_element(rng, G, 32)
    lhs = derive_phi(cp_mul(a, b))
    rhs = cp_mul(derive_phi(a), b) + cp_mul(a, derive_phi(b))
    assert cp_seminorm(lhs - rhs) <= 1e-10


@SETTINGS
@given(seeds, thetas)
def test_torus_trace_property(seed, theta):
    rng = np.random.default_rng(seed)
    a = NCTorusElement(theta, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    b = NCTorusElement(theta, rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    assert abs(tau_e_torus(a.multiply(b, 8)) - tau_e_torus(b.multiply(a, 8))) <= 1e-10


@SETTINGS
@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_seminorm_monotone(seed, n, l):
    rng = np.random.default_rng(seed)
    a = random_element(rng, golden_group(), 12, radius=2)
    base = cp_seminorm(a, n, l)
    assert cp_seminorm(a, n + 1, l) >= base and cp_seminorm(a, n, l + 1) >= base


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from(elliptic_suite()))
def test_lower_order_terms_keep_index(seed, item):
    rng = np.random.default_rng(seed)
    p = lower_order_perturbation(rng, item.op)
    assert numerical_index(assemble_circle(p, CircleFourier(64, p.bandwidth))).index == item.expected
