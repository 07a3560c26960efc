import math

import numpy as np
import pytest

from ncindex.algebra.crossed import CrossedElement, block, cp_mul, cp_seminorm
from ncindex.algebra.functions import PeriodicFunction
from ncindex.algebra.groups import cyclic, reflection
from ncindex.analytic.circle import assemble_circle, operator_matrix
from ncindex.analytic.index import numerical_index
from ncindex.analytic.schemes import CircleFourier, LineGrid
from ncindex.errors import (ConfigError, InvarianceViolationError, NotInvertibleError,
                            PreconditionError)
from ncindex.rieffel import build_rieffel
from ncindex.suite import (character_projection, d_phi_operator, elliptic_suite, random_elliptic_symbol,
                           random_operator)
from ncindex.symbols.formulas import euler_index_finite, fixed_point_strata, winding_index
from ncindex.symbols.io import operator_from_json, operator_to_json
from ncindex.symbols.kclass import k_class_projectors
from ncindex.symbols.operators import (NCOperatorSpec, SymbolPair, Term, compose, identity_operator,
                                       is_elliptic, mark_elliptic, parametrix_operator, principal_symbol)
from ncindex.symbols.twisting import (assemble_twisted_circle, projection_symbol, twist_projection,
                                      twisted_symbol_inverse)


def const(G, v, N=0):
    return PeriodicFunction.constant(v, G.L, N)


def one_minus_half_shift(G, N=16):
    return CrossedElement.identity(G, N) - 0.5 * CrossedElement.delta(G, (1,), 1.0, N)


# -- principal symbols ------------------------------------------------------------


def test_symbol_of_derivative(golden):
    op = NCOperatorSpec(golden, 1, [Term((0,), 1, const(golden, 1.0))])
    s = principal_symbol(op)
    one = CrossedElement.identity(golden, 0)
    assert cp_seminorm(s.plus - one) == 0 and cp_seminorm(s.minus + one) == 0


def test_symbol_keeps_shift_and_coefficient(golden):
    b = PeriodicFunction.mode(1, golden.L, 2, scale=0.7)
    op = NCOperatorSpec(golden, 2, [Term((1,), 2, b), Term((0,), 1, const(golden, 3.0, 2))])
    s = principal_symbol(op)
    expect = CrossedElement.delta(golden, (1,), b)
    assert cp_seminorm(s.plus - expect) == 0 and cp_seminorm(s.minus - expect) == 0


def test_composition_symbol_and_matrix(rng, golden):
    N = 32
    for _ in range(8):
        D = random_operator(rng, golden, N, int(rng.integers(0, 3)))
        Q = random_operator(rng, golden, N, int(rng.integers(0, 3)))
        DQ, _ = compose(D, Q)
        M = 2 * N
        lhs = principal_symbol(DQ).resize(M)
        rhs = principal_symbol(D).resize(M) @ principal_symbol(Q).resize(M)
        assert lhs.distance(rhs) <= 1e-9
        n, bd, bq = 16, D.bandwidth, Q.bandwidth
        A = operator_matrix(D, n + bq, n + bq + bd) @ operator_matrix(Q, n, n + bq)
        B = operator_matrix(DQ, n, n + bq + bd)
        assert np.max(np.abs(A - B)) <= 1e-9 * np.max(np.abs(A))


# -- ellipticity --------------------------------------------------------------------


def test_elliptic_unit(golden):
    r = is_elliptic(SymbolPair.constant(golden, 4))
    assert r.elliptic and r.parametrix.distance(SymbolPair.constant(golden, 4)) < 1e-14


def test_elliptic_via_neumann(golden):
    a = one_minus_half_shift(golden)
    r = is_elliptic(SymbolPair(a, a))
    assert r.strategy == "neumann" and r.residual <= 1e-10


def test_vanishing_coefficient_not_elliptic(golden):
    res = []
    for N in (16, 32):
        s = CrossedElement(golden, N, {(0,): PeriodicFunction.from_callable(np.sin, golden.L, N)})
        with pytest.raises(NotInvertibleError) as exc:
            is_elliptic(SymbolPair(s, CrossedElement.identity(golden, N)))
        res.append(exc.value.dense_residual)
    assert min(res) > 1e-3


def test_parametrix_kills_top_order():
    for s in elliptic_suite():
        Q = parametrix_operator(s.op)
        QD, _ = compose(Q, s.op)
        R = NCOperatorSpec(s.op.group, 0, (identity_operator(s.op.group, QD.N) + QD.scaled(-1)).terms,
                           N=QD.N, check_order=False)
        assert principal_symbol(R).norm() <= 1e-8, s.name


# -- winding formula -----------------------------------------------------------------


def test_winding_examples(golden):
    N = 8
    z = CrossedElement(golden, N, {(0,): PeriodicFunction.mode(1, golden.L, N)})
    one = CrossedElement.identity(golden, N)
    assert winding_index(SymbolPair(z, one)).snapped == -1
    assert winding_index(SymbolPair(one, one)).snapped == 0
    a = one_minus_half_shift(golden)
    w = winding_index(SymbolPair(a, a))
    op = NCOperatorSpec(golden, 0, [Term((0,), 0, const(golden, 1.0)), Term((1,), 0, const(golden, -0.5))])
    an = numerical_index(assemble_circle(op, CircleFourier(64, op.bandwidth)))
    assert w.snapped == an.index == 0


@pytest.mark.parametrize("item", elliptic_suite(), ids=lambda s: s.name)
def test_winding_matches_numerical_index(item):
    w = winding_index(principal_symbol(item.op))
    an = numerical_index(assemble_circle(item.op, CircleFourier(64, item.op.bandwidth)))
    assert w.snapped == an.index == item.expected
    assert w.residual <= 1e-6 and an.gap_ratio >= 1e3


def test_winding_needs_rotation_group():
    G = reflection()
    one = CrossedElement.identity(G, 2)
    with pytest.raises(PreconditionError):
        winding_index(SymbolPair(one, one))


# -- Euler formula ----------------------------------------------------------------


def test_reflection_contributions():
    G = reflection()
    eu = euler_index_finite(character_projection(G, 0))
    by = eu.by_class()
    assert by[(0,)].snapped == 0 and by[(1,)].snapped == 1
    assert by[(1,)].raw == pytest.approx(1.0)
    assert eu.total_snapped == 1 and not any(c.flagged for c in eu.contributions)


def test_reflection_identity_and_odd():
    G = reflection()
    assert euler_index_finite(CrossedElement.identity(G, 0)).total_snapped == 0
    assert euler_index_finite(character_projection(G, 1)).total_snapped == -1
    with pytest.raises(PreconditionError):
        euler_index_finite(CrossedElement(G, 0, {(0,): 0.5}))


@pytest.mark.parametrize("j,expected", [(0, 1), (1, -1)])
def test_reflection_analytic_matches(j, expected):
    G = reflection()
    P = character_projection(G, j)
    D = assemble_twisted_circle(d_phi_operator(G), P, CircleFourier(128, 0), "functions", "one-forms")
    an = numerical_index(D)
    assert an.index == expected == int(euler_index_finite(P).total_snapped)


def test_identity_projection_analytic():
    G = reflection()
    D = assemble_twisted_circle(d_phi_operator(G), CrossedElement.identity(G, 0), CircleFourier(128, 0),
                                "functions", "one-forms")
    assert numerical_index(D).index == 0


def test_cyclic_rotation_has_no_fixed_points():
    G = cyclic(3)
    strata = fixed_point_strata(G)
    assert [s.components for s in strata][1:] == [(), ()]
    for j in range(3):
        P = character_projection(G, j)
        assert euler_index_finite(P).total_snapped == 0
        D = assemble_twisted_circle(d_phi_operator(G), P, CircleFourier(96, 0), "functions", "one-forms")
        assert numerical_index(D).index == 0


# -- twisting ------------------------------------------------------------------------


def test_twist_projection_examples():
    G = reflection()
    N = 10
    assert np.allclose(twist_projection(CrossedElement.identity(G, 0), N), np.eye(2 * N + 1))
    Pm = twist_projection(character_projection(G, 0), N)
    assert np.allclose(Pm @ Pm, Pm, atol=1e-14)
    assert round(np.trace(Pm).real) == N + 1
    r = build_rieffel(0.45, N=256)
    grid = LineGrid(16, 20.0)
    Pl = twist_projection(r, grid)
    # blocks cut by the box edge are not projections; keep the complete ones
    n, q = Pl.shape[0], grid.q
    j = np.arange(n)
    up = np.zeros(n, dtype=bool)
    down = np.zeros(n, dtype=bool)
    up[:n - q] = np.abs(np.diagonal(Pl, q)) > 0
    down[q:] = np.abs(np.diagonal(Pl, -q)) > 0
    cut = (np.abs(r.ramp.g(grid.x)) > 0) & (j + q >= n) | (np.abs(r.ramp.g(grid.x - 1)) > 0) & (j - q < 0)
    keep = ~cut
    S = Pl[np.ix_(keep, keep)]
    assert np.linalg.norm(S @ S - S, 2) <= 1e-8
    assert up.any() and down.any()


def test_twisted_symbol_inverse_unit(golden):
    a = one_minus_half_shift(golden)
    sig, inv = mark_elliptic(SymbolPair(a, a))
    one = SymbolPair.constant(golden, a.N)
    out, res = twisted_symbol_inverse(sig, inv, one, one)
    assert out.distance(inv) < 1e-12 and res < 1e-9


def test_twisted_symbol_inverse_reflection():
    G = reflection()
    P = character_projection(G, 0)
    sig, inv = mark_elliptic(principal_symbol(d_phi_operator(G)))
    PE, PF = projection_symbol(P, "functions"), projection_symbol(P, "one-forms")
    out, res = twisted_symbol_inverse(sig, inv, PE, PF)
    assert res <= 1e-9
    twisted = PF @ (sig @ PE)
    assert (twisted @ out).distance(PF) <= 1e-9 and (out @ twisted).distance(PE) <= 1e-9
    with pytest.raises(InvarianceViolationError):
        twisted_symbol_inverse(sig, inv, PE, PE)


def test_twisted_symbol_inverse_torus():
    P = build_rieffel(0.45, N=256).P
    G = P.group
    sig = CrossedElement.identity(G, P.N) * 2.0
    inv = CrossedElement.identity(G, P.N) * 0.5
    out, res = twisted_symbol_inverse(sig, inv, P, P)
    assert res <= 1e-8
    assert cp_seminorm(out - P * 0.5) <= 1e-8


# -- K-class projectors ---------------------------------------------------------------


def _kclass_setup(rng, G, N):
    sig = random_elliptic_symbol(rng, G, N, 0.3, rank=2)
    sig, inv = mark_elliptic(sig)
    d = np.zeros((2, 2, 2 * N + 1), dtype=complex)
    d[0, 0, N] = 1.0
    P2c = CrossedElement(G, N, {G.identity: d}, rank=2)
    P2 = SymbolPair(P2c, P2c)
    P1 = inv @ (P2 @ sig)
    return sig, inv, P1, P2


def test_kclass_endpoints_and_midpoint(rng, golden):
    N = 16
    sig, inv, P1, P2 = _kclass_setup(rng, golden, N)
    K = k_class_projectors(sig, inv, P1, P2)
    A1, A2 = P1.to_matrix(), P2.to_matrix()
    assert K.q2[0].distance(block([[A1, None], [None, A2 * 0.0]])) == 0.0
    assert K.q2[-1].distance(block([[A1 * 0.0, None], [None, A2]])) == 0.0
    assert K.max_residual <= 1e-8 and len(K.q2) == 33
    # psi = 0: q2 = 1/2 [[P1, P1 s^-1 P2], [P2 s P1, P2]]
    K3 = k_class_projectors(sig, inv, P1, P2, nodes=3)
    S, Si = sig.to_matrix(), inv.to_matrix()
    mid = block([[A1, cp_mul(A1, cp_mul(Si, A2))], [cp_mul(A2, cp_mul(S, A1)), A2]]) * 0.5
    assert K3.q2[1].distance(mid) <= 1e-12
    q = K3.q2[1]
    assert cp_seminorm(cp_mul(q, q) - q) <= 1e-9


def test_kclass_rejects_non_intertwining(rng, golden):
    N = 16
    sig, inv, P1, P2 = _kclass_setup(rng, golden, N)
    with pytest.raises(InvarianceViolationError):
        k_class_projectors(sig, inv, P2, P2)


# -- serialization -----------------------------------------------------------------------


def test_operator_json_round_trip():
    for s in elliptic_suite(N=8):
        back = operator_from_json(operator_to_json(s.op))
        assert back.order == s.op.order and len(back.terms) == len(s.op.terms)
        assert np.allclose(operator_matrix(back, 8, 12), operator_matrix(s.op, 8, 12))
    with pytest.raises(ConfigError):
        operator_from_json({"group": {"kind": "lattice", "shifts": [1.0]}, "order": 0, "terms": [[[0], 0]]})
