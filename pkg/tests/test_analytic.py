import math

import numpy as np
import pytest

from ncindex.acceptance import gaussian_family
from ncindex.algebra import fourier
from ncindex.algebra.crossed import CrossedElement
from ncindex.algebra.functions import PeriodicFunction
from ncindex.algebra.groups import reflection
from ncindex.analytic.circle import apply_pointwise, assemble_circle, operator_matrix
from ncindex.analytic.index import numerical_index
from ncindex.analytic.line import (assemble_twisted_dirac_line, central_stencil, line_index,
                                   wilson_stencil)
from ncindex.analytic.schemes import Basis, CircleFourier, DiscretizedOperator, LineGrid
from ncindex.analytic.torus_map import (TorusGrid, correspondence_residuals, line_samples, line_to_torus,
                                        quasi_periodicity_residual, torus_to_line)
from ncindex.errors import BoundaryTailError, DomainError, IndeterminateIndexError
from ncindex.rieffel import build_rieffel, unit_projection
from ncindex.suite import d_phi_operator, elliptic_suite, random_operator
from ncindex.symbols.operators import NCOperatorSpec, Term
from ncindex.symbols.twisting import assemble_twisted_circle


# -- circle assembly ----------------------------------------------------------------


def test_derivative_is_diagonal(golden):
    op = NCOperatorSpec(golden, 1, [Term((0,), 1, PeriodicFunction.constant(1.0, golden.L))])
    A = operator_matrix(op, 6, 6)
    k = fourier.modes(6)
    assert np.allclose(A, np.diag(2 * np.pi * k / golden.L))


def test_shift_is_diagonal_phase(golden):
    op = NCOperatorSpec(golden, 0, [Term((1,), 0, PeriodicFunction.constant(1.0, golden.L))])
    A = operator_matrix(op, 6, 6)
    k = fourier.modes(6)
    alpha = golden.shifts[0]
    assert np.allclose(A, np.diag(np.exp(-1j * k * alpha * 2 * np.pi / golden.L)))


def test_matrix_matches_pointwise_evaluation(rng, golden):
    n, M = 12, 97
    for order in (0, 1, 2):
        op = random_operator(rng, golden, 8, order)
        u = rng.normal(size=2 * n + 1) + 1j * rng.normal(size=2 * n + 1)
        n_out = n + op.bandwidth
        coeffs = operator_matrix(op, n, n_out) @ u
        x = np.arange(M) * golden.L / M
        via_matrix = np.exp(2j * np.pi * np.outer(x, fourier.modes(n_out)) / golden.L) @ coeffs
        direct = apply_pointwise(op, u, M)
        assert np.max(np.abs(via_matrix - direct)) <= 1e-10 * np.max(np.abs(direct))


def test_bandwidth_checked(rng, golden):
    op = random_operator(rng, golden, 8, 1)
    with pytest.raises(DomainError):
        assemble_circle(op, CircleFourier(16, 0))


# -- numerical index ---------------------------------------------------------------


def test_derivative_full_space_index_zero(golden):
    op = NCOperatorSpec(golden, 1, [Term((0,), 1, PeriodicFunction.constant(1.0, golden.L))])
    an = numerical_index(assemble_circle(op, CircleFourier(64, 0)))
    assert an.index == 0 and an.kernel_dim == 1 and an.cokernel_dim == 1


def test_even_to_odd_derivative():
    G = reflection()
    from ncindex.suite import character_projection
    D = assemble_twisted_circle(d_phi_operator(G), character_projection(G, 0), CircleFourier(128, 0),
                                "functions", "one-forms")
    an = numerical_index(D)
    assert an.index == 1 and an.gap_ratio >= 1e3


@pytest.mark.parametrize("item", elliptic_suite(), ids=lambda s: s.name)
def test_adjoint_consistency_circle(item):
    D = assemble_circle(item.op, CircleFourier(64, item.op.bandwidth))
    assert numerical_index(D).index == -numerical_index(D.swapped()).index == item.expected


@pytest.mark.parametrize("item", elliptic_suite(), ids=lambda s: s.name)
def test_index_stable_under_doubling(item):
    a = numerical_index(assemble_circle(item.op, CircleFourier(64, item.op.bandwidth))).index
    b = numerical_index(assemble_circle(item.op, CircleFourier(128, item.op.bandwidth))).index
    assert a == b


def test_no_gap_is_indeterminate():
    # singular values spread evenly across the threshold
    A = np.diag(np.logspace(0, -12, 40))
    basis = Basis("grid", np.arange(40))
    D = DiscretizedOperator(A, A, basis, basis, basis, True)
    with pytest.raises(IndeterminateIndexError):
        numerical_index(D)


# -- line discretization --------------------------------------------------------------


def test_stencils():
    x = np.arange(-4, 5) * 0.1
    w = central_stencil(8)
    assert abs(w @ np.sin(1 + x) / 0.1 - np.cos(1)) < 1e-9
    assert abs(np.sum(wilson_stencil(8))) < 1e-15
    assert np.allclose(wilson_stencil(8), wilson_stencil(8)[::-1])


def test_unit_projection_kernel_is_gaussian():
    grid = LineGrid(16, 20.0)
    res, D, tail = line_index(unit_projection(0.45), grid)
    assert res.index == 1 and res.kernel_dim == 1 and res.gap_ratio >= 1e3
    assert tail < 1e-6


@pytest.mark.parametrize("theta,expected", [(0.7, -1), (0.45, -2)])
def test_rieffel_line_index(theta, expected):
    res, D, tail = line_index(build_rieffel(theta, N=512), LineGrid(32, 26.0))
    assert res.index == expected and res.gap_ratio >= 1e3 and tail < 1e-6


def test_line_adjoint_consistency():
    res, D, _ = line_index(build_rieffel(0.45, N=512), LineGrid(32, 26.0))
    assert numerical_index(D.swapped(), normalize=False).index == -res.index


def test_full_and_reduced_agree():
    P = build_rieffel(0.7, N=256)
    grid = LineGrid(16, 14.0)
    red = numerical_index(assemble_twisted_dirac_line(P, grid, "reduced"), normalize=False)
    full = numerical_index(assemble_twisted_dirac_line(P, grid, "full"), normalize=False)
    assert red.index == full.index


def test_wilson_term_removes_doubler():
    # without the extra term the lattice doubler cancels the kernel
    grid = LineGrid(16, 20.0)
    plain = numerical_index(assemble_twisted_dirac_line(unit_projection(0.45), grid, wilson=False),
                            normalize=False)
    assert plain.index != 1


def test_short_box_rejected():
    for L in (3.5, 7.0):
        with pytest.raises(BoundaryTailError):
            line_index(unit_projection(0.45), LineGrid(16, L))


def test_tail_reported():
    grid = LineGrid(16, 9.0)
    _, _, tail = line_index(unit_projection(0.45), grid, tail_tol=None)
    assert 0 < tail < 1e-6
    with pytest.raises(BoundaryTailError):
        line_index(unit_projection(0.45), grid, tail_tol=1e-12)


# -- line to torus ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def torus_grid():
    return TorusGrid.for_theta(0.45)


def test_round_trip_and_quasi_periodicity(torus_grid):
    for u, _ in gaussian_family(5):
        S = line_samples(u, torus_grid)
        back = torus_to_line(line_to_torus(S, torus_grid), torus_grid)
        assert np.max(np.abs(back - S)) <= 1e-8 * np.max(np.abs(S))
        assert quasi_periodicity_residual(u, torus_grid) <= 1e-10


def test_operator_correspondence(torus_grid):
    for u, du in gaussian_family(5, seed=3):
        res = correspondence_residuals(u, du, torus_grid)
        assert set(res) == {"derivative", "position", "exponential", "shift"}
        assert max(res.values()) <= 1e-6


def test_insufficient_decay_rejected(torus_grid):
    with pytest.raises(DomainError):
        line_to_torus(line_samples(lambda x: 1 / (1 + x**2), torus_grid), torus_grid)
