import numpy as np
import pytest

from ncindex.algebra.crossed import cp_mul, cp_seminorm
from ncindex.errors import DegenerateParameterError, DomainError, ResolutionError
from ncindex.rieffel import (build_rieffel, build_rieffel_adaptive, conjugate_by_V, connes_index,
                             curvature_e_density, curvature_reference, frac_inverse,
                             pointwise_identity_residual, reflect_torus, unit_projection)

THETAS = (0.7, 0.45, 0.3)


@pytest.fixture(scope="module")
def projections():
    return {t: build_rieffel(t, N=256) for t in THETAS}


def test_ramp_shape():
    r = build_rieffel(0.45, N=256)
    ramp = r.ramp
    mid = 0.45 * (ramp.eps + ramp.beta) / 2
    assert ramp.f(mid) == pytest.approx(1.0)
    assert ramp.f(0.0) == pytest.approx(0.0)
    y = np.linspace(0, 0.45, 2001, endpoint=False)
    outside = (y / 0.45 >= ramp.eps)
    assert np.all(ramp.g(y)[outside] == 0)
    assert np.all((ramp.f(y) >= 0) & (ramp.f(y) <= 1))


@pytest.mark.parametrize("theta", THETAS)
def test_idempotent_and_trace(projections, theta):
    r = projections[theta]
    assert cp_seminorm(cp_mul(r.P, r.P) - r.P) <= 1e-9
    assert abs(r.trace - frac_inverse(theta)) <= 1e-8


@pytest.mark.parametrize("theta,expected", [(0.7, -1), (0.45, -2), (0.3, -3)])
def test_connes_index(projections, theta, expected):
    idx = connes_index(projections[theta])
    assert idx.snapped == expected
    assert idx.residual <= 1e-6


def test_unit_projection_index():
    idx = connes_index(unit_projection(0.45, 8))
    assert idx.snapped == 1 and idx.residual < 1e-12
    E = curvature_e_density(unit_projection(0.45, 8))
    assert abs(E.coefficient(0) - 1) < 1e-15


def test_curvature_matches_hand_reduction():
    # pointwise agreement needs the derivative of the ramp resolved, hence N=512
    r = build_rieffel(0.45, N=512)
    x = np.linspace(0, 0.45, 997, endpoint=False)
    assert np.max(np.abs(curvature_e_density(r.P)(x) - curvature_reference(r.ramp, x))) < 1e-8


@pytest.mark.parametrize("theta", THETAS)
def test_pointwise_identity(projections, theta):
    assert pointwise_identity_residual(projections[theta].ramp) < 1e-12


def test_stable_under_refinement():
    a = connes_index(build_rieffel(0.45, N=256))
    b = connes_index(build_rieffel(0.45, N=512))
    half = build_rieffel_adaptive(0.45, eps=build_rieffel(0.45).eps / 2)
    c = connes_index(half)
    assert a.snapped == b.snapped == c.snapped == -2
    assert max(a.residual, b.residual, c.residual) < 1e-6


def test_ramp_profile_independence():
    a = build_rieffel(0.45, N=256, profile="exp")
    b = build_rieffel_adaptive(0.45, N=512, profile="exp-sq")
    assert abs(a.trace - b.trace) < 1e-8
    assert connes_index(a).snapped == connes_index(b).snapped


def test_mirror_and_conjugate(projections):
    r = projections[0.45]
    m = reflect_torus(r.P)
    assert cp_seminorm(cp_mul(m, m) - m) < 1e-9
    assert abs(m.function((0,)).mean() - r.trace) < 1e-12
    c = conjugate_by_V(r.P)
    assert connes_index(c).snapped == connes_index(r).snapped


def test_parameter_errors():
    with pytest.raises(DegenerateParameterError):
        build_rieffel(0.5)
    with pytest.raises(DomainError):
        build_rieffel(0.45, eps=0.4)
    with pytest.raises(ResolutionError) as exc:
        build_rieffel(0.45, N=8)
    assert exc.value.suggested_modes >= 256
