import numpy as np
import pytest
from hypothesis import given, strategies as st

from projkin.models import (BURGERS_FLUX, LINEAR_FLUX, FluxFunction, Scaling, SemiconductorProblem,
                            force_field, maxwellian, poisson_solve, poisson_solve_cell_fast)
from projkin.velocity_space import KINDS, build_quadrature, moment


def test_scaling_validation():
    assert Scaling(1, 0.1).transport_scale == 0.1
    assert Scaling(1, 0.1).relaxation_time == pytest.approx(0.01, rel=1e-15)
    assert Scaling(0, 0.1).transport_scale == 1.0
    for bad in [(2, 0.1), (1, 0.0), (0, -1.0), (1, float("inf"))]:
        with pytest.raises(ValueError):
            Scaling(*bad)


def test_flux_functions():
    u = np.array([-1.0, 0.5, 2.0])
    assert np.array_equal(LINEAR_FLUX(u), u)
    assert np.array_equal(LINEAR_FLUX.derivative(u), np.ones(3))
    assert np.array_equal(BURGERS_FLUX(u), u * u)
    assert np.array_equal(BURGERS_FLUX.derivative(u), 2 * u)
    with pytest.raises(ValueError):
        FluxFunction("cubic")


def test_semiconductor_defaults_and_drift():
    p = SemiconductorProblem()
    assert (p.phi_left, p.phi_right, p.temperature) == (-2.0, 0.0, 1e-2)
    assert p.drift_sign == 1
    assert SemiconductorProblem(2.0, 0.0).drift_sign == -1
    assert SemiconductorProblem(1.0, 1.0).drift_sign == 0
    with pytest.raises(ValueError):
        SemiconductorProblem(temperature=0.0)


def test_maxwellian_zero_density():
    q = build_quadrature("legendre", 8)
    assert np.array_equal(maxwellian(0.0, q, Scaling(1, 0.1), LINEAR_FLUX), np.zeros(8))


def test_maxwellian_first_moment_burgers():
    q = build_quadrature("hermite", 20)
    M = maxwellian(0.7, q, Scaling(1, 0.1), BURGERS_FLUX)
    # <v M> = 0.1 * 0.49, summed without the library helper
    assert abs(np.sum(q.weights * q.nodes * M) - 0.049) <= 1e-13


def test_maxwellian_shape_for_arrays():
    q = build_quadrature("uniform", 4)
    u = np.linspace(0, 1, 5)
    M = maxwellian(u, q, Scaling(0, 0.5), LINEAR_FLUX)
    assert M.shape == (5, 4)
    assert np.allclose(M, u[:, None] + u[:, None] / q.nodes)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("flux", [LINEAR_FLUX, BURGERS_FLUX])
@given(u=st.floats(-2, 2), eps=st.sampled_from([1e-1, 1e-2, 1e-3]), gamma=st.sampled_from([0, 1]))
def test_moment_identities(kind, flux, u, eps, gamma):
    q = build_quadrature(kind, 20)
    s = Scaling(gamma, eps)
    M = maxwellian(u, q, s, flux)
    assert abs(moment(q, M) - u) <= 1e-13 * max(1.0, abs(u))
    assert abs(moment(q, q.nodes * M) - eps ** gamma * flux(u)) <= 1e-13 * max(1.0, abs(flux(u)))


def test_poisson_harmonic():
    u = np.zeros(11)
    phi = poisson_solve(u, 1.5, -0.5, 0.2)
    assert np.max(np.abs(phi - np.linspace(1.5, -0.5, 11))) <= 1e-12


def test_poisson_quadratic_exact():
    x = np.linspace(-1, 1, 21)
    phi = poisson_solve(np.ones_like(x), 0.0, 0.0, x[1] - x[0])
    assert np.max(np.abs(phi - (x * x - 1) / 2)) <= 1e-10


def test_poisson_random_residual(rng):
    u = rng.normal(size=8)
    dx = 0.3
    phi = poisson_solve(u, 0.4, -1.1, dx)
    res = (phi[:-2] - 2 * phi[1:-1] + phi[2:]) / dx ** 2 - u[1:-1]
    assert np.max(np.abs(res)) * dx ** 2 <= 1e-12
    assert phi[0] == 0.4 and phi[-1] == -1.1


def test_poisson_cell_layout(rng):
    n, dx = 20, 0.1
    u = rng.normal(size=n)
    a, b = -2.0, 0.0
    phi = poisson_solve(u, a, b, dx, layout="cell")
    ext = np.concatenate([[2 * a - phi[0]], phi, [2 * b - phi[-1]]])
    res = (ext[:-2] - 2 * ext[1:-1] + ext[2:]) / dx ** 2 - u
    assert np.max(np.abs(res)) <= 1e-10
    assert np.allclose(poisson_solve_cell_fast(u, a, b, dx), phi, rtol=0, atol=1e-13)


@pytest.mark.parametrize("layout", ["node", "cell"])
@given(seed=st.integers(0, 1000), s=st.floats(-3, 3), t=st.floats(-3, 3))
def test_poisson_superposition(layout, seed, s, t):
    r = np.random.default_rng(seed)
    u1, u2 = r.normal(size=9), r.normal(size=9)
    b1, b2 = r.normal(size=2), r.normal(size=2)
    lhs = poisson_solve(s * u1 + t * u2, *(s * b1 + t * b2), 0.25, layout=layout)
    rhs = s * poisson_solve(u1, *b1, 0.25, layout=layout) + t * poisson_solve(u2, *b2, 0.25, layout=layout)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-11 * (1 + abs(s) + abs(t)))


def test_poisson_too_small():
    with pytest.raises(ValueError):
        poisson_solve(np.zeros(2), 0, 0, 0.1)


def test_force_field_examples():
    x = np.linspace(-1, 1, 11)
    dx = x[1] - x[0]
    assert np.allclose(force_field(0.7 * x + 2, dx), -0.7, rtol=0, atol=1e-12)
    assert np.max(np.abs(force_field(x * x, dx)[1:-1] + 2 * x[1:-1])) <= 1e-12
    # one-sided ends are also exact on quadratics
    assert np.allclose(force_field(x * x, dx)[[0, -1]], [2.0, -2.0], atol=1e-12)
    assert np.array_equal(force_field(np.full(11, 3.0), dx), np.zeros(11))
