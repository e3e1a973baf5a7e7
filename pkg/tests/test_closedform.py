import math

import numpy as np
import pytest

from conftest import params_for
from supint.algebra import full_integral_functions
from supint.closedform import (
    Branch,
    anomaly_of_time,
    compatibility_residuals,
    constants_from_state,
    coords_of_radius,
    energy_from_alphas,
    radius_of_time,
    state_at_anomaly,
    time_of_radius,
    trajectory_closed_form,
)
from supint.core import PhasePoint, SystemParams, hamiltonian_h, random_states
from supint.dynamics import integrate
from supint.errors import UnsupportedRegimeError, ValidationError


@pytest.fixture
def orbit(worked):
    params, s = worked
    return constants_from_state(params, s)


def positive_energy_states(params, count, seed):
    out = []
    rng = np.random.default_rng(seed)
    while len(out) < count:
        s = random_states(params, 1, rng)[0]
        if hamiltonian_h(params, s) > 0:
            out.append(s)
    return out


def test_worked_constants(orbit):
    assert orbit.E == 1.0 and orbit.C == 8.0
    assert orbit.alpha == 0.0 and orbit.gamma == 3.0 and orbit.tau == 0.0
    np.testing.assert_allclose(orbit.alpha_i, [-0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(orbit.gamma_i, [math.sqrt(5) / 2] * 2, atol=1e-15)
    np.testing.assert_allclose(np.cosh(orbit.phi_i), [3 / math.sqrt(5)] * 2, atol=1e-12)
    # arccosh(3/sqrt(5)) = ln(sqrt(5)); signs follow q1 p1 > 0 > q2 p2
    np.testing.assert_allclose(orbit.phi_i, [math.log(math.sqrt(5)), -math.log(math.sqrt(5))], atol=1e-15)
    np.testing.assert_array_equal(orbit.signs, [1.0, 1.0])
    assert orbit.turning_radius == 3.0


def test_rejects_nonpositive_energy():
    params = SystemParams(2, 1.0, 1.0, (0.0, 0.0))
    with pytest.raises(UnsupportedRegimeError, match="E>0"):
        constants_from_state(params, PhasePoint([0.5, 1.0], [0.0, 0.0]))


def test_rejects_zero_c():
    params = SystemParams(2, 1.0, 0.0, (1.0, 1.0))
    with pytest.raises(UnsupportedRegimeError, match="c != 0"):
        constants_from_state(params, PhasePoint([1.0, 1.0], [1.0, -1.0]))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_compatibility_conditions(n):
    params = params_for(n)
    for s in positive_energy_states(params, 50, n):
        oc = constants_from_state(params, s)
        assert max(abs(r) for r in compatibility_residuals(oc)) < 1e-10
        assert abs(energy_from_alphas(oc) - oc.E) <= 1e-12 * oc.E
        assert oc.gamma**2 == pytest.approx(0.25 * (params.kappa + params.c / oc.E) ** 2 + oc.C / oc.E, rel=1e-12)


def test_time_of_radius_examples(orbit):
    for br in Branch:
        assert time_of_radius(orbit, 3.0, br) == orbit.tau
    assert time_of_radius(orbit, 6.0, "outgoing") == pytest.approx(math.sqrt(27) / 2, abs=1e-14)
    assert time_of_radius(orbit, 6.0, "incoming") == pytest.approx(-math.sqrt(27) / 2, abs=1e-14)
    with pytest.raises(ValidationError):
        time_of_radius(orbit, 2.9, "outgoing")


def test_time_of_radius_monotone():
    params = params_for(3)
    oc = constants_from_state(params, positive_energy_states(params, 1, 0)[0])
    grid = oc.turning_radius + np.linspace(0.0, 50.0, 2001)
    assert np.all(np.diff(time_of_radius(oc, grid, Branch.OUTGOING)) > 0)
    assert np.all(np.diff(time_of_radius(oc, grid, Branch.INCOMING)) < 0)


def test_radius_of_time_examples(orbit):
    assert radius_of_time(orbit, orbit.tau) == orbit.turning_radius
    assert abs(radius_of_time(orbit, math.sqrt(27) / 2) - 6.0) < 1e-10
    assert abs(radius_of_time(orbit, -math.sqrt(27) / 2) - 6.0) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_round_trip_on_log_grid(n):
    params = params_for(n)
    for s in positive_energy_states(params, 5, 10 + n):
        oc = constants_from_state(params, s)
        x = oc.turning_radius + np.concatenate([[0.0], np.logspace(-6, 3, 200)])
        for br in Branch:
            back = radius_of_time(oc, time_of_radius(oc, x, br))
            assert np.max(np.abs(back - x) / np.maximum(1.0, x)) < 1e-10


def test_time_inversion_residual(orbit):
    t = np.linspace(-50.0, 50.0, 101)
    X = anomaly_of_time(orbit, t)
    lhs = orbit.gamma * np.sinh(X) + orbit.alpha * X
    assert np.max(np.abs(lhs - 2 * math.sqrt(orbit.E) * (t - orbit.tau))) < 1e-12 * 100
    assert np.all(np.diff(X) > 0)


def test_coords_at_turning_point(orbit):
    for br in Branch:
        np.testing.assert_allclose(coords_of_radius(orbit, 3.0, br), [1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_squared_coordinates_sum_to_x(n):
    params = params_for(n)
    for s in positive_energy_states(params, 5, 20 + n):
        oc = constants_from_state(params, s)
        x = oc.turning_radius + np.logspace(-4, 3, 50)
        for br in Branch:
            q = coords_of_radius(oc, x, br)
            assert np.max(np.abs(np.sum(q * q, axis=-1) + params.kappa - x) / x) < 1e-10


def test_asymptotic_direction(orbit):
    x = 1e6
    for br, sgn in ((Branch.OUTGOING, 1.0), (Branch.INCOMING, -1.0)):
        q = coords_of_radius(orbit, x, br)
        expected = orbit.gamma_i * (np.cosh(orbit.phi_i) + sgn * np.sinh(orbit.phi_i)) / orbit.gamma
        np.testing.assert_allclose(q * q / x, expected, atol=1e-5)


def test_reconstruction_at_anchor_time():
    params = params_for(3)
    for t0 in (0.0, 1.7, -4.0):
        for s in positive_energy_states(params, 5, 7):
            tr = trajectory_closed_form(params, s, [t0 - 1.0, t0, t0 + 1.0], t0=t0)
            assert np.max(np.abs(tr.q[1] - s.q)) < 1e-10
            assert np.max(np.abs(tr.p[1] - s.p)) < 1e-10


def test_momenta_match_velocity_relation(worked):
    params, s = worked
    oc = constants_from_state(params, s)
    t = np.linspace(-4.0, 4.0, 81)
    dt = 1e-3
    q_plus, _ = state_at_anomaly(oc, anomaly_of_time(oc, t + dt))
    q_minus, _ = state_at_anomaly(oc, anomaly_of_time(oc, t - dt))
    q, p = state_at_anomaly(oc, anomaly_of_time(oc, t))
    qdot = (q_plus - q_minus) / (2 * dt)
    x = params.kappa + np.sum(q * q, axis=1)
    assert np.max(np.abs(x[:, None] * qdot - p)) < 1e-5


@pytest.mark.parametrize("n", [2, 3, 4])
def test_integrals_constant_on_exact_states(n):
    params = params_for(n)
    s = positive_energy_states(params, 1, 30 + n)[0]
    tr = trajectory_closed_form(params, s, np.linspace(-10.0, 10.0, 401))
    for f in full_integral_functions(params):
        vals = tr.evaluate(f)
        assert np.max(np.abs(vals - vals[200])) / max(1.0, abs(vals[200])) < 1e-9, f.name


def test_radial_equation_residual(orbit):
    # five-point centered differences for xdot
    dt = 4e-3
    t = np.arange(-10.0, 10.0 + dt / 2, dt)
    x = radius_of_time(orbit, t)
    xdot = (-x[4:] + 8 * x[3:-1] - 8 * x[1:-3] + x[:-4]) / (12 * dt)
    xm = x[2:-2]
    res = xm**2 * xdot**2 - 4 * orbit.E * ((xm - orbit.alpha) ** 2 - orbit.gamma**2)
    assert np.max(np.abs(res)) < 1e-8


def test_crossing_coordinate_matches_integrator():
    params = SystemParams(2, 1.0, 1.0, (0.0, 1.0))
    s = PhasePoint([0.5, 1.0], [-1.5, 0.3])
    oc = constants_from_state(params, s)
    assert list(oc.crossing) == [True, False]
    num = integrate(params, s, 5.0, 1e-3)
    exact = trajectory_closed_form(params, s, num.times)
    assert num.q[:, 0].min() < -1.0 < 0.5 == num.q[0, 0]
    assert np.max(np.abs(num.q - exact.q)) < 1e-6
    assert np.max(np.abs(num.p - exact.p)) < 1e-6


def test_matches_integrator_short_window():
    params = params_for(3)
    s = positive_energy_states(params, 1, 3)[0]
    num = integrate(params, s, 2.0, 1e-3)
    exact = trajectory_closed_form(params, s, num.times)
    assert np.max(np.abs(num.q - exact.q)) < 1e-6
    assert np.max(np.abs(num.p - exact.p)) < 1e-5
