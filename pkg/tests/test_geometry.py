import math

import numpy as np
import pytest

from conftest import params_for
from supint.core import PhasePoint, SystemParams, hamiltonian_cal, random_states
from supint.dynamics import Trajectory, integrate
from supint.geometry import (
    cotangent_norm,
    curvature_oracle,
    green_function,
    hamiltonian_decomposition,
    intrinsic_potentials,
    laplace_beltrami_radial,
    metric_sample,
    scalar_curvature,
    scalar_curvature_fd,
    sw_hj_check,
)
from supint.errors import ValidationError


def geo(n, kappa=1.0):
    return SystemParams(n, kappa, 1.0, (0.0,) * n)


def test_curvature_at_origin():
    assert scalar_curvature(geo(2), [0.0, 0.0]) == -4.0
    sample = metric_sample(geo(2), [0.0, 0.0])
    assert sample.conformal_factor == 1.0 and sample.scalar_curvature == -4.0


def test_curvature_decays():
    q = np.array([1e3, 0.0, 0.0])
    assert abs(scalar_curvature(geo(3), q)) < 1e-5


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_curvature_negative(n):
    rng = np.random.default_rng(n)
    for kappa in (0.1, 1.0, 5.0):
        for _ in range(50):
            q = rng.normal(scale=rng.choice([0.1, 1.0, 10.0]), size=n)
            assert scalar_curvature(geo(n, kappa), q) < 0


@pytest.mark.parametrize("n", [2, 3])
def test_curvature_matches_oracle(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(10):
        q = rng.uniform(-2, 2, size=n)
        assert abs(scalar_curvature(geo(n), q) - curvature_oracle(geo(n), q)) < 1e-5


@pytest.mark.parametrize(
    "kappa,q", [(1.0, [1.0, 0.0]), (2.0, [1.0, 1.0, 1.0]), (0.5, [0.3, -0.7, 0.2, 1.1])]
)
def test_oracle_examples(kappa, q):
    assert abs(scalar_curvature(geo(len(q), kappa), q) - curvature_oracle(geo(len(q), kappa), q)) < 1e-5


def test_oracle_flat_metric():
    frozen = 1.0 + 3.0  # kappa + q^2 held fixed
    R = scalar_curvature_fd(lambda x: frozen * np.eye(x.size), [1.0, 1.0, 1.0])
    assert abs(R) < 1e-6


def test_oracle_round_sphere():
    # independent check of the oracle: stereographic unit 2-sphere has R = 2
    def metric(x):
        return 4.0 / (1.0 + x @ x) ** 2 * np.eye(2)

    assert abs(scalar_curvature_fd(metric, [0.4, -0.3]) - 2.0) < 1e-5


def test_oracle_dimension_limit():
    with pytest.raises(ValidationError):
        curvature_oracle(geo(5), np.ones(5))


def test_green_function_values():
    assert green_function(geo(3, 3.0), 1.0) == 2.0
    assert green_function(geo(3), 1.0) == math.sqrt(2.0)
    assert abs(green_function(geo(3), 1e6) - 1.0) < 1e-6


def test_green_function_is_harmonic_on_log_grid():
    for kappa in (0.5, 1.0, 3.0):
        params = geo(3, kappa)
        for r in np.logspace(-2, 3, 60):
            lap = laplace_beltrami_radial(params, lambda x: green_function(params, x), r)
            assert abs(lap) < 1e-10, (kappa, r, lap)


def test_laplace_beltrami_constant_and_regression():
    params = geo(3)
    assert laplace_beltrami_radial(params, lambda r: 1.0, 0.7) == 0.0
    assert laplace_beltrami_radial(params, lambda r: 5.0 + 0.0 * r, 0.7) == 0.0
    # d/dr(2 r^3 sqrt(1+r^2)) = 6 r^2 s + 2 r^4 / s = 7 sqrt(2) at r=1, over r^2(1+r^2) = 2
    assert laplace_beltrami_radial(params, lambda r: r * r, 1.0) == pytest.approx(7 / math.sqrt(2), abs=1e-14)
    with pytest.raises(ValidationError):
        laplace_beltrami_radial(params, lambda r: r, 0.0)


def test_laplace_beltrami_matches_finite_differences():
    params = geo(3, 2.0)
    f = lambda r: r**3 / (1 + r * r)  # noqa: E731
    r, h = 0.8, 1e-4

    def flux(x):
        s = math.sqrt(2.0 + x * x)
        return x * x * s * (f(x + h) - f(x - h)) / (2 * h)

    fd = (flux(r + h) - flux(r - h)) / (2 * h) / (r * r * (2.0 + r * r))
    assert laplace_beltrami_radial(params, f, r) == pytest.approx(fd, rel=1e-5)


def test_potential_examples():
    params = geo(2)
    v_kep, v_harm = intrinsic_potentials(params, 1.0, [1.0, 0.0])
    assert v_kep == math.sqrt(2.0) and v_harm == 0.5
    assert abs(intrinsic_potentials(params, 2.5, [1e3, 0.0])[1] - 2.5) < 1e-5
    with pytest.raises(ValidationError):
        intrinsic_potentials(params, 1.0, [0.0, 0.0])


def test_harmonic_potential_is_inverse_square_green():
    params = geo(3, 1.7)
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = rng.uniform(-3, 3, size=3)
        K = rng.uniform(0.1, 5)
        v = green_function(params, float(np.linalg.norm(q)))
        assert intrinsic_potentials(params, K, q)[1] == pytest.approx(K / v**2, rel=1e-12)


def test_cotangent_norm():
    params = geo(2)
    assert cotangent_norm(params, [0.0, 0.0], [1.0, 2.0]) == 0.0
    assert cotangent_norm(params, [1.0, -1.0], [1.0, 1.0]) == pytest.approx(2.0 / 3.0)


def test_decomposition_worked(worked):
    params, s = worked
    parts = hamiltonian_decomposition(params, s)
    assert parts == pytest.approx((2 / 3, 2 / 3, 2 / 3), abs=1e-15)
    assert sum(parts) == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_decomposition_random(n):
    params = params_for(n, kappa=1.3, omega_sq=0.7)
    for s in random_states(params, 100, n):
        total = sum(hamiltonian_decomposition(params, s))
        assert total == pytest.approx(hamiltonian_cal(params, s), rel=1e-12)


def test_geodesic_hamiltonian_is_norm():
    params = SystemParams(3, 1.0, 0.0, (0.0, 0.0, 0.0))
    s = PhasePoint([0.2, -1.0, 0.5], [0.4, 0.1, -0.9])
    assert hamiltonian_cal(params, s) == cotangent_norm(params, s.p, s.q)


def test_sw_worked(worked):
    params, s = worked
    sw = sw_hj_check(params, s)
    assert sw.E == 1.0 and sw.constraint_value == 2.0
    np.testing.assert_allclose(sw.lambda_i, [1.0, 1.0], atol=1e-15)
    assert abs(sw.sum_residual) < 1e-15 and sw.separated_residual < 1e-15


def test_sw_geodesic():
    params = SystemParams(3, 1.5, 0.0, (0.0, 0.0, 0.0))
    s = PhasePoint([0.2, -1.0, 0.5], [0.4, 0.1, -0.9])
    sw = sw_hj_check(params, s)
    q2, p2 = float(s.q @ s.q), float(s.p @ s.p)
    assert sw.E == pytest.approx(p2 / (1.5 + q2), rel=1e-15)
    np.testing.assert_allclose(sw.lambda_i, s.p**2 - sw.E * s.q**2, atol=1e-15)
    assert sw.constraint_value == pytest.approx(1.5 * sw.E) and abs(sw.sum_residual) < 1e-12


def test_sw_along_trajectory():
    params = params_for(3)
    s = random_states(params, 1, 17)[0]
    fine = integrate(params, s, 1.0, 1e-4)
    traj = Trajectory(fine.times[::10], fine.q[::10], fine.p[::10], params, fine.scheme, 1e-3)
    assert len(traj) == 1001
    sw = sw_hj_check(params, s, traj)
    assert abs(sw.sum_residual) < 1e-10
    assert sw.separated_residual < 1e-8
