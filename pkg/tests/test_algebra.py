from fractions import Fraction

import numpy as np
import pytest

from conftest import params_for
from supint.algebra import (
    FamilyKind,
    casimir,
    casimir_angular,
    extra_integral,
    family_functions,
    full_integral_labels,
    full_integral_set,
    integral_family,
    partial_casimir_left,
    partial_casimir_right,
    realize_sl2,
)
from supint.core import PhasePoint, SystemParams, hamiltonian_cal, hamiltonian_h, random_states
from supint.errors import ValidationError


def test_realization_worked(worked):
    params, s = worked
    g = realize_sl2(params, s)
    assert (g.j_minus, g.j_zero, g.j_plus) == (2.0, 0.0, 4.0)
    assert g.hamiltonian(params) == hamiltonian_h(params, s)


def test_realization_origin():
    params = SystemParams(3, 1.0, 1.0, (0, 0, 0))
    g = realize_sl2(params, PhasePoint([0, 0, 0], [1.0, -2.0, 0.5]))
    assert (g.j_minus, g.j_zero, g.j_plus) == (0.0, 0.0, 5.25)


def test_casimir_worked_both_forms(worked):
    params, s = worked
    assert casimir(params, s) == 8.0
    assert casimir_angular(params, s) == 8.0


def test_casimir_zero_angular_momentum():
    params = SystemParams(3, 1.0, 1.0, (0, 0, 0))
    q = np.array([0.3, -1.0, 2.0])
    scale = np.dot(q, q) * np.dot(1.7 * q, 1.7 * q)
    assert abs(casimir(params, PhasePoint(q, 1.7 * q))) < 1e-14 * scale


def test_casimir_degree_zero_homogeneity():
    params = params_for(4)
    for s in random_states(params, 10, 3):
        scaled = PhasePoint(2.0 * s.q, s.p / 2.0)
        assert casimir(params, scaled) == pytest.approx(casimir(params, s), rel=1e-13)


def test_partial_casimir_convention():
    # worked example: pair sum 4 + 1 + 1 = 6, plus sum b_i = 2, equals C = 8
    F = Fraction
    q, p, b = (F(1), F(1)), (F(1), F(-1)), (F(1), F(1))
    pair = (q[0] * p[1] - q[1] * p[0]) ** 2 + b[0] * q[1] ** 2 / q[0] ** 2 + b[1] * q[0] ** 2 / q[1] ** 2
    assert pair == 6 and pair + sum(b) == 8
    params = SystemParams(2, 1.0, 1.0, (1.0, 1.0))
    s = PhasePoint([1.0, 1.0], [1.0, -1.0])
    assert partial_casimir_left(params, s, 2) == 8.0
    assert partial_casimir_right(params, s, 2) == 8.0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_full_partial_casimirs_equal_casimir(n):
    # a second (and third...) random state confirms the +sum b_i convention
    params = params_for(n)
    for s in random_states(params, 5, n):
        c = casimir(params, s)
        assert partial_casimir_left(params, s, n) == pytest.approx(c, rel=1e-12)
        assert partial_casimir_right(params, s, n) == pytest.approx(c, rel=1e-12)
        assert casimir_angular(params, s) == pytest.approx(c, rel=1e-12)


def test_partial_casimir_mirror():
    params = SystemParams(3, 1.0, 1.0, (1.0, 0.5, 2.0))
    s = PhasePoint([0.5, 1.0, 1.5], [0.2, -0.3, 0.7])
    rev_params = SystemParams(3, 1.0, 1.0, (2.0, 0.5, 1.0))
    rev = PhasePoint(s.q[::-1], s.p[::-1])
    assert partial_casimir_right(params, s, 2) == pytest.approx(partial_casimir_left(rev_params, rev, 2))


def test_partial_casimir_index_range(worked):
    params, s = worked
    for m in (0, 1, 3):
        with pytest.raises(ValidationError):
            partial_casimir_left(params, s, m)


def test_partial_casimir_zero_case():
    params = SystemParams(2, 1.0, 1.0, (0.0, 0.0))
    q = np.array([0.4, 1.1])
    assert abs(partial_casimir_left(params, PhasePoint(q, -0.3 * q), 2)) < 1e-15


def test_extra_integral_worked(worked):
    params, s = worked
    assert extra_integral(params, s, 0) == pytest.approx(1.0, abs=1e-15)
    assert extra_integral(params, s, 1) == pytest.approx(1.0, abs=1e-15)


def test_extra_integral_rest_state():
    params = SystemParams(3, 1.0, 0.0, (0, 0, 0))
    s = PhasePoint([0.3, 1.0, -2.0], [0, 0, 0])
    assert [extra_integral(params, s, i) for i in range(3)] == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_sum_identity(n):
    params = params_for(n, kappa=1.7, omega_sq=0.6)
    for s in random_states(params, 30, 11):
        total = sum(extra_integral(params, s, i) for i in range(n))
        target = params.kappa * hamiltonian_cal(params, s)
        assert abs(total - target) <= 1e-12 * max(1.0, abs(target))


def test_full_set_layout(worked):
    params, s = worked
    np.testing.assert_allclose(full_integral_set(params, s), [0.5, 8.0, 1.0], atol=1e-15)
    assert full_integral_labels(params) == ["H", "C_(2)", "I_1"]
    p3 = params_for(3)
    assert full_integral_labels(p3) == ["H", "C^(2)", "C_(2)", "C_(3)", "I_1"]
    assert full_integral_labels(p3, extra_index=2)[-1] == "I_3"
    for n in range(2, 7):
        assert len(full_integral_labels(params_for(n))) == 2 * n - 1


def test_families(worked):
    params, s = worked
    fam = integral_family(params, s, FamilyKind.EXTRA)
    assert fam.labels == ("I_1", "I_2")
    np.testing.assert_allclose(fam.values, [1.0, 1.0], atol=1e-15)
    p4 = params_for(4)
    assert [f.name for f in family_functions(p4, "left-casimirs")] == ["H", "C^(2)", "C^(3)", "C^(4)"]
    assert [f.name for f in family_functions(p4, "right-casimirs")] == ["H", "C_(2)", "C_(3)", "C_(4)"]


def test_negative_b_tolerated_by_realization():
    params = SystemParams(2, 1.0, 1.0, (-0.5, 1.0), physical=False)
    s = PhasePoint([0.7, 1.2], [0.3, -0.4])
    assert casimir(params, s) == pytest.approx(casimir_angular(params, s), rel=1e-13)
