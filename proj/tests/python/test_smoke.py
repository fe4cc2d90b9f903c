import math

import pytest

import escna


def test_constants():
    assert escna.avg_gain_A(0) == 1.0
    assert escna.avg_gain_A(1) == 10.0
    assert escna.avg_gain_A(2) == 126.0
    assert escna.avg_gain_A(3) == 1716.0
    assert escna.even_gain_B(1) == 0.5
    assert escna.even_gain_B(2) == 0.375
    assert math.isclose(escna.weak_limit_coeff(1, 1, 1.0), 9.0 / 32.0, rel_tol=1e-15)
    assert math.isclose(escna.dither_amplitude(0.32, 200.0, 1), 2.0, rel_tol=1e-12)


def test_deadzone_shape():
    assert escna.deadzone(0.3) == 0.0
    assert escna.deadzone(1.0) == 0.25
    assert escna.deadzone(2.5) == 2.25
    assert escna.deadzone(-3.0) == -2.25


def test_fit_recovers_cubic():
    coeffs, sup_error = escna.fit_odd_polynomial(lambda u: u**3, m=1)
    assert abs(coeffs[0]) < 1e-10
    assert math.isclose(coeffs[1], 1.0, rel_tol=1e-10)
    assert sup_error < 1e-10


def test_simulate_returns_trajectory():
    traj = escna.simulate(
        "example1", m=1, alpha=0.32, omega=200.0, k=50.0, V="x1^2", x0=[1.5], T=1.0
    )
    assert not traj["blew_up"]
    assert len(traj["times"]) == len(traj["states"]) == len(traj["u"])
    assert traj["times"][0] == 0.0
    assert traj["times"][-1] == 1.0
    assert abs(traj["states"][-1][0]) < 1.5


def test_average_matches_closed_form_field():
    field = escna.averaged_field(
        "example1_approx", m=1, alpha=0.32, omega=200.0, k=50.0, V="x1^2", x=[1.0]
    )
    assert math.isclose(field[0], -2.0, abs_tol=1e-12)

    traj = escna.average(
        "example1_approx", m=1, alpha=0.32, omega=200.0, k=50.0, V="x1^2", x0=[1.5], T=10.0
    )
    assert "u" not in traj
    assert abs(traj["states"][-1][0]) < 0.1

    rate = escna.empirical_average_field(
        "example1_approx", m=1, alpha=0.32, omega=1e6, k=50.0, V="x1^2", x=[1.0]
    )
    assert abs(rate[0] - (-2.0)) < 0.15


def test_boundary_formulas():
    assert math.isclose(
        escna.equilibrium_boundary_uu(100.0, 2, 0.0, 100.0, 0.25), 512.0 / 252.0, rel_tol=1e-12
    )
    assert math.isclose(
        escna.epsilon_bound_evenpow(100.0, 10.0, 100.0), 199.0 / 37.5, rel_tol=1e-12
    )
    assert math.isclose(escna.epsilon_bound_m0(1.0, 100.0), 0.1, rel_tol=1e-14)


def test_builtins_and_errors():
    names = escna.builtin_names()
    assert "example1" in names
    assert "uu" in names
    with pytest.raises(ValueError):
        escna.simulate("missing", m=1, alpha=0.3, omega=100.0, k=1.0, V="x1^2", x0=[1.0])
    with pytest.raises(ValueError):
        escna.averaged_field("uu", m=1, alpha=1.0, omega=100.0, k=1.0, V="x1^2", x=[1.0],
                             construction="theorem1", eps=0.05)
