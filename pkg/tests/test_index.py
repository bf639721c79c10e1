"""Algebraic index and resolvent-growth fitting."""

import numpy as np
import pytest

from daelab import (
    NotInResolventSet,
    NotRegular,
    Pencil,
    REAL_RAY,
    VERTICAL_LINE,
    algebraic_index,
    check_index_bound,
    fit_resolvent_index,
)

from support import weierstrass_pencil

NILPOTENT2 = Pencil(E=np.array([[0.0, 1.0], [0.0, 0.0]]), A=np.eye(2))


def test_algebraic_index_examples():
    assert algebraic_index(Pencil(E=np.eye(2), A=np.zeros((2, 2)))) == 0
    assert algebraic_index(Pencil(E=np.diag([1.0, 0.0]), A=np.eye(2))) == 1
    # (lambda E - I)^{-1} = -I - lambda E grows linearly: nilpotency 2
    assert algebraic_index(NILPOTENT2) == 2


def test_algebraic_index_requires_regular():
    with pytest.raises(NotRegular):
        algebraic_index(Pencil(E=np.diag([1.0, 0.0]), A=np.diag([1.0, 0.0])))


def test_fit_nilpotent_index_two():
    report = fit_resolvent_index(NILPOTENT2, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4))
    assert report.fitted_exponent == pytest.approx(1.0, abs=0.05)
    assert report.fitted_index == 2
    # closed form: norm of -I - lambda E at the largest sample is about lambda
    top = report.samples[-1]
    assert top.norm == pytest.approx(abs(top.lam), rel=0.01)


def test_fit_scalar_ode():
    p = Pencil(E=np.eye(1), A=np.array([[-1.0]]))
    report = fit_resolvent_index(p, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4))
    # closed-form oracle: norm is exactly 1/(1+lambda) on the positive ray
    lams = np.geomspace(1.0, 1e4, report.count)
    expected_slope = np.polyfit(np.log(lams), np.log(1.0 / (1.0 + lams)), 1)[0]
    assert report.fitted_exponent == pytest.approx(expected_slope, abs=1e-8)
    assert report.fitted_exponent == pytest.approx(-1.0, abs=0.1)
    assert report.fitted_index == 0


def test_fit_index_one_plateau():
    # resolvent diag(1/(lambda+1), 1): norm exactly 1 on the positive ray
    p = Pencil(E=np.diag([1.0, 0.0]), A=-np.eye(2))
    report = fit_resolvent_index(p, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4))
    assert report.fitted_exponent == pytest.approx(0.0, abs=0.05)
    assert report.fitted_index == 1


def test_fit_growth_constant_covers_samples():
    report = fit_resolvent_index(NILPOTENT2, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4))
    for s in report.samples:
        assert s.norm <= report.growth_constant * abs(s.lam) ** (report.fitted_index - 1) * (1 + 1e-12)


def test_fit_window_and_count_validation():
    with pytest.raises(ValueError):
        fit_resolvent_index(NILPOTENT2, window=(0.5, 10.0))
    with pytest.raises(ValueError):
        fit_resolvent_index(NILPOTENT2, window=(1.0, 10.0), count=4)
    with pytest.raises(ValueError):
        fit_resolvent_index(NILPOTENT2, ray="diagonal")


def test_fit_sample_geometry():
    real = fit_resolvent_index(NILPOTENT2, ray=REAL_RAY, omega=0.5, window=(1.0, 100.0))
    for s in real.samples:
        assert s.lam.imag == 0.0
        assert s.lam.real > real.omega
    vert = fit_resolvent_index(NILPOTENT2, ray=VERTICAL_LINE, omega=0.5, window=(1.0, 100.0))
    for s in vert.samples:
        assert s.lam.real == pytest.approx(vert.omega)
        assert 1.0 <= s.lam.imag <= 100.0
    assert vert.count == len(vert.samples) == 12


def test_fitted_index_formula_invariant():
    rng = np.random.default_rng(41)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        p = weierstrass_pencil(rng, n, int(rng.integers(0, min(n, 3) + 1)), e_scale=1e-2)
        report = fit_resolvent_index(p, omega=0.0)
        assert report.fitted_index == max(0, round(report.fitted_exponent) + 1)


def test_fit_reports_offending_lambda():
    # lambda = 1 is a generalized eigenvalue of (I, I)
    p = Pencil(E=np.eye(2), A=np.eye(2))
    with pytest.raises(NotInResolventSet) as info:
        fit_resolvent_index(p, ray=REAL_RAY, omega=0.0, window=(1.0, 100.0), count=8)
    assert info.value.lam is not None


def test_check_index_bound():
    report = fit_resolvent_index(NILPOTENT2, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4), with_algebraic=True)
    assert report.algebraic_index == 2
    assert check_index_bound(report, 3)
    assert check_index_bound(report, 2)
    assert not check_index_bound(report, 1)
    ode = fit_resolvent_index(Pencil(E=np.eye(1), A=np.array([[-1.0]])), omega=0.0, window=(1.0, 1e4))
    assert check_index_bound(ode, 0)


def test_fitted_matches_algebraic_small_sweep():
    # the acceptance suite runs the full 200-pencil version of this
    rng = np.random.default_rng(43)
    for trial in range(25):
        idx = trial % 5
        n = int(rng.integers(max(idx, 1), 7))
        p = weierstrass_pencil(rng, n, idx, e_scale=1e-2)
        assert algebraic_index(p) == idx
        report = fit_resolvent_index(p, ray=REAL_RAY, omega=0.0, window=(1e2, 1e6))
        target = -1.0 if idx == 0 else idx - 1.0
        assert abs(report.fitted_exponent - target) < 0.25
        assert report.fitted_index == idx


def test_shift_covariance_of_algebraic_index():
    rng = np.random.default_rng(47)
    for _ in range(10):
        n = int(rng.integers(2, 6))
        idx = int(rng.integers(0, min(n, 3) + 1))
        p = weierstrass_pencil(rng, n, idx)
        omega = complex(rng.normal(), rng.normal())
        shifted = Pencil(E=p.E, A=p.A - omega * p.E)
        assert algebraic_index(shifted) == algebraic_index(p) == idx


def test_report_round_trips_to_dict():
    report = fit_resolvent_index(NILPOTENT2, ray=REAL_RAY, omega=0.0, window=(1.0, 1e4), with_algebraic=True)
    d = report.to_dict()
    assert d["fitted_index"] == 2
    assert d["algebraic_index"] == 2
    assert len(d["samples"]) == report.count
