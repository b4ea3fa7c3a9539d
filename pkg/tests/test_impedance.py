import math

import numpy as np
import pytest

from metalfilm.dielectric import drude, eps_l, eps_tr
from metalfilm.errors import ConvergenceError, DomainError
from metalfilm.impedance import (
    SeriesControl,
    StackConfig,
    _summand,
    film_width_parameter,
    impedance_antisymmetric,
    impedance_symmetric,
    impedance_term,
    impedances,
    mode_term,
    tangential_wavenumber,
)
from metalfilm.oracle import impedance_bruteforce, impedance_term_mp

# brute-force sums (all harmonics to 1e6, exactly rounded, extrapolated in 1/N)
Z1_D10 = -23.08074246792148 + 24.190303881992538j
Z2_D100 = -1081.9974984794903 + 25.561615494770482j
# 50-digit evaluation of the n = 1 summand, d = 10 nm, Omega = 1, theta = 75 deg, eps1 = 1
TERM_N1 = -2.2109467919680608 - 2.163734061104885j


def test_film_width_parameter(plasma):
    W = film_width_parameter(10, plasma)
    assert W == pytest.approx(0.21682, abs=5e-6)
    assert W == pytest.approx(6.5e15 * 10e-7 / 2.99792458e10, rel=1e-15)
    assert film_width_parameter(20, plasma) == pytest.approx(2 * W, rel=1e-15)
    with pytest.raises(DomainError):
        film_width_parameter(0, plasma)


def test_mode_term_examples(plasma):
    t = mode_term(0, 1.0, 1.0, 0.0, 1.0, plasma)
    assert (t.Qx, t.Qz, t.q1) == (0.0, 0.0, 0.0)
    assert mode_term(1, math.pi, 1.0, 0.3, 1.0, plasma).Qx == pytest.approx(1.0, rel=1e-15)
    th = math.radians(75)
    t = mode_term(3, 0.21682, 1.0, th, 1.0, plasma)
    expected = 8.52e7 / 2.99792458e10 * math.sqrt((3 * math.pi / 0.21682) ** 2 + math.sin(th) ** 2)
    assert t.q1 == pytest.approx(expected, rel=1e-14)
    assert t.Qz == pytest.approx(math.sin(th), rel=1e-15)
    with pytest.raises(DomainError):
        mode_term(1, 0.0, 1.0, 0.0, 1.0, plasma)


def test_impedance_term_reductions(plasma):
    Om, e = 0.9, plasma.eps
    t = mode_term(0, 0.2, Om, 0.4, 2.0, plasma)
    assert impedance_term(t, Om, e) == pytest.approx(1 / (Om**2 * eps_l(t.q1, Om, e)), rel=1e-14)
    t = mode_term(3, 0.2, Om, 0.0, 2.0, plasma)
    assert impedance_term(t, Om, e) == pytest.approx(1 / (Om**2 * eps_tr(t.q1, Om, e) - t.Qx**2),
                                                     rel=1e-14)
    with pytest.raises(DomainError):
        impedance_term(mode_term(0, 0.2, Om, 0.0, 2.0, plasma), Om, e)


def test_impedance_term_high_precision(plasma):
    W = film_width_parameter(10, plasma)
    t = mode_term(1, W, 1.0, math.radians(75), 1.0, plasma)
    value = impedance_term(t, 1.0, plasma.eps)
    assert abs(value - TERM_N1) <= 1e-12 * abs(TERM_N1)
    live = complex(impedance_term_mp(1, 10, 1.0, math.radians(75), 1.0, plasma))
    assert live == pytest.approx(TERM_N1, rel=1e-15)


def test_term_even_in_n(plasma):
    for n in (1, 2, 7):
        a = impedance_term(mode_term(n, 0.3, 1.1, 0.5, 4.0, plasma), 1.1, plasma.eps)
        b = impedance_term(mode_term(-n, 0.3, 1.1, 0.5, 4.0, plasma), 1.1, plasma.eps)
        assert a == b
    # summing n in {+-1, +-3} is twice the sum over {1, 3}
    both = sum(impedance_term(mode_term(n, 0.3, 1.1, 0.5, 4.0, plasma), 1.1, plasma.eps)
               for n in (-3, -1, 1, 3))
    pos = sum(impedance_term(mode_term(n, 0.3, 1.1, 0.5, 4.0, plasma), 1.1, plasma.eps)
              for n in (1, 3))
    assert both == pytest.approx(2 * pos, rel=1e-15)


def test_term_decays_like_inverse_square(plasma):
    W = film_width_parameter(10, plasma)
    n = np.array([1e3, 1e4, 1e5])
    t = _summand(n, W, 1.0, 0.5, plasma.beta, plasma.eps)
    # both brackets contribute at order 1/n^2: n^2 term -> -(1 - Qz^2/Omega^2) W^2/pi^2
    scaled = -t * n**2 * math.pi**2 / W**2
    assert np.allclose(scaled, 1.0 - 0.5**2, rtol=1e-3)


def test_frozen_oracle_values(plasma):
    z1 = impedance_antisymmetric(StackConfig.from_degrees(10, 8, 1, 15), 1.0, plasma).value
    z2 = impedance_symmetric(StackConfig.from_degrees(100, 8, 1, 15), 1.0, plasma).value
    assert abs(z1 - Z1_D10) / abs(Z1_D10) < 1e-9
    assert abs(z2 - Z2_D100) / abs(Z2_D100) < 1e-9


def test_zero_harmonic_of_symmetric_sum(plasma):
    """The n = 0 harmonic enters Z2 alone; the remaining sum is shared."""
    Om = 1.0
    cfg = StackConfig.from_degrees(10, 8, 1, 15)
    W = film_width_parameter(cfg.d, plasma)
    q0 = plasma.beta * tangential_wavenumber(Om, cfg.theta, cfg.eps1)
    z2 = impedance_symmetric(cfg, Om, plasma).value
    expected_t0 = -2j * Om / W / (Om**2 * eps_l(q0, Om, plasma.eps))
    # removing the n = 0 contribution leaves twice the positive even sum
    ctrl = SeriesControl()
    rest = impedance_symmetric(cfg, Om, plasma, ctrl).value - expected_t0
    evens = _summand(np.arange(2, 400001, 2), W, Om, tangential_wavenumber(Om, cfg.theta, 8),
                     plasma.beta, plasma.eps)
    assert abs(rest - (-4j * Om / W) * evens.sum()) / abs(z2) < 1e-5

    # normal incidence: Drude-limit transverse term
    cfg0 = StackConfig.from_degrees(10, 8, 1, 0)
    t0 = -2j * Om / W / (Om**2 * drude(Om, plasma.eps))
    evens0 = _summand(np.arange(2, 400001, 2), W, Om, 0.0, plasma.beta, plasma.eps)
    z20 = impedance_symmetric(cfg0, Om, plasma).value
    assert abs(z20 - t0 - (-4j * Om / W) * evens0.sum()) / abs(z20) < 1e-5


def test_theta_zero_continuity(plasma):
    for d in (1, 10, 100):
        a = impedances(StackConfig(d, 4.0, 1.0, 0.0), 0.8, plasma)
        b = impedances(StackConfig(d, 4.0, 1.0, 1e-6), 0.8, plasma)
        assert abs(a.Z1 - b.Z1) / abs(a.Z1) < 1e-8
        assert abs(a.Z2 - b.Z2) / abs(a.Z2) < 1e-8


def test_doubling_n_max_is_stable(plasma):
    cfg = StackConfig.from_degrees(1, 1, 4, 75)
    a = impedances(cfg, 0.7, plasma, SeriesControl(n_max=200_000))
    b = impedances(cfg, 0.7, plasma, SeriesControl(n_max=400_000))
    assert abs(a.Z1 - b.Z1) <= 1e-10 * abs(a.Z1)
    assert abs(a.Z2 - b.Z2) <= 1e-10 * abs(a.Z2)


def test_summation_order_invariance(plasma):
    cfg = StackConfig.from_degrees(10, 8, 1, 15)
    W = film_width_parameter(cfg.d, plasma)
    Qz = tangential_wavenumber(1.2, cfg.theta, cfg.eps1)
    terms = _summand(np.arange(1, 20001, 2), W, 1.2, Qz, plasma.beta, plasma.eps)
    forward = sum(terms.tolist())
    backward = sum(terms[::-1].tolist())
    assert abs(forward - backward) <= 1e-12 * abs(forward)


@pytest.mark.parametrize("point", [(1, 1, 4, 75, 0.4), (2, 1, 4, 75, 1.1), (5, 1, 4, 75, 1.45),
                                   (10, 4, 1, 40, 1.0), (100, 8, 1, 15, 0.98)])
def test_tail_estimate_bounds_true_error(plasma, point):
    *geom, Om = point
    cfg = StackConfig.from_degrees(*geom)
    prod = impedances(cfg, Om, plasma)
    ref = impedance_bruteforce(cfg, Om, plasma, N=10**6)
    assert abs(prod.Z1 - ref.Z1) <= prod.tail_estimate_odd + ref.tail_estimate_odd
    assert abs(prod.Z2 - ref.Z2) <= prod.tail_estimate_even + ref.tail_estimate_even
    assert prod.tail_estimate_odd <= 1e-9 * abs(prod.Z1)
    assert prod.tail_estimate_even <= 1e-9 * abs(prod.Z2)


def test_passivity_and_distinct_impedances(plasma):
    for d in (1, 2, 5, 10, 100):
        for Om in (0.1, 0.5, 0.9, 1.0, 1.1, 1.45):
            for geom in ((1, 4, 75), (4, 1, 15), (8, 1, 15)):
                Z = impedances(StackConfig.from_degrees(d, *geom), Om, plasma)
                assert Z.Z1.real <= 1e-12 and Z.Z2.real <= 1e-12
                assert abs(Z.Z1 - Z.Z2) > 0


def test_convergence_failure_reports_partial(plasma):
    cfg = StackConfig.from_degrees(1, 1, 4, 75)
    with pytest.raises(ConvergenceError) as info:
        impedances(cfg, 1.0, plasma, SeriesControl(rel_tol=1e-200, n_max=64))
    err = info.value
    assert err.partial is not None and err.n_used <= 64 and err.tail_estimate > 0


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0), dict(n_max=4), dict(n_max=10.5),
                                    dict(consecutive_below=1)])
def test_series_control_validation(kwargs):
    with pytest.raises(DomainError):
        SeriesControl(**kwargs)


@pytest.mark.parametrize("args", [(0, 1, 1, 0), (10, 0, 1, 0), (10, 1j, 1, 0), (10, 1, 0, 0),
                                  (10, 1, 1, math.pi / 2), (10, 1, 1, -0.1)])
def test_stack_config_validation(args):
    with pytest.raises(DomainError):
        StackConfig(*args)


def test_stack_config_degrees():
    cfg = StackConfig.from_degrees(10, 4, 1 + 0.1j, 30)
    assert cfg.theta == pytest.approx(math.pi / 6)
    assert cfg.theta_deg == pytest.approx(30)
    assert not cfg.eps2_is_real
