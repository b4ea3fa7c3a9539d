"""Surface impedances of a metal film with specular electron reflection.

The impedance of the antisymmetric field configuration, Z1, sums the
standing-wave harmonics over odd n; the symmetric one, Z2, over even n:

    Z = -(2 i Omega / W) sum_n 1/Q^2 [Qz^2/(Omega^2 eps_l) + Qx^2/(Omega^2 eps_tr - Q^2)]

with Qx = pi n / W, Qz = sqrt(eps1) Omega sin(theta), Q^2 = Qx^2 + Qz^2 and
both dielectric functions evaluated at q1 = (v_F/c) Q.  The summand decays
like 1/n^2, so a plainly truncated sum carries an O(1/N) error.  The
production path sums the low harmonics explicitly and adds the remainder
from an asymptotic expansion of the summand in powers of 1/n, each power
summed in closed form with the Hurwitz zeta function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from ._powerseries import Series
from .dielectric import SPEED_OF_LIGHT, PlasmaParams, _eps_l, _eps_tr, drude, eps_l, eps_tr
from .errors import ConvergenceError, DomainError

# order of the 1/n expansion used for the tail
_TAIL_ORDER = 40
# explicit summation runs at least this far past the point where q1 = max(|w|, 2)
_EXPLICIT_FACTOR = 4.0
_MIN_EXPLICIT = 32
# relative rounding error assumed per evaluated summand
_TERM_ROUNDING = 1e-15


@dataclass(frozen=True)
class StackConfig:
    """Dielectric / film / dielectric stack.

    ``d`` is in nm, ``theta`` in radians.  ``eps2`` may be complex (absorbing
    substrate); ``eps1`` must be real and positive.
    """

    d: float
    eps1: float
    eps2: complex
    theta: float

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"film thickness d must be positive, got {self.d}")
        if isinstance(self.eps1, complex) or not (self.eps1 > 0 and math.isfinite(self.eps1)):
            raise DomainError(f"eps1 must be real and positive, got {self.eps1}")
        e2 = complex(self.eps2)
        if not (math.isfinite(e2.real) and math.isfinite(e2.imag)) or e2 == 0:
            raise DomainError(f"eps2 must be finite and non-zero, got {self.eps2}")
        if not (0 <= self.theta < math.pi / 2):
            raise DomainError(f"theta must lie in [0, pi/2), got {self.theta}")

    @classmethod
    def from_degrees(cls, d, eps1, eps2, theta_deg):
        return cls(d, eps1, eps2, math.radians(theta_deg))

    @property
    def theta_deg(self):
        return math.degrees(self.theta)

    @property
    def eps2_is_real(self):
        return complex(self.eps2).imag == 0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the harmonic sums."""

    rel_tol: float = 1e-10
    n_max: int = 200_000
    consecutive_below: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.n_max) != self.n_max or self.n_max < 8:
            raise DomainError(f"n_max must be an integer >= 8, got {self.n_max}")
        if int(self.consecutive_below) != self.consecutive_below or self.consecutive_below < 2:
            raise DomainError(f"consecutive_below must be an integer >= 2, got {self.consecutive_below}")


@dataclass(frozen=True)
class ModeTerm:
    n: int
    Qx: float
    Qz: float
    q1: float

    @property
    def Q2(self):
        return self.Qx * self.Qx + self.Qz * self.Qz


@dataclass(frozen=True)
class SeriesSum:
    """One impedance together with its truncation diagnostics."""

    value: complex
    n_used: int
    tail_estimate: float
    tail: complex = 0j


@dataclass(frozen=True)
class ImpedancePair:
    Z1: complex
    Z2: complex
    n_used_odd: int
    n_used_even: int
    tail_estimate: float
    tail_estimate_odd: float = 0.0
    tail_estimate_even: float = 0.0


def film_width_parameter(d, plasma: PlasmaParams):
    """Dimensionless thickness W = omega_p d / c for ``d`` in nm."""
    if not d > 0:
        raise DomainError(f"film thickness d must be positive, got {d}")
    return plasma.omega_p / SPEED_OF_LIGHT * (d * 1e-7)


def tangential_wavenumber(Omega, theta, eps1):
    return math.sqrt(eps1) * Omega * math.sin(theta)


def mode_term(n, W, Omega, theta, eps1, plasma: PlasmaParams) -> ModeTerm:
    if not W > 0:
        raise DomainError(f"W must be positive, got {W}")
    Qx = math.pi * n / W
    Qz = tangential_wavenumber(Omega, theta, eps1)
    return ModeTerm(int(n), Qx, Qz, plasma.beta * math.hypot(Qx, Qz))


def impedance_term(t: ModeTerm, Omega, eps):
    """Summand of the mode sum for one harmonic.

    The n = 0, theta = 0 term (Q = 0) is not defined here; see
    :func:`impedance_symmetric` for its limit value.
    """
    Q2 = t.Q2
    if Q2 == 0:
        raise DomainError("Q^2 = 0: the n = 0, theta = 0 term has no summand form", {"n": t.n})
    et = eps_tr(t.q1, Omega, eps)
    el = eps_l(t.q1, Omega, eps)
    res = Omega * Omega * et - Q2
    if res == 0:
        raise DomainError("transverse resonance Omega^2 eps_tr = Q^2", {"n": t.n, "Omega": Omega})
    return (t.Qz**2 / (Omega * Omega * el) + t.Qx**2 / res) / Q2


def _summand(n, W, Omega, Qz, beta, eps, kind="general"):
    """Vectorised summand over an integer array of harmonics ``n`` (Q != 0)."""
    Qx = np.pi * np.asarray(n, dtype=float) / W
    Q2 = Qx * Qx + Qz * Qz
    q = beta * np.sqrt(Q2)
    res = Omega * Omega * _eps_tr(q, Omega, eps) - Q2
    if np.any(res == 0):
        raise DomainError("transverse resonance Omega^2 eps_tr = Q^2", {"Omega": Omega})
    if kind == "transformed":
        return 1.0 / res
    return (Qz * Qz / (Omega * Omega * _eps_l(q, Omega, eps)) + Qx * Qx / res) / Q2


def _zero_term(Omega, Qz, beta, eps, kind="general"):
    """n = 0 harmonic; for theta = 0 the limit Qx -> 0 at Qz = 0 is used."""
    if Qz == 0:
        return 1.0 / (Omega * Omega * drude(Omega, eps))
    q = np.array([beta * Qz])
    if kind == "transformed":
        return complex(1.0 / (Omega * Omega * _eps_tr(q, Omega, eps)[0] - Qz * Qz))
    return complex(1.0 / (Omega * Omega * _eps_l(q, Omega, eps)[0]))


def _tail_coefficients(W, Omega, Qz, beta, eps, kind="general", order=_TAIL_ORDER):
    """Coefficients H_k with summand(n) ~ sum_k H_k n^-(k+2) for large n.

    Expands in s = 1/n.  For q1 > |Omega + i eps| the log in both dielectric
    functions equals i pi - 2 atanh(w/q1) on the principal branch.
    """
    w = Omega + 1j * eps
    a = math.pi / W
    s = Series.variable(order)
    U = Series.const(a * a, order) + Qz * Qz * (s * s)
    inv_q = (U.sqrt().reciprocal() / beta).shift(1)
    y = w * inv_q
    L = 1j * math.pi - 2.0 * y.atanh()
    e_tr = 1.0 - (3.0 / (4.0 * Omega)) * inv_q * (2.0 * y + (y * y - 1.0) * L)
    res = U - (Omega * Omega) * (s * s) * e_tr
    if kind == "transformed":
        return (-res.reciprocal()).c
    num = 1.0 + 0.5 * y * L
    den = 1.0 + (0.5j * eps) * inv_q * L
    e_l = 1.0 + 3.0 * (inv_q * inv_q) * num / den
    H = (Qz * Qz / (Omega * Omega)) / (U * e_l) - (a * a) / (U * res)
    return H.c


class _Compensated:
    """Neumaier-compensated running sum of complex values."""

    __slots__ = ("re", "im", "cre", "cim", "abs_total")

    def __init__(self):
        self.re = self.im = self.cre = self.cim = 0.0
        self.abs_total = 0.0

    def add_many(self, values):
        re, im, cre, cim = self.re, self.im, self.cre, self.cim
        for x, y in zip(values.real.tolist(), values.imag.tolist()):
            t = re + x
            if abs(re) >= abs(x):
                cre += (re - t) + x
            else:
                cre += (x - t) + re
            re = t
            t = im + y
            if abs(im) >= abs(y):
                cim += (im - t) + y
            else:
                cim += (y - t) + im
            im = t
        self.re, self.im, self.cre, self.cim = re, im, cre, cim
        self.abs_total += float(np.sum(np.abs(values)))

    @property
    def value(self):
        return complex(self.re + self.cre, self.im + self.cim)


def _parity_last(n, first):
    """Largest index <= n with the parity of ``first``."""
    return n if (n - first) % 2 == 0 else n - 1


def _mode_sum(first, W, Omega, Qz, beta, eps, ctrl: SeriesControl, offset=0j, weight=1.0,
              kind="general"):
    """Sum the summand over n = first, first+2, ... to infinity.

    Returns ``(offset + weight*S, n_last, tail_error, tail)`` where the check
    ``|weight * c_k| < rel_tol |offset + weight*S|`` must hold for
    ``consecutive_below`` successive orders of the asymptotic tail.
    """
    w = Omega + 1j * eps
    n_c = max(abs(w), 2.0) * W / (math.pi * beta)
    n_last = _parity_last(max(_MIN_EXPLICIT, math.ceil(_EXPLICIT_FACTOR * n_c)), first)
    n_cap = _parity_last(int(ctrl.n_max), first)
    n_last = min(n_last, n_cap)
    coeffs = _tail_coefficients(W, Omega, Qz, beta, eps, kind)
    acc = _Compensated()
    done = first - 2
    while True:
        if n_last > done:
            acc.add_many(_summand(np.arange(done + 2, n_last + 1, 2), W, Omega, Qz, beta, eps, kind))
            done = n_last
        explicit = acc.value
        a0 = (n_last + 2) / 2.0
        tail = 0j
        below = 0
        recent = []
        converged = False
        for k, h in enumerate(coeffs):
            p = k + 2
            c = complex(h * zeta(p, a0) * 2.0 ** (-p))
            tail += c
            recent.append(abs(weight * c))
            total = abs(offset + weight * (explicit + tail))
            if abs(weight * c) < ctrl.rel_tol * total:
                below += 1
                if below >= ctrl.consecutive_below:
                    converged = True
                    break
            else:
                below = 0
        err = sum(recent[-ctrl.consecutive_below:]) + _TERM_ROUNDING * abs(weight) * acc.abs_total
        value = offset + weight * (explicit + tail)
        if converged:
            return value, n_last, err, weight * tail
        if n_last >= n_cap:
            raise ConvergenceError(
                f"mode sum did not reach rel_tol={ctrl.rel_tol} by n_max={ctrl.n_max}",
                partial=value, tail_estimate=err, n_used=n_last,
            )
        n_last = min(_parity_last(2 * n_last + 1, first), n_cap)


def _setup(cfg: StackConfig, Omega, plasma: PlasmaParams):
    if not (Omega > 0 and math.isfinite(Omega)):
        raise DomainError(f"Omega must be positive, got {Omega}")
    W = film_width_parameter(cfg.d, plasma)
    Qz = tangential_wavenumber(Omega, cfg.theta, cfg.eps1)
    return W, Qz


def impedance_antisymmetric(cfg: StackConfig, Omega, plasma: PlasmaParams,
                            ctrl: SeriesControl = SeriesControl()) -> SeriesSum:
    """Z1 = -(4 i Omega / W) sum over odd n >= 1."""
    W, Qz = _setup(cfg, Omega, plasma)
    pref = -4j * Omega / W
    value, n_used, err, tail = _mode_sum(1, W, Omega, Qz, plasma.beta, plasma.eps, ctrl)
    return SeriesSum(pref * value, n_used, abs(pref) * err, pref * tail)


def impedance_symmetric(cfg: StackConfig, Omega, plasma: PlasmaParams,
                        ctrl: SeriesControl = SeriesControl()) -> SeriesSum:
    """Z2 = -(2 i Omega / W) [term(0) + 2 sum over even n >= 2]."""
    W, Qz = _setup(cfg, Omega, plasma)
    pref = -2j * Omega / W
    t0 = _zero_term(Omega, Qz, plasma.beta, plasma.eps)
    value, n_used, err, tail = _mode_sum(2, W, Omega, Qz, plasma.beta, plasma.eps, ctrl,
                                         offset=t0, weight=2.0)
    return SeriesSum(pref * value, n_used, abs(pref) * err, pref * tail)


def impedances(cfg: StackConfig, Omega, plasma: PlasmaParams,
               ctrl: SeriesControl = SeriesControl()) -> ImpedancePair:
    z1 = impedance_antisymmetric(cfg, Omega, plasma, ctrl)
    z2 = impedance_symmetric(cfg, Omega, plasma, ctrl)
    return ImpedancePair(z1.value, z2.value, z1.n_used, z2.n_used,
                         max(z1.tail_estimate, z2.tail_estimate),
                         z1.tail_estimate, z2.tail_estimate)


def transformed_impedances(cfg: StackConfig, Omega, plasma: PlasmaParams,
                           ctrl: SeriesControl = SeriesControl()):
    """Single-bracket variant summing 1/(Omega^2 eps_tr - Q^2) only.

    Kept for comparison against the full two-bracket sum; it agrees with it
    only at normal incidence.  Returns ``(Z1, Z2)``.
    """
    W, Qz = _setup(cfg, Omega, plasma)
    beta, eps = plasma.beta, plasma.eps
    s1, *_ = _mode_sum(1, W, Omega, Qz, beta, eps, ctrl, kind="transformed")
    t0 = _zero_term(Omega, Qz, beta, eps, kind="transformed")
    s2, *_ = _mode_sum(2, W, Omega, Qz, beta, eps, ctrl, offset=t0, weight=2.0, kind="transformed")
    return -4j * Omega / W * s1, -2j * Omega / W * s2
