"""Independent reference computations used to check the production path.

Nothing here is fast.  The brute-force impedance sums every harmonic up to a
fixed cutoff with exactly rounded accumulation (``math.fsum``) and removes
the O(1/N) truncation error by polynomial extrapolation in 1/N, which shares
nothing with the asymptotic tail used in :mod:`metalfilm.impedance`.  The
coefficient checks re-derive T and R from the pre-simplification forms and
from the energy fluxes of the field amplitudes.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .dielectric import PlasmaParams, _eps_l, _eps_tr, drude
from .errors import DomainError
from .impedance import (
    ImpedancePair,
    SeriesControl,
    StackConfig,
    film_width_parameter,
    impedances,
    tangential_wavenumber,
    transformed_impedances,
)
from .optics import CONSISTENT, VACUUM, AmplitudePair


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    production: complex
    oracle: complex

    @property
    def abs_error(self):
        return abs(self.production - self.oracle)

    @property
    def rel_error(self):
        scale = abs(self.oracle)
        return self.abs_error / scale if scale else self.abs_error

    def __str__(self):
        return (f"{self.quantity}: production={self.production:.17g} oracle={self.oracle:.17g} "
                f"abs={self.abs_error:.3e} rel={self.rel_error:.3e}")


# -- dielectric functions in arbitrary precision -----------------------------

def _mp_log_ratio(q, w, eps):
    z = (w - q) / (w + q)
    if eps == 0:
        z = mpmath.mpc(z.real, abs(z.imag))
    return mpmath.log(z)


def eps_tr_mp(q1, Omega, eps, dps=50):
    """Closed-form eps_tr evaluated with ``dps`` significant digits."""
    with mpmath.workdps(dps):
        q, O = mpmath.mpf(q1), mpmath.mpf(Omega)
        w = O + 1j * mpmath.mpf(eps)
        L = _mp_log_ratio(q, w, eps)
        return 1 - 3 / (4 * O * q**3) * (2 * w * q + (w * w - q * q) * L)


def eps_l_mp(q1, Omega, eps, dps=50):
    """Closed-form eps_l evaluated with ``dps`` significant digits."""
    with mpmath.workdps(dps):
        q, O, e = mpmath.mpf(q1), mpmath.mpf(Omega), mpmath.mpf(eps)
        w = O + 1j * e
        L = _mp_log_ratio(q, w, eps)
        return 1 + 3 / q**2 * (1 + w / (2 * q) * L) / (1 + 1j * e / (2 * q) * L)


def impedance_term_mp(n, d, Omega, theta, eps1, plasma: PlasmaParams, dps=50):
    """One summand of the mode sum, every step in ``dps``-digit arithmetic."""
    with mpmath.workdps(dps):
        c = mpmath.mpf("2.99792458e10")
        W = mpmath.mpf(plasma.omega_p) / c * mpmath.mpf(d) * mpmath.mpf("1e-7")
        O = mpmath.mpf(Omega)
        Qx = mpmath.pi * n / W
        Qz = mpmath.sqrt(mpmath.mpf(eps1)) * O * mpmath.sin(mpmath.mpf(theta))
        Q2 = Qx**2 + Qz**2
        q = mpmath.mpf(plasma.v_F) / c * mpmath.sqrt(Q2)
        et = eps_tr_mp(q, O, plasma.eps, dps)
        el = eps_l_mp(q, O, plasma.eps, dps)
        return (Qz**2 / (O**2 * el) + Qx**2 / (O**2 * et - Q2)) / Q2


# -- brute-force impedance ----------------------------------------------------

def _exact_sum(values):
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _extrapolated_sum(terms, first, N, levels):
    """Partial sums at N/2^k (k < levels), extrapolated to N -> infinity.

    The remainder of a sum of a smooth summand decaying like 1/n^2 has an
    expansion in powers of 1/(N + 2), so a polynomial fit in that variable
    evaluated at zero removes the leading ``levels - 1`` orders.
    """
    hs, sums = [], []
    for k in reversed(range(levels)):
        M = N >> k
        count = (M - first) // 2 + 1
        hs.append(1.0 / (M + 2))
        sums.append(_exact_sum(terms[:count]))
    # Neville's scheme evaluated at h = 0
    table = list(sums)
    for j in range(1, levels):
        for i in range(levels - 1, j - 1, -1):
            table[i] = (hs[i - j] * table[i] - hs[i] * table[i - 1]) / (hs[i - j] - hs[i])
    best = table[-1]
    uncertainty = abs(best - table[-2]) if levels > 1 else abs(sums[-1] - sums[-2])
    return best, uncertainty, sums[-1]


def _bruteforce_terms(first, N, W, Omega, Qz, plasma):
    n = np.arange(first, N + 1, 2, dtype=float)
    Qx = np.pi * n / W
    Q2 = Qx * Qx + Qz * Qz
    q = plasma.beta * np.sqrt(Q2)
    O2 = Omega * Omega
    et = _eps_tr(q, Omega, plasma.eps)
    el = _eps_l(q, Omega, plasma.eps)
    return (Qz * Qz / (O2 * el) + Qx * Qx / (O2 * et - Q2)) / Q2


def impedance_bruteforce(cfg: StackConfig, Omega, plasma: PlasmaParams, N=10**6, levels=3,
                         extrapolate=True) -> ImpedancePair:
    """Both impedances from the summand at every harmonic up to ``N``.

    ``tail_estimate`` holds the oracle's own uncertainty (the change of the
    extrapolated value when the finest level is dropped).  With
    ``extrapolate=False`` the plain truncated sums are returned.
    """
    if N < 10**4:
        raise DomainError(f"brute-force cutoff must be >= 1e4, got {N}")
    W = film_width_parameter(cfg.d, plasma)
    Qz = tangential_wavenumber(Omega, cfg.theta, cfg.eps1)
    odd = _bruteforce_terms(1, N, W, Omega, Qz, plasma)
    even = _bruteforce_terms(2, N, W, Omega, Qz, plasma)
    s1, u1, raw1 = _extrapolated_sum(odd, 1, N, levels)
    s2, u2, raw2 = _extrapolated_sum(even, 2, N, levels)
    if not extrapolate:
        s1, s2, u1, u2 = raw1, raw2, 0.0, 0.0
    if Qz == 0:
        t0 = 1.0 / (Omega * Omega * drude(Omega, plasma.eps))
    else:
        t0 = 1.0 / (Omega * Omega * complex(_eps_l(np.array([plasma.beta * Qz]), Omega, plasma.eps)[0]))
    z1 = -4j * Omega / W * s1
    z2 = -2j * Omega / W * (t0 + 2 * s2)
    e1 = 4 * Omega / W * u1
    e2 = 4 * Omega / W * u2
    return ImpedancePair(z1, z2, N if N % 2 else N - 1, N if N % 2 == 0 else N - 1,
                         max(e1, e2), e1, e2)


# -- coefficient cross-checks -------------------------------------------------

def _root(z):
    r = cmath.sqrt(complex(z))
    return -r if r.imag < 0 or (r.imag == 0 and r.real < 0) else r


def _betas(cfg: StackConfig, kinematics):
    s2 = math.sin(cfg.theta) ** 2
    e1, e2 = cfg.eps1, complex(cfg.eps2)
    if kinematics == VACUUM:
        b1, b2 = 1 - s2 / e1, 1 - s2 / e2
        b12 = e2 * (e1 - s2) / (e1 * (e2 - s2))
    elif kinematics == CONSISTENT:
        b1, b2 = 1 - s2, 1 - e1 * s2 / e2
        b12 = e2 * (1 - s2) / (e2 - e1 * s2)
    else:
        raise DomainError(f"unknown kinematics {kinematics!r}")
    return b1, b2, b12


def tra_unsimplified(p: AmplitudePair, cfg: StackConfig, kinematics=CONSISTENT):
    """(T, R) from the forms written with sqrt(eps2 - eps1 sin^2) and sqrt(eps1) cos."""
    if complex(cfg.eps2).imag != 0:
        raise DomainError("the unsimplified forms assume real eps2")
    e1, e2 = cfg.eps1, complex(cfg.eps2).real
    sin2 = math.sin(cfg.theta) ** 2
    cos = math.cos(cfg.theta)
    _, _, b12 = _betas(cfg, kinematics)
    b12 = b12.real if isinstance(b12, complex) else b12
    root2 = _root(e2 - e1 * sin2)
    k1 = math.sqrt(e1) * cos
    pb, pp = (p.p1 + p.p2) / 2, p.p1 * p.p2
    den = b12 * root2 * (1 + pb) + k1 * (1 - pb)
    R = abs((b12 * root2 * (pb + pp) + k1 * (pb - pp)) / den) ** 2
    T = cos * b12 * _root(e1 * (e2 - e1 * sin2)).real * abs((p.p1 - p.p2) / den) ** 2
    return T, R


def flux_coefficients(p: AmplitudePair, cfg: StackConfig, kinematics=CONSISTENT):
    """(T, R) as ratios of time-averaged normal energy fluxes.

    Builds the outer-field amplitudes a_j, b_j of the two symmetry cases,
    combines them into one incident / reflected / transmitted wave, and
    weighs each |E|^2 with Re(k_jx / beta_j).
    """
    e1, e2 = cfg.eps1, complex(cfg.eps2)
    sin2 = math.sin(cfg.theta) ** 2
    b1, b2, _ = _betas(cfg, kinematics)
    k1 = math.sqrt(e1) * math.cos(cfg.theta)
    k2 = _root(e2 - e1 * sin2)
    plus = (b2 * k1 + b1 * k2) / (2 * b1 * k2)
    minus = (b2 * k1 - b1 * k2) / (2 * b1 * k2)
    a1 = minus - plus * p.p1
    bb1 = -plus + minus * p.p1
    a2 = -minus + plus * p.p2
    bb2 = plus - minus * p.p2
    incident = bb2 - bb1
    reflected = p.p1 * bb2 - p.p2 * bb1
    transmitted = a1 * bb2 - a2 * bb1
    flux_in = abs(incident) ** 2 * (k1 / b1).real
    T = abs(transmitted) ** 2 * (k2 / b2).real / flux_in
    R = abs(reflected) ** 2 * (k1 / b1).real / flux_in
    return T, R


def transmittance_via_flux(p: AmplitudePair, cfg: StackConfig, kinematics=CONSISTENT):
    if complex(cfg.eps1).imag != 0:
        raise DomainError("flux transmittance assumes a non-absorbing first medium")
    return flux_coefficients(p, cfg, kinematics)[0]


# -- reports --------------------------------------------------------------------

def impedance_reports(cfg: StackConfig, Omega, plasma: PlasmaParams,
                      ctrl: SeriesControl = SeriesControl(), N=10**6):
    prod = impedances(cfg, Omega, plasma, ctrl)
    ref = impedance_bruteforce(cfg, Omega, plasma, N)
    return (OracleReport("Z1", prod.Z1, ref.Z1), OracleReport("Z2", prod.Z2, ref.Z2)), prod, ref


def transformed_discrepancy(cfg: StackConfig, Omega, plasma: PlasmaParams,
                            ctrl: SeriesControl = SeriesControl()):
    """Compare the two-bracket sum against the single-bracket variant."""
    full = impedances(cfg, Omega, plasma, ctrl)
    t1, t2 = transformed_impedances(cfg, Omega, plasma, ctrl)
    return OracleReport("Z1 transformed", t1, full.Z1), OracleReport("Z2 transformed", t2, full.Z2)
