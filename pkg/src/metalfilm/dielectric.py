"""Nonlocal dielectric functions of a degenerate electron plasma.

All quantities are dimensionless: wavenumbers ``q1`` are in units of
``omega_p / v_F``, frequencies ``Omega`` in units of ``omega_p`` and the
collision rate ``eps`` is ``nu / omega_p``.  Both functions accept numpy
arrays for ``q1`` and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: speed of light, cm/s
SPEED_OF_LIGHT = 2.99792458e10

#: below this wavenumber the closed forms are replaced by the q -> 0 limit
SMALL_Q = 1e-6
# |q/(Omega + i eps)| below which the Taylor expansion is used instead of the log form
_SERIES_SWITCH = 0.2
_SERIES_TERMS = 24

_m = np.arange(1, _SERIES_TERMS + 1)
# eps_tr:  sum_m x^(2m-2) / (4m^2 - 1)
_TR_COEF = 1.0 / (4.0 * _m**2 - 1.0)
# eps_l:   sum_k x^(2k-2) / (2k + 1)
_L_COEF = 1.0 / (2.0 * _m + 1.0)


@dataclass(frozen=True)
class PlasmaParams:
    """Electron-gas constants of the metal.

    Parameters
    ----------
    omega_p : float
        Plasma frequency, rad/s.
    v_F : float
        Fermi velocity, cm/s.
    nu : float
        Effective collision frequency, rad/s.
    """

    omega_p: float
    v_F: float
    nu: float = 0.0

    def __post_init__(self):
        if not (self.omega_p > 0 and math.isfinite(self.omega_p)):
            raise DomainError(f"omega_p must be positive, got {self.omega_p}")
        if not (0 < self.v_F < SPEED_OF_LIGHT):
            raise DomainError(f"v_F must satisfy 0 < v_F < c, got {self.v_F}")
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise DomainError(f"nu must be non-negative, got {self.nu}")

    @classmethod
    def from_ratio(cls, omega_p, v_F, nu_over_omega_p):
        return cls(omega_p, v_F, nu_over_omega_p * omega_p)

    @property
    def eps(self) -> float:
        """Dimensionless collision rate nu / omega_p."""
        return self.nu / self.omega_p

    @property
    def beta(self) -> float:
        """v_F / c."""
        return self.v_F / SPEED_OF_LIGHT

    def Omega(self, omega):
        """Dimensionless frequency omega / omega_p."""
        return omega / self.omega_p

    def with_eps(self, eps):
        return PlasmaParams(self.omega_p, self.v_F, eps * self.omega_p)


#: sodium, the only metal treated in the source analysis
SODIUM = PlasmaParams(omega_p=6.5e15, v_F=8.52e7, nu=0.0)


def drude(Omega, eps):
    """Local (q -> 0) limit 1 - 1/(Omega (Omega + i eps)) shared by both functions."""
    return 1.0 - 1.0 / (Omega * (Omega + 1j * eps))


def _check(q1, Omega, eps):
    if not (Omega > 0 and math.isfinite(Omega)):
        raise DomainError(f"Omega must be positive, got {Omega}")
    if not (eps >= 0 and math.isfinite(eps)):
        raise DomainError(f"eps must be non-negative, got {eps}")
    q = np.asarray(q1, dtype=float)
    if np.any(~np.isfinite(q)) or np.any(q < 0):
        raise DomainError("q1 must be finite and non-negative")
    if eps == 0 and np.any(q == Omega):
        raise DomainError(
            "q1 == Omega with eps == 0 sits on the logarithmic singularity; use eps > 0",
            {"Omega": Omega},
        )
    return q


def _log_ratio(q, w, eps):
    """Principal log((w - q)/(w + q)); eps == 0 is taken as the limit eps -> 0+."""
    z = (w - q) / (w + q)
    if eps == 0:
        # retarded prescription: approach the negative real axis from above
        z = z.real + 1j * np.abs(z.imag)
    return np.log(z)


def _series_x2(q, w):
    x2 = (q / w) ** 2
    # Horner on the coefficient tables (highest order first)
    tr = np.zeros_like(x2)
    lo = np.zeros_like(x2)
    for ct, cl in zip(_TR_COEF[::-1], _L_COEF[::-1]):
        tr = tr * x2 + ct
        lo = lo * x2 + cl
    return x2, tr, lo


def _eps_tr(q, Omega, eps):
    w = Omega + 1j * eps
    q = np.asarray(q, dtype=float)
    out = np.empty(q.shape, dtype=complex)
    small = np.abs(q) < _SERIES_SWITCH * abs(w)
    if np.any(small):
        _, tr, _ = _series_x2(q[small], w)
        out[small] = 1.0 - 3.0 * tr / (Omega * w)
    big = ~small
    if np.any(big):
        qb = q[big]
        L = _log_ratio(qb, w, eps)
        out[big] = 1.0 - 3.0 / (4.0 * Omega * qb**3) * (2.0 * w * qb + (w * w - qb * qb) * L)
    out[q < SMALL_Q] = drude(Omega, eps)
    return out


def _eps_l(q, Omega, eps):
    w = Omega + 1j * eps
    q = np.asarray(q, dtype=float)
    out = np.empty(q.shape, dtype=complex)
    small = np.abs(q) < _SERIES_SWITCH * abs(w)
    if np.any(small):
        x2, _, lo = _series_x2(q[small], w)
        den = Omega - 1j * eps * x2 * lo
        if np.any(den == 0):
            raise DomainError("eps_l denominator vanishes", {"Omega": Omega, "eps": eps})
        out[small] = 1.0 - 3.0 * lo / (w * den)
    big = ~small
    if np.any(big):
        qb = q[big]
        L = _log_ratio(qb, w, eps)
        den = 1.0 + 1j * eps / (2.0 * qb) * L
        if np.any(den == 0):
            raise DomainError("eps_l denominator vanishes", {"Omega": Omega, "eps": eps})
        out[big] = 1.0 + 3.0 / qb**2 * (1.0 + w / (2.0 * qb) * L) / den
    out[q < SMALL_Q] = drude(Omega, eps)
    return out


def _unwrap(q1, values):
    return complex(values) if np.ndim(q1) == 0 else values


def eps_tr(q1, Omega, eps):
    """Transverse dielectric function eps_tr(q1, Omega).

    Evaluates ``1 - 3/(4 Omega q^3) [2 w q + (w^2 - q^2) ln((w - q)/(w + q))]``
    with ``w = Omega + i eps`` on the principal branch.  Small ``q1`` uses a
    Taylor expansion in ``(q1/w)^2`` (the closed form cancels to nothing
    there) and ``q1 < SMALL_Q`` returns the Drude limit exactly.

    Raises
    ------
    DomainError
        ``Omega <= 0``, ``eps < 0``, ``q1 < 0`` or ``q1 == Omega`` with ``eps == 0``.
    """
    q = _check(q1, Omega, eps)
    return _unwrap(q1, _eps_tr(np.atleast_1d(q), Omega, eps).reshape(q.shape))


def eps_l(q1, Omega, eps):
    """Longitudinal dielectric function eps_l(q1, Omega) with collision correction.

    ``1 + 3/q^2 [1 + w/(2q) L] / [1 + i eps/(2q) L]``, ``L = ln((w - q)/(w + q))``.
    Same small-``q1`` handling and errors as :func:`eps_tr`; additionally a
    vanishing denominator raises :class:`DomainError`.
    """
    q = _check(q1, Omega, eps)
    return _unwrap(q1, _eps_l(np.atleast_1d(q), Omega, eps).reshape(q.shape))
