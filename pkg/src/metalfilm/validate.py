"""Built-in self-check: production path against the oracles plus module invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dielectric import _SERIES_SWITCH, SMALL_Q, SODIUM, drude, eps_l, eps_tr
from .impedance import SeriesControl, StackConfig, impedances
from .optics import CONSISTENT, amplitudes, evaluate_point, reflectance, transmittance
from .oracle import (
    eps_l_mp,
    eps_tr_mp,
    flux_coefficients,
    impedance_bruteforce,
    tra_unsimplified,
)
from .sweep import SweepSpec, run_sweep

PLASMA = SODIUM.with_eps(1e-3)

# (d nm, eps1, eps2, theta deg, Omega) spanning the reference configurations
REFERENCE_POINTS = (
    (1.0, 1.0, 4.0, 75.0, 0.6),
    (1.0, 1.0, 4.0, 75.0, 1.2),
    (10.0, 4.0, 1.0, 20.0, 1.0),
    (10.0, 8.0, 1.0, 15.0, 1.45),
    (100.0, 8.0, 1.0, 15.0, 1.0),
    (50.0, 1.0, 1.0, 0.0, 0.3),
)

ORACLE_TOL = 1e-8
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: float
    tolerance: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<34} observed={self.observed:.3e}  tol={self.tolerance:.1e}"
        return f"{text}  {self.detail}" if self.detail else text


def _rel(a, b):
    """|a - b| / max(|b|, 1): relative away from zero, absolute near it."""
    return abs(a - b) / max(abs(b), 1.0)


def _check(name, observed, tol, detail="", upper=True):
    ok = observed <= tol if upper else observed >= tol
    return CheckResult(name, bool(ok and math.isfinite(observed)), float(observed), tol, detail)


def check_small_q():
    worst = 0.0
    for q in np.geomspace(1e-8, 1e-4, 9):
        for Om in (0.5, 1.0, 1.5):
            for e in (0.0, 1e-3, 1e-1):
                ref = drude(Om, e)
                worst = max(worst, _rel(eps_tr(q, Om, e), ref), _rel(eps_l(q, Om, e), ref))
    return _check("dielectric small-q Drude limit", worst, 1e-6)


def check_switchover():
    worst = 0.0
    for Om in (0.3, 0.8, 1.0, 1.5):
        for e in (0.0, 1e-3, 1e-1):
            w = abs(complex(Om, e))
            for q in (SMALL_Q, _SERIES_SWITCH * w):
                lo, hi = q * (1 - 1e-12), q * (1 + 1e-12)
                for f in (eps_tr, eps_l):
                    worst = max(worst, _rel(f(lo, Om, e), f(hi, Om, e)))
    return _check("dielectric switchover continuity", worst, 1e-9)


def check_large_omega():
    """|eps_tr - 1| <= C / Omega, shrinking monotonically."""
    q, e = 0.5, 1e-3
    omegas = (1e2, 1e3, 1e4, 1e5)
    devs = [abs(eps_tr(q, Om, e) - 1) for Om in omegas]
    monotone = all(a > b for a, b in zip(devs, devs[1:]))
    C = max(d * Om for d, Om in zip(devs, omegas))
    return CheckResult("dielectric large-Omega limit", monotone and C <= 1.0, C, 1.0,
                       f"max |eps_tr-1|*Omega, monotone={monotone}")


def check_dielectric_oracle():
    worst = 0.0
    for q, Om, e in ((0.5, 1.0, 1e-3), (0.3, 0.8, 1e-3), (2.0, 1.2, 1e-2), (0.05, 0.7, 0.0)):
        worst = max(worst, _rel(eps_tr(q, Om, e), complex(eps_tr_mp(q, Om, e))),
                    _rel(eps_l(q, Om, e), complex(eps_l_mp(q, Om, e))))
    return _check("dielectric vs 50-digit oracle", worst, IDENTITY_TOL)


def check_dielectric_passivity():
    q = np.linspace(1e-3, 3.0, 61)
    worst = 0.0
    for Om in (0.2, 0.7, 1.0, 1.4):
        for e in (1e-3, 1e-1):
            worst = min(worst, eps_tr(q, Om, e).imag.min(), eps_l(q, Om, e).imag.min())
    return _check("dielectric Im eps >= 0", worst, 0.0, upper=False)


def check_free_standing(ctrl, kinematics, samples=20, seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        cfg = StackConfig.from_degrees(float(rng.choice([1.0, 5.0, 20.0])), 1.0, 1.0,
                                       float(rng.uniform(0, 85)))
        Om = float(rng.uniform(0.05, 2.0))
        p = amplitudes(impedances(cfg, Om, PLASMA, ctrl), cfg, kinematics)
        T, R = transmittance(p, cfg, kinematics), reflectance(p, cfg, kinematics)
        worst = max(worst, abs(T - abs(p.p1 - p.p2) ** 2 / 4) / max(T, 1e-300),
                    abs(R - abs(p.p1 + p.p2) ** 2 / 4) / max(R, 1e-300))
    return _check("free-standing reduction", worst, IDENTITY_TOL)


def check_tir(ctrl, kinematics):
    values = []
    for eps1, theta in ((4.0, 30.0), (4.0, 45.0), (4.0, 75.0), (8.0, 20.705), (8.0, 60.0)):
        cfg = StackConfig.from_degrees(10.0, eps1, 1.0, theta)
        values.append(evaluate_point(cfg, 1.0, PLASMA, ctrl, kinematics).T)
    worst = max(abs(v) for v in values)
    return CheckResult("total internal reflection T == 0", worst == 0.0, worst, 0.0)


def _oracle_rows(ctrl, N):
    rows = []
    for d, e1, e2, th, Om in REFERENCE_POINTS:
        cfg = StackConfig.from_degrees(d, e1, e2, th)
        rows.append((cfg, Om, impedances(cfg, Om, PLASMA, ctrl),
                     impedance_bruteforce(cfg, Om, PLASMA, N)))
    return rows


def check_impedance_oracle(rows):
    worst = 0.0
    for _, _, prod, ref in rows:
        worst = max(worst, abs(prod.Z1 - ref.Z1) / abs(ref.Z1), abs(prod.Z2 - ref.Z2) / abs(ref.Z2))
    return _check("impedance vs brute-force oracle", worst, ORACLE_TOL,
                  f"{len(rows)} points, N=1e6 extrapolated")


def check_tail_bound(rows):
    """The reported tail estimate must cover the true error, and both must be small."""
    worst_ratio, worst_est = 0.0, 0.0
    for _, _, prod, ref in rows:
        for z, zr, est, unc in ((prod.Z1, ref.Z1, prod.tail_estimate_odd, ref.tail_estimate_odd),
                                (prod.Z2, ref.Z2, prod.tail_estimate_even, ref.tail_estimate_even)):
            worst_ratio = max(worst_ratio, abs(z - zr) / (est + unc + 1e-300))
            worst_est = max(worst_est, est / abs(zr))
    ok = worst_ratio <= 1.0 and worst_est <= ORACLE_TOL
    return CheckResult("impedance tail bound", ok, worst_est, ORACLE_TOL,
                       f"error/estimate={worst_ratio:.3f} (must be <= 1)")


def check_passivity(rows):
    worst = max(max(prod.Z1.real, prod.Z2.real) for _, _, prod, _ in rows)
    return _check("impedance passivity Re Z <= 0", worst, 1e-12)


def check_coefficient_forms(rows, kinematics):
    worst_forms, worst_flux = 0.0, 0.0
    for cfg, _, prod, _ in rows:
        p = amplitudes(prod, cfg, kinematics)
        T, R = transmittance(p, cfg, kinematics), reflectance(p, cfg, kinematics)
        T9, R9 = tra_unsimplified(p, cfg, kinematics)
        Tf, _ = flux_coefficients(p, cfg, kinematics)
        worst_forms = max(worst_forms, abs(T9 - T) / T, abs(R9 - R) / R)
        worst_flux = max(worst_flux, abs(Tf - T) / T)
    return (_check("T/R pre-simplification forms", worst_forms, IDENTITY_TOL),
            _check("T via energy flux", worst_flux, IDENTITY_TOL))


def check_energy_bounds(ctrl, kinematics):
    worst = 0.0
    specs = (
        SweepSpec("Omega", 0.05, 1.5, 30, d=1.0, eps1=1.0, eps2=4.0, theta_deg=75.0),
        SweepSpec("theta", 0.0, 89.5, 30, d=10.0, eps1=4.0, eps2=1.0, Omega=1.0),
        SweepSpec("Omega", 0.05, 1.5, 30, d=100.0, eps1=8.0, eps2=1.0, theta_deg=15.0),
    )
    for spec in specs:
        res = run_sweep(replace(spec, plasma=PLASMA, control=ctrl, kinematics=kinematics))
        T, R, A = res.column("T"), res.column("R"), res.column("A")
        worst = max(worst, -T.min(), T.max() - 1, -R.min(), R.max() - 1, -A.min() - 1e-12, 0.0)
    return _check("energy bounds 0<=T,R<=1, A>=-1e-12", worst, 0.0)


def check_determinism(ctrl, kinematics):
    spec = SweepSpec("Omega", 0.9, 1.1, 12, d=10.0, eps1=8.0, eps2=1.0, theta_deg=15.0,
                     plasma=PLASMA, control=ctrl, kinematics=kinematics)
    a, b = run_sweep(spec), run_sweep(spec, threads=4)
    same = all(_bits(x) == _bits(y) for x, y in zip(a.rows, b.rows))
    return CheckResult("determinism serial vs parallel", same, 0.0 if same else 1.0, 0.0)


def _bits(row):
    return tuple(float(v).hex() for v in (row.T, row.R, row.Z1.real, row.Z1.imag,
                                          row.Z2.real, row.Z2.imag))


def run_validation(ctrl: SeriesControl = SeriesControl(), kinematics: str = CONSISTENT,
                   N: int = 10**6):
    results = [
        check_small_q(),
        check_switchover(),
        check_large_omega(),
        check_dielectric_oracle(),
        check_dielectric_passivity(),
        check_free_standing(ctrl, kinematics),
        check_tir(ctrl, kinematics),
    ]
    rows = _oracle_rows(ctrl, N)
    results += [check_impedance_oracle(rows), check_tail_bound(rows), check_passivity(rows)]
    results += check_coefficient_forms(rows, kinematics)
    results += [check_energy_bounds(ctrl, kinematics), check_determinism(ctrl, kinematics)]
    return results
