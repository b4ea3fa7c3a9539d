"""Reflection amplitudes and energy coefficients of the stack."""
from __future__ import annotations

import cmath
import enum
import math
import sys
from dataclasses import dataclass

from .dielectric import PlasmaParams
from .errors import ConvergenceError, DomainError
from .impedance import ImpedancePair, SeriesControl, StackConfig, impedances

#: beta_j from the in-plane wavevector sqrt(eps1) sin(theta) (matches Q_z and k_2x)
CONSISTENT = "consistent"
#: beta_j = 1 - sin^2(theta)/eps_j exactly as printed in the source formulas
VACUUM = "vacuum"
KINEMATICS = (CONSISTENT, VACUUM)

_CRITICAL_ULPS = 8

# cos(theta) below this is reported as grazing incidence (theta > ~89.43 deg)
GRAZING_COS = 1e-2


class Flag(str, enum.Enum):
    NORMAL = "normal"
    TOTAL_INTERNAL_REFLECTION = "total_internal_reflection"
    GRAZING = "grazing"


@dataclass(frozen=True)
class AmplitudePair:
    p1: complex
    p2: complex

    @property
    def p_bar(self):
        return (self.p1 + self.p2) / 2


@dataclass(frozen=True)
class GeometryFactors:
    """Angle- and medium-dependent factors entering p_j, T and R.

    ``g = beta12 * s`` and ``h = cos(theta) / g``; one of them may be infinite
    at the critical angle, the other is then zero.
    """

    beta1: complex
    beta2: complex
    beta12: complex
    eps12: complex
    k1x_factor: float
    k2x_factor: complex
    #: sqrt(eps12 - sin^2 theta) on the Im >= 0 branch
    s: complex
    g: complex
    h: complex
    total_internal_reflection: bool


@dataclass(frozen=True)
class TRAResult:
    T: float
    R: float
    A: float
    flag: Flag
    impedance: ImpedancePair | None = None
    amplitudes: AmplitudePair | None = None


def _sqrt_upper(z):
    """Square root with Im >= 0 (outgoing / decaying wave)."""
    r = cmath.sqrt(complex(z))
    if r.imag < 0 or (r.imag == 0 and r.real < 0):
        r = -r
    return r


def _real_if_possible(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def geometry_factors(cfg: StackConfig, kinematics: str = CONSISTENT) -> GeometryFactors:
    """beta_j = 1 - kappa^2/eps_j with kappa^2 = eps1 sin^2(theta) ("consistent")
    or kappa^2 = sin^2(theta) ("vacuum")."""
    if kinematics not in KINEMATICS:
        raise DomainError(f"unknown kinematics {kinematics!r}; expected one of {KINEMATICS}")
    s2 = math.sin(cfg.theta) ** 2
    cos = math.cos(cfg.theta)
    e1 = cfg.eps1
    e2 = _real_if_possible(cfg.eps2)
    eps12 = e2 / e1
    # eps12 - sin^2 written so that it is exactly cos^2 when eps12 == 1
    z = (eps12 - 1) + cos * cos
    tir = False
    if not isinstance(z, complex) and z <= _CRITICAL_ULPS * sys.float_info.epsilon * eps12:
        # at or beyond the critical angle; snaps the last-ulp residue of degree->radian
        # conversion so that the critical angle itself counts as totally reflecting
        tir = True
        z = min(z, 0.0)
    s = _sqrt_upper(z)
    if kinematics == VACUUM:
        beta1 = 1 - s2 / e1
        beta2 = 1 - s2 / e2
        if beta2 == 0:
            raise DomainError("beta2 = 0 (sin^2 theta = eps2): beta12 diverges",
                              {"theta_deg": cfg.theta_deg, "eps2": cfg.eps2})
        beta12 = beta1 / beta2
        g = beta12 * s
        h = cos / g if g != 0 else complex(math.inf)
    else:
        beta1 = 1 - s2
        beta2 = z / eps12
        beta12 = beta1 / beta2 if beta2 != 0 else math.inf
        h = s / (eps12 * cos)
        g = cos / h if h != 0 else complex(math.inf)
    if beta1 == 0:
        raise DomainError("beta1 = 0 (sin^2 theta = eps1)", {"theta_deg": cfg.theta_deg})
    return GeometryFactors(
        beta1=beta1,
        beta2=beta2,
        beta12=beta12,
        eps12=eps12,
        k1x_factor=math.sqrt(e1) * cos,
        k2x_factor=_sqrt_upper(e2 - e1 * s2) if not tir else math.sqrt(e1) * s,
        s=s,
        g=g,
        h=h,
        total_internal_reflection=tir,
    )


def is_total_internal_reflection(cfg: StackConfig):
    """Real media with sin^2(theta) >= eps2/eps1 (to within conversion rounding)."""
    return geometry_factors(cfg).total_internal_reflection


def amplitude(Z, cfg: StackConfig, geo: GeometryFactors | None = None):
    """p = (sqrt(eps1) cos(theta) Z + beta1) / (sqrt(eps1) cos(theta) Z - beta1)."""
    geo = geo or geometry_factors(cfg)
    if cmath.isinf(Z):
        return 1 + 0j
    num = geo.k1x_factor * Z + geo.beta1
    den = geo.k1x_factor * Z - geo.beta1
    if den == 0:
        raise DomainError("singular amplitude: sqrt(eps1) cos(theta) Z = beta1", {"Z": Z})
    return num / den


def amplitudes(Z: ImpedancePair, cfg: StackConfig, kinematics: str = CONSISTENT) -> AmplitudePair:
    geo = geometry_factors(cfg, kinematics)
    return AmplitudePair(amplitude(Z.Z1, cfg, geo), amplitude(Z.Z2, cfg, geo))


def _weights(geo: GeometryFactors, cos):
    """(a, b) proportional to (g, cos theta) with a real positive scale factor.

    T and R are homogeneous of degree zero under such scaling, so the
    smaller of g/cos and cos/g keeps everything finite.
    """
    if abs(geo.h) <= 1:
        return 1.0, geo.h
    return geo.g / cos, 1.0


def _coefficients(p: AmplitudePair, cfg: StackConfig, geo: GeometryFactors):
    a, b = _weights(geo, math.cos(cfg.theta))
    pb, pp = p.p_bar, p.p1 * p.p2
    den = a * (1 + pb) + b * (1 - pb)
    if den == 0:
        raise DomainError("degenerate denominator in T/R", {"theta_deg": cfg.theta_deg})
    R = abs((a * (pb + pp) + b * (pb - pp)) / den) ** 2
    # Re(g) cos = Re(a conj(b)) after a common real rescaling; past the critical
    # angle one of a, b is purely imaginary and T comes out as exactly 0.0
    T = (complex(a) * complex(b).conjugate()).real * abs((p.p1 - p.p2) / den) ** 2
    return T, R


def reflectance(p: AmplitudePair, cfg: StackConfig, kinematics: str = CONSISTENT) -> float:
    """R = |(g (pbar + p1 p2) + cos (pbar - p1 p2)) / (g (1 + pbar) + cos (1 - pbar))|^2."""
    return _coefficients(p, cfg, geometry_factors(cfg, kinematics))[1]


def transmittance(p: AmplitudePair, cfg: StackConfig, kinematics: str = CONSISTENT) -> float:
    """T = Re(g) cos |(p1 - p2) / (g (1 + pbar) + cos (1 - pbar))|^2, g = beta12 s.

    Zero identically past the critical angle for transparent media.
    """
    return _coefficients(p, cfg, geometry_factors(cfg, kinematics))[0]


def absorptance(T, R):
    return 1 - T - R


def evaluate_point(cfg: StackConfig, Omega, plasma: PlasmaParams,
                   ctrl: SeriesControl = SeriesControl(), kinematics: str = CONSISTENT) -> TRAResult:
    """T, R, A of the stack at one frequency."""
    where = {"Omega": Omega, "theta_deg": cfg.theta_deg, "d": cfg.d,
             "eps1": cfg.eps1, "eps2": cfg.eps2}
    try:
        Z = impedances(cfg, Omega, plasma, ctrl)
        geo = geometry_factors(cfg, kinematics)
        p = AmplitudePair(amplitude(Z.Z1, cfg, geo), amplitude(Z.Z2, cfg, geo))
        T, R = _coefficients(p, cfg, geo)
    except DomainError as exc:
        raise DomainError(str(exc), where) from exc
    except ConvergenceError as exc:
        raise ConvergenceError(f"{exc} at {where}", exc.partial, exc.tail_estimate, exc.n_used) from exc
    if geo.total_internal_reflection:
        flag = Flag.TOTAL_INTERNAL_REFLECTION
    elif math.cos(cfg.theta) < GRAZING_COS:
        flag = Flag.GRAZING
    else:
        flag = Flag.NORMAL
    return TRAResult(T, R, absorptance(T, R), flag, Z, p)
