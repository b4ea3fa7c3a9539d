"""One-dimensional parameter sweeps over :func:`metalfilm.optics.evaluate_point`."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from .dielectric import SODIUM, PlasmaParams
from .errors import ConfigError, FilmError
from .impedance import SeriesControl, StackConfig
from .optics import CONSISTENT, KINEMATICS, evaluate_point

AXES = ("Omega", "theta", "d", "eps1", "eps2")
COLUMNS = ("T", "R", "A")

_NAN = float("nan")


@dataclass(frozen=True)
class SweepSpec:
    """A uniform grid along ``axis``; every other parameter is held fixed.

    Axis units: Omega dimensionless, theta in degrees, d in nm, eps1/eps2
    dimensionless.  The fixed value of the swept parameter is ignored.
    """

    axis: str
    start: float
    stop: float
    count: int
    d: float = 10.0
    eps1: float = 1.0
    eps2: complex = 1.0
    theta_deg: float = 0.0
    Omega: float = 1.0
    plasma: PlasmaParams = SODIUM
    control: SeriesControl = field(default_factory=SeriesControl)
    kinematics: str = CONSISTENT

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}", "axis")
        if isinstance(self.count, bool) or not isinstance(self.count, (int, np.integer)) or self.count < 2:
            raise ConfigError(f"count must be an integer >= 2, got {self.count!r}", "count")
        for name in ("start", "stop"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite", name)
        if not self.start < self.stop:
            raise ConfigError(f"start must be < stop, got {self.start} >= {self.stop}", "start")
        if self.kinematics not in KINEMATICS:
            raise ConfigError(f"kinematics must be one of {KINEMATICS}", "kinematics")
        lo, hi = self.start, self.stop
        if self.axis == "theta" and not (0 <= lo and hi < 90):
            raise ConfigError("theta sweep must stay within [0, 90) degrees", "theta_deg")
        if self.axis in ("d", "eps1", "eps2", "Omega") and lo <= 0:
            raise ConfigError(f"{self.axis} sweep must stay positive", self.axis)
        # validates the fixed parameters once, at the first grid point
        try:
            self.point(self.start)
        except FilmError as exc:
            raise ConfigError(str(exc), self.axis) from exc

    def grid(self) -> np.ndarray:
        i = np.arange(self.count, dtype=float)
        values = self.start + i * (self.stop - self.start) / (self.count - 1)
        values[-1] = self.stop
        return values

    def point(self, value):
        """(StackConfig, Omega) at one axis value."""
        params = {"d": self.d, "eps1": self.eps1, "eps2": self.eps2, "theta_deg": self.theta_deg}
        Omega = self.Omega
        if self.axis == "Omega":
            Omega = float(value)
        elif self.axis == "theta":
            params["theta_deg"] = float(value)
        else:
            params[self.axis] = float(value)
        return StackConfig.from_degrees(**params), Omega

    def to_dict(self):
        eps2 = complex(self.eps2)
        return {
            "axis": self.axis,
            "start": self.start,
            "stop": self.stop,
            "count": int(self.count),
            "d_nm": self.d,
            "eps1": self.eps1,
            "eps2": eps2.real if eps2.imag == 0 else [eps2.real, eps2.imag],
            "theta_deg": self.theta_deg,
            "omega_over_omega_p": self.Omega,
            "omega_p": self.plasma.omega_p,
            "v_F": self.plasma.v_F,
            "nu_over_omega_p": self.plasma.eps,
            "series": asdict(self.control),
            "kinematics": self.kinematics,
        }


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    T: float
    R: float
    A: float
    Z1: complex
    Z2: complex
    n_odd: int
    n_even: int
    flag: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    metadata: dict

    def __len__(self):
        return len(self.rows)

    @property
    def axis_values(self):
        return np.array([r.axis_value for r in self.rows])

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


@dataclass(frozen=True)
class Extremum:
    axis_value: float
    value: float
    kind: str  # "max" or "min"


def _evaluate(spec: SweepSpec, value) -> SweepRow:
    try:
        cfg, Omega = spec.point(value)
        res = evaluate_point(cfg, Omega, spec.plasma, spec.control, spec.kinematics)
    except FilmError as exc:
        # one bad point must not cost the rest of the curve
        msg = " ".join(str(exc).split())
        return SweepRow(float(value), _NAN, _NAN, _NAN, complex(_NAN, _NAN), complex(_NAN, _NAN),
                        0, 0, f"error: {type(exc).__name__}: {msg}")
    Z = res.impedance
    return SweepRow(float(value), res.T, res.R, res.A, Z.Z1, Z.Z2,
                    Z.n_used_odd, Z.n_used_even, res.flag.value)


def run_sweep(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Evaluate every grid point; rows come back in grid order regardless of ``threads``."""
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}", "threads")
    grid = spec.grid()
    if threads == 1:
        rows = [_evaluate(spec, v) for v in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda v: _evaluate(spec, v), grid))
    from . import __version__

    metadata = {
        "config": spec.to_dict(),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "failed_points": sum(r.flag.startswith("error") for r in rows),
    }
    return SweepResult(tuple(rows), metadata)


def local_extrema(x, y):
    """Strict interior extrema of ``y`` by neighbour comparison.

    A run of equal values counts as one candidate, located at its left end.
    Windows touching NaN are skipped.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    n = len(y)
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and y[j + 1] == y[i]:
            j += 1
        if j < n - 1:
            left, mid, right = y[i - 1], y[i], y[j + 1]
            if not (np.isnan(left) or np.isnan(mid) or np.isnan(right)):
                if mid > left and mid > right:
                    out.append(Extremum(float(x[i]), float(mid), "max"))
                elif mid < left and mid < right:
                    out.append(Extremum(float(x[i]), float(mid), "min"))
        i = j + 1
    return out


def find_local_extrema(result: SweepResult, column: str):
    if column not in COLUMNS:
        raise ConfigError(f"column must be one of {COLUMNS}, got {column!r}", "column")
    if len(result) < 3:
        raise ConfigError("need at least 3 rows to look for extrema", "count")
    return local_extrema(result.axis_values, result.column(column))
