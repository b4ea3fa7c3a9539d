"""JSON run configuration in external units (d in nm, theta in degrees)."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from .dielectric import SODIUM, PlasmaParams
from .errors import ConfigError, FilmError
from .impedance import SeriesControl, StackConfig
from .optics import CONSISTENT, KINEMATICS
from .sweep import AXES, SweepSpec

PRESETS = {"sodium": SODIUM}

# config key holding the fixed value of each sweep axis
AXIS_KEYS = {"Omega": "omega_over_omega_p", "theta": "theta_deg", "d": "d_nm",
             "eps1": "eps1", "eps2": "eps2"}

_KEYS = {"material", "omega_p", "v_F", "nu_over_omega_p", "nu", "eps1", "eps2", "d_nm",
         "theta_deg", "omega_over_omega_p", "axis", "start", "stop", "count", "series",
         "kinematics"}
_SWEEP_KEYS = ("axis", "start", "stop", "count")
_SERIES_KEYS = {"rel_tol", "n_max", "consecutive_below"}


def _number(raw, key):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}", key)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite", key)
    return float(value)


def _complex(raw, key):
    value = raw[key]
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(f"{key}: complex values are written [re, im]", key)
        re, im = (_number({key: v}, key) for v in value)
        return complex(re, im) if im else re
    return _number(raw, key)


@dataclass(frozen=True)
class RunConfig:
    plasma: PlasmaParams
    material: str | None
    eps1: float | None
    eps2: complex | None
    d: float | None
    theta_deg: float | None
    Omega: float | None
    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    count: int | None = None
    control: SeriesControl = SeriesControl()
    kinematics: str = CONSISTENT

    @property
    def mode(self):
        return "sweep" if self.axis is not None else "point"

    def stack(self) -> StackConfig:
        return StackConfig.from_degrees(self.d, self.eps1, self.eps2, self.theta_deg)

    def sweep_spec(self) -> SweepSpec:
        fixed = {"d": self.d, "eps1": self.eps1, "eps2": self.eps2,
                 "theta_deg": self.theta_deg, "Omega": self.Omega}
        # the swept parameter has no fixed value; any placeholder is overridden per point
        fixed[{"theta": "theta_deg"}.get(self.axis, self.axis)] = self.start
        return SweepSpec(self.axis, self.start, self.stop, self.count, plasma=self.plasma,
                         control=self.control, kinematics=self.kinematics, **fixed)

    def to_dict(self):
        """Fully resolved configuration; feeding it back reproduces the run."""
        if self.material:
            out = {"material": self.material}
        else:
            out = {"omega_p": self.plasma.omega_p, "v_F": self.plasma.v_F}
        out["nu_over_omega_p"] = self.plasma.eps
        fixed = {"eps1": self.eps1, "d_nm": self.d, "theta_deg": self.theta_deg,
                 "omega_over_omega_p": self.Omega}
        if self.eps2 is not None:
            e2 = complex(self.eps2)
            fixed["eps2"] = e2.real if e2.imag == 0 else [e2.real, e2.imag]
        out.update({k: v for k, v in fixed.items() if v is not None})
        if self.axis is not None:
            out.update(axis=self.axis, start=self.start, stop=self.stop, count=self.count)
        out["series"] = asdict(self.control)
        out["kinematics"] = self.kinematics
        return out


def _plasma(raw):
    has_material = "material" in raw
    has_custom = "omega_p" in raw or "v_F" in raw
    if has_material == has_custom:
        raise ConfigError("give either material or both omega_p and v_F", "material")
    if ("nu" in raw) == ("nu_over_omega_p" in raw):
        raise ConfigError("give exactly one of nu_over_omega_p and nu", "nu_over_omega_p")
    if has_material:
        name = raw["material"]
        if not isinstance(name, str) or name.lower() not in PRESETS:
            raise ConfigError(f"material: unknown preset {name!r}; known: {sorted(PRESETS)}",
                              "material")
        base, material = PRESETS[name.lower()], name.lower()
    else:
        for key in ("omega_p", "v_F"):
            if key not in raw:
                raise ConfigError(f"{key}: required when no material preset is given", key)
        base, material = None, None
    omega_p = base.omega_p if base else _number(raw, "omega_p")
    v_F = base.v_F if base else _number(raw, "v_F")
    if "nu" in raw:
        nu, field = _number(raw, "nu"), "nu"
    else:
        nu, field = _number(raw, "nu_over_omega_p") * omega_p, "nu_over_omega_p"
    try:
        return PlasmaParams(omega_p, v_F, nu), material
    except FilmError as exc:
        raise ConfigError(f"{field}: {exc}", field) from exc


def _control(raw):
    series = raw.get("series", {})
    if not isinstance(series, dict):
        raise ConfigError("series: expected an object", "series")
    unknown = set(series) - _SERIES_KEYS
    if unknown:
        raise ConfigError(f"series: unknown keys {sorted(unknown)}", "series")
    kwargs = {}
    for key in series:
        value = _number(series, key)
        if key != "rel_tol":
            if value != int(value):
                raise ConfigError(f"series.{key}: expected an integer", f"series.{key}")
            value = int(value)
        kwargs[key] = value
    try:
        return SeriesControl(**kwargs)
    except FilmError as exc:
        raise ConfigError(f"series: {exc}", "series") from exc


def _check_fixed(cfg: RunConfig):
    if cfg.eps1 is not None and cfg.eps1 <= 0:
        raise ConfigError(f"eps1: must be > 0, got {cfg.eps1}", "eps1")
    if cfg.d is not None and cfg.d <= 0:
        raise ConfigError(f"d_nm: must be > 0, got {cfg.d}", "d_nm")
    if cfg.theta_deg is not None and not 0 <= cfg.theta_deg < 90:
        raise ConfigError(f"theta_deg: must lie in [0, 90) degrees, got {cfg.theta_deg}",
                          "theta_deg")
    if cfg.Omega is not None and cfg.Omega <= 0:
        raise ConfigError(f"omega_over_omega_p: must be > 0, got {cfg.Omega}",
                          "omega_over_omega_p")
    if cfg.eps2 is not None and cfg.eps2 == 0:
        raise ConfigError("eps2: must be nonzero", "eps2")


def parse_config(raw: dict) -> RunConfig:
    """Validate a decoded JSON object and resolve it into a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object", None)
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", sorted(unknown)[0])
    plasma, material = _plasma(raw)
    control = _control(raw)
    kinematics = raw.get("kinematics", CONSISTENT)
    if kinematics not in KINEMATICS:
        raise ConfigError(f"kinematics: expected one of {KINEMATICS}, got {kinematics!r}",
                          "kinematics")

    sweep_given = [k for k in _SWEEP_KEYS if k in raw]
    if sweep_given and len(sweep_given) != len(_SWEEP_KEYS):
        missing = [k for k in _SWEEP_KEYS if k not in raw]
        raise ConfigError(f"sweep mode needs {list(_SWEEP_KEYS)}; missing {missing}", missing[0])
    axis = None
    if sweep_given:
        axis = raw["axis"]
        if axis not in AXES:
            raise ConfigError(f"axis: expected one of {AXES}, got {axis!r}", "axis")
        if AXIS_KEYS[axis] in raw:
            raise ConfigError(f"{AXIS_KEYS[axis]}: cannot be fixed while sweeping {axis}; "
                              "set exactly one of point or sweep mode", AXIS_KEYS[axis])
    elif "omega_over_omega_p" not in raw:
        raise ConfigError("set either omega_over_omega_p (point mode) or "
                          "axis/start/stop/count (sweep mode)", "omega_over_omega_p")

    required = {"eps1", "eps2", "d_nm", "theta_deg", "omega_over_omega_p"}
    if axis:
        required.discard(AXIS_KEYS[axis])
    for key in sorted(required):
        if key not in raw:
            raise ConfigError(f"{key}: required", key)

    def get(key, parse=_number):
        return parse(raw, key) if key in raw else None

    count = None
    if axis:
        count = raw["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ConfigError(f"count: expected an integer >= 2, got {count!r}", "count")
    cfg = RunConfig(
        plasma=plasma, material=material,
        eps1=get("eps1"), eps2=get("eps2", _complex), d=get("d_nm"),
        theta_deg=get("theta_deg"), Omega=get("omega_over_omega_p"),
        axis=axis, start=get("start"), stop=get("stop"), count=count,
        control=control, kinematics=kinematics,
    )
    _check_fixed(cfg)
    try:
        if axis:
            cfg.sweep_spec()
        else:
            cfg.stack()
    except ConfigError:
        raise
    except FilmError as exc:
        raise ConfigError(str(exc), axis) from exc
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", "config") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})", "config") from exc
    return parse_config(raw)
