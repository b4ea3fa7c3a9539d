"""Command-line front end: ``metalfilm point | sweep | validate``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__
from .config import RunConfig, _control, load_config
from .errors import ConfigError, ConvergenceError, DomainError
from .impedance import SeriesControl
from .io import fmt, metadata_path, save_csv, save_metadata, save_plot_script
from .optics import CONSISTENT, KINEMATICS, evaluate_point, reflectance, transmittance
from .oracle import flux_coefficients, tra_unsimplified, transformed_discrepancy
from .sweep import COLUMNS, find_local_extrema, run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _cplx(z):
    return [z.real, z.imag]


def _need_mode(cfg: RunConfig, mode):
    if cfg.mode != mode:
        raise ConfigError(f"config describes a {cfg.mode} run, but the '{mode}' command was used",
                          "axis" if mode == "point" else "omega_over_omega_p")


def cmd_point(args):
    cfg = load_config(args.config)
    _need_mode(cfg, "point")
    stack = cfg.stack()
    res = evaluate_point(stack, cfg.Omega, cfg.plasma, cfg.control, cfg.kinematics)
    Z, p = res.impedance, res.amplitudes
    report = {
        "config": cfg.to_dict(),
        "version": __version__,
        "Z1": _cplx(Z.Z1), "Z2": _cplx(Z.Z2),
        "p1": _cplx(p.p1), "p2": _cplx(p.p2),
        "T": res.T, "R": res.R, "A": res.A,
        "flag": res.flag.value,
        "series": {"n_used_odd": Z.n_used_odd, "n_used_even": Z.n_used_even,
                   "tail_estimate": Z.tail_estimate},
    }
    if args.compare:
        report["compare"] = _comparison(cfg, stack, res)
    if args.json:
        print(json.dumps(report, indent=2))
        return EXIT_OK
    e2 = complex(stack.eps2)
    print(f"Omega    = {cfg.Omega:.10g}")
    print(f"theta    = {stack.theta_deg:.10g} deg")
    print(f"d        = {stack.d:.10g} nm")
    print(f"eps1     = {stack.eps1:.10g}")
    print(f"eps2     = {e2.real:.10g}" + (f" {e2.imag:+.10g}j" if e2.imag else ""))
    print(f"Z1       = {Z.Z1:.12g}")
    print(f"Z2       = {Z.Z2:.12g}")
    print(f"p1       = {p.p1:.12g}")
    print(f"p2       = {p.p2:.12g}")
    print(f"T        = {res.T:.12g}")
    print(f"R        = {res.R:.12g}")
    print(f"A        = {res.A:.12g}")
    print(f"flag     = {res.flag.value}")
    print(f"series   : n_odd={Z.n_used_odd} n_even={Z.n_used_even} "
          f"tail_estimate={Z.tail_estimate:.3e}")
    if args.compare:
        for key, val in report["compare"].items():
            print(f"compare  : {key} = {val}")
    return EXIT_OK


def _comparison(cfg, stack, res):
    p, kin = res.amplitudes, cfg.kinematics
    out = {"T_R_simplified": [transmittance(p, stack, kin), reflectance(p, stack, kin)]}
    if complex(stack.eps2).imag == 0:
        out["T_R_unsimplified"] = list(tra_unsimplified(p, stack, kin))
        out["T_R_energy_flux"] = list(flux_coefficients(p, stack, kin))
    if stack.eps1 == 1 and stack.eps2 == 1:
        out["T_R_free_standing"] = [abs(p.p1 - p.p2) ** 2 / 4, abs(p.p1 + p.p2) ** 2 / 4]
    z1, z2 = transformed_discrepancy(stack, cfg.Omega, cfg.plasma, cfg.control)
    out["transformed_Z_rel_discrepancy"] = [z1.rel_error, z2.rel_error]
    return out


def _summary(result):
    x = result.axis_values
    out = {}
    for col in COLUMNS:
        y = result.column(col)
        if all(y != y):  # every point failed
            out[col] = None
            continue
        imin, imax = int(_nanarg(y, min)), int(_nanarg(y, max))
        ext = find_local_extrema(result, col) if len(result) >= 3 else []
        out[col] = {
            "min": [x[imin], y[imin]], "max": [x[imax], y[imax]],
            "local_max": [[e.axis_value, e.value] for e in ext if e.kind == "max"],
            "local_min": [[e.axis_value, e.value] for e in ext if e.kind == "min"],
        }
    return out


def _nanarg(y, pick):
    idx = [i for i in range(len(y)) if y[i] == y[i]]
    return pick(idx, key=lambda i: y[i])


def cmd_sweep(args):
    cfg = load_config(args.config)
    _need_mode(cfg, "sweep")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1", "threads")
    spec = cfg.sweep_spec()
    result = run_sweep(spec, threads=args.threads)
    metadata = dict(result.metadata, config=cfg.to_dict(),
                    plasma={"omega_p": cfg.plasma.omega_p, "v_F": cfg.plasma.v_F,
                            "nu": cfg.plasma.nu})
    save_csv(result, args.out)
    meta_file = metadata_path(args.out)
    save_metadata(metadata, meta_file)
    if args.plot_script:
        save_plot_script(args.out, args.plot_script, metadata)
    summary = _summary(result)
    failed = metadata["failed_points"]
    if args.json:
        print(json.dumps({"csv": str(args.out), "metadata": str(meta_file),
                          "plot_script": args.plot_script, "rows": len(result),
                          "failed_points": failed, "extrema": summary}, indent=2))
    else:
        print(f"wrote {len(result)} rows to {args.out} (config echo in {meta_file})")
        if args.plot_script:
            print(f"plot script: {args.plot_script}")
        for col in COLUMNS:
            s = summary[col]
            if s is None:
                print(f"{col}: no valid points")
                continue
            print(f"{col}: min {fmt(s['min'][1])} at {spec.axis}={s['min'][0]:.10g}; "
                  f"max {fmt(s['max'][1])} at {spec.axis}={s['max'][0]:.10g}; "
                  f"{len(s['local_max'])} local maxima, {len(s['local_min'])} local minima")
    if failed:
        print(f"warning: {failed} grid points failed; see the flag column", file=sys.stderr)
    return EXIT_OK


def _validation_control(path):
    """Only ``series`` and ``kinematics`` are meaningful for the self-check."""
    if path is None:
        return SeriesControl(), CONSISTENT
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})", "config") from exc
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object", None)
    unknown = set(raw) - {"series", "kinematics"}
    if unknown:
        raise ConfigError(f"validate accepts only series and kinematics; got {sorted(unknown)}",
                          sorted(unknown)[0])
    kin = raw.get("kinematics", CONSISTENT)
    if kin not in KINEMATICS:
        raise ConfigError(f"kinematics: expected one of {KINEMATICS}", "kinematics")
    return _control(raw), kin


def cmd_validate(args):
    from .validate import run_validation

    ctrl, kin = _validation_control(args.config)
    results = run_validation(ctrl, kin)
    failures = [r for r in results if not r.passed]
    if args.json:
        print(json.dumps({"control": asdict(ctrl), "kinematics": kin,
                          "checks": [asdict(r) for r in results],
                          "passed": not failures}, indent=2))
    else:
        for r in results:
            print(r.line())
        print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if failures:
        print("failed checks: " + ", ".join(r.name for r in failures), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="metalfilm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    point = sub.add_parser("point", help="T, R, A at one parameter point")
    point.add_argument("--config", required=True, help="JSON configuration (point mode)")
    point.add_argument("--json", action="store_true", help="machine-readable output")
    point.add_argument("--compare", action="store_true",
                       help="also print the equivalent closed forms and oracle cross-checks")
    point.set_defaults(func=cmd_point)

    sweep = sub.add_parser("sweep", help="one-dimensional sweep written as CSV")
    sweep.add_argument("--config", required=True, help="JSON configuration (sweep mode)")
    sweep.add_argument("--out", required=True, help="CSV output file")
    sweep.add_argument("--plot-script", metavar="FILE", help="write a matplotlib script here")
    sweep.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    sweep.add_argument("--json", action="store_true", help="print the summary as JSON")
    sweep.set_defaults(func=cmd_sweep)

    val = sub.add_parser("validate", help="run the built-in oracle and invariant checks")
    val.add_argument("--config", help="JSON with optional 'series' and 'kinematics' overrides")
    val.add_argument("--json", action="store_true", help="machine-readable output")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ConvergenceError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
