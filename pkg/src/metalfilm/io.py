"""CSV / JSON serialization of sweep results and the generated plot script."""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .sweep import SweepResult, SweepRow

CSV_HEADER = ("axis", "T", "R", "A", "ReZ1", "ImZ1", "ReZ2", "ImZ2", "n_odd", "n_even", "flag")


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    return f"{x:.17g}"


def _row_fields(r: SweepRow):
    return [fmt(r.axis_value), fmt(r.T), fmt(r.R), fmt(r.A), fmt(r.Z1.real), fmt(r.Z1.imag),
            fmt(r.Z2.real), fmt(r.Z2.imag), str(r.n_odd), str(r.n_even), r.flag]


def write_csv(result: SweepResult, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in result.rows:
        writer.writerow(_row_fields(r))


def save_csv(result: SweepResult, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(result, fh)


def read_csv(path):
    """Rows of a file written by :func:`save_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for f in reader:
            x, T, R, A, rz1, iz1, rz2, iz2 = map(float, f[:8])
            rows.append(SweepRow(x, T, R, A, complex(rz1, iz1), complex(rz2, iz2),
                                 int(f[8]), int(f[9]), f[10]))
    return rows


def metadata_path(csv_path):
    """Sidecar holding the resolved configuration: ``run.csv`` -> ``run.meta.json``."""
    return Path(csv_path).with_suffix(".meta.json")


def save_metadata(metadata: dict, path):
    Path(path).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


_PLOT_TEMPLATE = '''\
"""Plot T, R and A from {csv_name}.

Generated by metalfilm {version}.  Resolved configuration of the run:

{config}
"""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

CSV = Path(__file__).resolve().parent / {csv_rel!r}
AXIS_LABEL = {axis_label!r}

with open(CSV, newline="") as fh:
    rows = list(csv.DictReader(fh))
x = [float(r["axis"]) for r in rows]

fig, ax = plt.subplots(figsize=(7, 4.5))
for name, style in (("T", "-"), ("R", "--"), ("A", ":")):
    ax.plot(x, [float(r[name]) for r in rows], style, label=name)
ax.set_xlabel(AXIS_LABEL)
ax.set_ylim(-0.02, 1.02)
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(CSV.with_suffix(".png"), dpi=150)
plt.show()
'''

_AXIS_LABELS = {"Omega": "omega / omega_p", "theta": "theta (deg)", "d": "d (nm)",
                "eps1": "eps1", "eps2": "eps2"}


def plot_script(csv_path, script_path, metadata: dict) -> str:
    cfg = metadata["config"]
    csv_rel = os.path.relpath(Path(csv_path).resolve(), Path(script_path).resolve().parent)
    return _PLOT_TEMPLATE.format(
        csv_name=Path(csv_path).name,
        version=metadata.get("version", "?"),
        config=json.dumps(cfg, indent=2, sort_keys=True),
        csv_rel=csv_rel,
        axis_label=_AXIS_LABELS[cfg["axis"]],
    )


def save_plot_script(csv_path, script_path, metadata: dict):
    Path(script_path).write_text(plot_script(csv_path, script_path, metadata), encoding="utf-8")
