"""SVG line charts over experiment CSV output.

One chart per figure preset: mean optimized rate against the swept power
variable, one series per antenna count or variance setting, plus the mean
relaxation bound as a dashed companion series where the preset calls for
it. Text stays text in the SVG so series labels remain searchable.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["emit_plot"]

_Y_LABEL = "min achievable secrecy rate (bits/channel use)"
_X_LABELS = {
    "fig3": "total power (dBW)",
    "fig4": "total power (dBW)",
    "fig5": "total power (dBW)",
    "fig6": "source 1 power (dBW)",
}
_REQUIRED = ("variant", "n_antennas", "sweep_dbw", "achieved_q", "sdr_bound")

plt.rcParams["svg.fonttype"] = "none"


def _read_rows(csv_path: str) -> list[dict]:
    with open(csv_path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in _REQUIRED if name not in header]
        if missing:
            raise ValueError(f"CSV {csv_path} lacks required columns {missing}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"CSV {csv_path} has no data rows")
    return rows


def _series(rows: list[dict], key_fields: tuple[str, ...], value_field: str):
    """Mean of value_field per (key, sweep) cell, sorted by sweep."""
    cells: dict[tuple, dict[float, list[float]]] = {}
    for row in rows:
        key = tuple(row[field] for field in key_fields)
        sweep = float(row["sweep_dbw"])
        cells.setdefault(key, {}).setdefault(sweep, []).append(
            float(row[value_field])
        )
    out = {}
    for key, per_sweep in cells.items():
        xs = sorted(per_sweep)
        ys = [sum(per_sweep[x]) / len(per_sweep[x]) for x in xs]
        out[key] = (xs, ys)
    return out


def emit_plot(csv_path: str, kind: str, out_path: str | None = None) -> str:
    """Render one preset chart from a run_experiment CSV; returns the path."""
    if kind not in _X_LABELS:
        raise ValueError(f"unknown plot kind {kind!r}")
    rows = _read_rows(csv_path)
    if out_path is None:
        out_path = str(Path(csv_path).with_suffix(".svg"))

    group_field = "variant" if kind == "fig5" else "n_antennas"
    achieved = _series(rows, (group_field,), "achieved_q")

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        for (key,), (xs, ys) in sorted(achieved.items()):
            label = key if kind == "fig5" else f"N={key}"
            if kind == "fig4":
                label = f"{label} achieved"
            ax.plot(xs, ys, marker="o", label=label)
        if kind == "fig4":
            bound = _series(rows, (group_field,), "sdr_bound")
            for (key,), (xs, ys) in sorted(bound.items()):
                ax.plot(xs, ys, linestyle="--", marker="s", label=f"N={key} bound")
        ax.set_xlabel(_X_LABELS[kind])
        ax.set_ylabel(_Y_LABEL)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return out_path
