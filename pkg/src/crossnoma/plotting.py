"""Rendering of sweep tables to figure files next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .montecarlo import PROV_MC

_SOURCE_STYLE = {
    "analytic-exact": {"linestyle": "-"},
    "analytic-paper": {"linestyle": "--"},
    PROV_MC: {"linestyle": "none", "marker": "o", "markersize": 4.0},
}

_LOG_VARIABLES = {"lambda_common"}


def render_sweep_plot(rows: list[dict], path: str | Path) -> Path:
    """One panel of outage curves: lines for closed forms, marks for the
    simulation, grouped by scheme/scenario/destination."""
    path = Path(path)
    if not rows:
        raise ValueError("nothing to plot: empty row set")
    variable = rows[0]["variable"]

    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["scheme"], row["scenario"], row["destination"], row["source"])
        groups.setdefault(key, []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    color_of: dict[tuple, str] = {}
    for key in sorted(groups):
        curve = key[:3]
        if curve not in color_of:
            color_of[curve] = colors[len(color_of) % len(colors)]

    for key in sorted(groups):
        scheme, scenario, destination, source = key
        pts = sorted(groups[key], key=lambda row: row["value"])
        x = [row["value"] for row in pts]
        y = [row["probability"] for row in pts]
        style = dict(_SOURCE_STYLE.get(source, {}))
        style["color"] = color_of[key[:3]]
        label = f"{scheme} {destination}"
        if scenario != "mixed":
            label += f" [{scenario}]"
        label += f" ({source})"
        if source == PROV_MC:
            err = [3.0 * row["std_err"] for row in pts]
            ax.errorbar(x, y, yerr=err, label=label, capsize=2.0, **style)
        else:
            ax.plot(x, y, label=label, **style)

    if variable in _LOG_VARIABLES:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(variable.replace("_", " "))
    ax.set_ylabel("outage probability")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
