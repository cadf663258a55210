"""Plot-data bundles consumed by the CLI renderer and the dashboard, plus a
deterministic static PNG rendering of the global bar chart.

All bundles are plain dicts ready for canonical JSON; charts are pure
functions of these payloads so renderers never recompute attributions.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .explain import GlobalExplanation, ShapExplanation


def force_plot_data(explanation: ShapExplanation) -> dict:
    """Segments from base value to predicted value, positive pushes first."""
    entries = sorted(explanation.attributions, key=lambda kv: (-kv[1], kv[0]))
    segments = []
    cursor = explanation.base_value
    for name, value in entries:
        segments.append(
            {
                "name": name,
                "value": value,
                "start": cursor,
                "end": cursor + value,
                "feature_value": explanation.feature_values.get(name),
            }
        )
        cursor += value
    return {
        "type": "force",
        "target": explanation.target,
        "base_value": explanation.base_value,
        "predicted_value": explanation.predicted_value,
        "segments": segments,
    }


def decision_plot_data(explanation: ShapExplanation) -> dict:
    """Cumulative path from base to predicted, least-impactful feature first."""
    entries = sorted(explanation.attributions, key=lambda kv: (abs(kv[1]), kv[0]))
    cumulative = explanation.base_value
    points = []
    for name, value in entries:
        cumulative += value
        points.append({"name": name, "value": value, "cumulative": cumulative})
    return {
        "type": "decision",
        "target": explanation.target,
        "base_value": explanation.base_value,
        "predicted_value": explanation.predicted_value,
        "points": points,
    }


def local_beeswarm_plot_data(explanation: ShapExplanation) -> dict:
    return {
        "type": "beeswarm",
        "target": explanation.target,
        "points": [
            {
                "name": name,
                "value": value,
                "feature_value": explanation.feature_values.get(name),
            }
            for name, value in explanation.attributions
        ],
    }


def bar_plot_data(global_exp: GlobalExplanation, targets: Sequence[str] | None = None,
                  exclude_sources: Sequence[str] = (), top: int | None = None) -> dict:
    targets = tuple(targets) if targets is not None else global_exp.targets
    series = []
    ranked_names: list[str] = []
    for target in targets:
        ranked = global_exp.ranked(target, exclude_sources)
        if top is not None:
            ranked = ranked[:top]
        series.append({"target": target, "bars": [{"name": n, "mean_abs": v} for n, v in ranked]})
        for n, _ in ranked:
            if n not in ranked_names:
                ranked_names.append(n)
    return {"type": "bar", "targets": list(targets), "series": series, "names": ranked_names}


def beeswarm_plot_data(global_exp: GlobalExplanation, target: str,
                       exclude_sources: Sequence[str] = (), top: int | None = None) -> dict:
    ranked = global_exp.ranked(target, exclude_sources)
    if top is not None:
        ranked = ranked[:top]
    idx = {name: i for i, name in enumerate(global_exp.unit_names)}
    mat = global_exp.matrices[target]
    rows = []
    for name, mean_abs in ranked:
        j = idx[name]
        rows.append(
            {
                "name": name,
                "mean_abs": mean_abs,
                "points": [
                    {
                        "value": float(mat[i, j]),
                        "feature_value": float(global_exp.instance_values[i, j]),
                    }
                    for i in range(global_exp.instance_count)
                ],
            }
        )
    return {"type": "beeswarm", "target": target, "rows": rows}


def local_bar_plot_data(explanation: ShapExplanation) -> dict:
    """Signed attribution bars for one instance, largest |value| first."""
    return {
        "type": "bar",
        "target": explanation.target,
        "base_value": explanation.base_value,
        "predicted_value": explanation.predicted_value,
        "bars": [
            {
                "name": name,
                "value": value,
                "feature_value": explanation.feature_values.get(name),
            }
            for name, value in explanation.attributions
        ],
    }


def explanation_bundle(explanation: ShapExplanation) -> dict:
    return {
        "force": force_plot_data(explanation),
        "decision": decision_plot_data(explanation),
        "beeswarm": local_beeswarm_plot_data(explanation),
        "bar": local_bar_plot_data(explanation),
    }


_BAR_COLORS = ("#4c78a8", "#e45756", "#72b7b2", "#f58518", "#54a24b")


def render_signed_bar_png(bar_data: dict, path: str, top: int = 20) -> None:
    """Local attribution chart: positive bars red, negative blue."""
    bars = bar_data["bars"][:top]
    names = [b["name"] for b in bars]
    values = [b["value"] for b in bars]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.35 * len(bars) + 1.2)))
    colors = ["#e45756" if v >= 0 else "#4c78a8" for v in values]
    ax.barh(range(len(bars)), values, color=colors)
    ax.set_yticks(range(len(bars)))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("attribution")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def render_bar_png(bar_data: dict, path: str) -> None:
    """Static grouped horizontal bar chart; byte-deterministic output."""
    names = bar_data["names"]
    series = bar_data["series"]
    height = max(2.0, 0.4 * len(names) * max(1, len(series)) + 1.2)
    fig, ax = plt.subplots(figsize=(8, height))
    band = 0.8 / max(1, len(series))
    for s_idx, s in enumerate(series):
        values = {b["name"]: b["mean_abs"] for b in s["bars"]}
        ys = [i + s_idx * band for i in range(len(names))]
        ax.barh(
            ys,
            [values.get(n, 0.0) for n in names],
            height=band * 0.95,
            color=_BAR_COLORS[s_idx % len(_BAR_COLORS)],
            label=s["target"],
        )
    ax.set_yticks([i + 0.4 - band / 2 for i in range(len(names))])
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("mean |attribution|")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
