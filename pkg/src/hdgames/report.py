"""Output artifacts: the delimited ground-truth table, the summary document,
and a rendered figure.

The CSV is the artifact of record and is byte-stable for a fixed (config,
seed); the SVG is a convenience rendering.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional, Sequence

from ._version import __version__
from .config import ExperimentConfig
from .records import TrialRecord

CSV_HEADER = "model,trial,t,count_ones,at_all_ones,infected_fraction"


def _format_float(x: float) -> str:
    return repr(float(x))


def write_csv(records: Sequence[TrialRecord], path: Path) -> None:
    lines = [CSV_HEADER]
    for record in records:
        infected = record.infected
        for idx in range(len(record.count_ones)):
            tail = _format_float(infected[idx]) if infected is not None else ""
            lines.append(
                f"{record.model},{record.trial},{idx + 1},"
                f"{record.count_ones[idx]},{record.at_all_ones[idx]},{tail}"
            )
    path.write_text("\n".join(lines) + "\n")


def _mean_and_stderr(columns: list[list[float]]) -> tuple[list[float], list[float]]:
    means, stderrs = [], []
    for column in columns:
        k = len(column)
        mean = sum(column) / k
        if k > 1:
            var = sum((x - mean) ** 2 for x in column) / (k - 1)
            stderrs.append(math.sqrt(var / k))
        else:
            stderrs.append(0.0)
        means.append(mean)
    return means, stderrs


def summarize(
    config: ExperimentConfig,
    records: Sequence[TrialRecord],
    burn_in: int = 50,
) -> dict:
    """Per-model trajectory statistics plus the dominance verdict.

    The dominance check requires the dynamic mean count to stay within two
    pooled standard errors of weakly exceeding the static mean at every step
    from ``from_step`` on; for the epidemic family ``from_step`` is the
    largest per-trial entry time into the invariant infection band, otherwise
    the fixed burn-in.
    """
    horizon = config.horizon
    by_model: dict[str, dict] = {}
    stats: dict[str, tuple[list[float], list[float]]] = {}
    for model in ("dynamic", "static"):
        rows = [r for r in records if r.model == model]
        columns = [[float(r.count_ones[t]) for r in rows] for t in range(horizon)]
        means, stderrs = _mean_and_stderr(columns)
        terminal_top = sum(r.at_all_ones[-1] for r in rows) / len(rows)
        by_model[model] = {
            "trials": len(rows),
            "mean_count": means,
            "stderr_count": stderrs,
            "terminal_all_ones": terminal_top,
        }
        stats[model] = (means, stderrs)

    summary: dict = {
        "config": config.resolved(),
        "version": __version__,
        "models": by_model,
    }

    from_step = burn_in
    if config.family == "sisgcg":
        floor = config.sis.infected_floor
        dynamic_rows = [r for r in records if r.model == "dynamic"]
        entries = []
        for r in dynamic_rows:
            entry = next(
                (t + 1 for t, i in enumerate(r.infected) if i >= floor - 1e-9), None
            )
            entries.append(entry)
        entered = [e for e in entries if e is not None]
        t_bar = max(entered) if len(entered) == len(entries) and entered else None
        infected_columns = [
            [r.infected[t] for r in dynamic_rows] for t in range(horizon)
        ]
        mean_infected = [sum(col) / len(col) for col in infected_columns]
        band_ok = None
        min_after = None
        if t_bar is not None:
            tail = mean_infected[t_bar - 1:]
            min_after = min(tail)
            band_ok = min_after >= floor - 1e-3
        summary["infection"] = {
            "floor": floor,
            "entry_step_per_trial": entries,
            "entry_step_max": t_bar,
            "mean_infected": mean_infected,
            "min_mean_infected_after_entry": min_after,
            "band_holds_after_entry": band_ok,
        }
        if t_bar is not None:
            from_step = t_bar

    dyn_means, dyn_errs = stats["dynamic"]
    stat_means, stat_errs = stats["static"]
    min_margin = math.inf
    holds = True
    if from_step <= horizon:
        for t in range(from_step - 1, horizon):
            pooled = math.sqrt(dyn_errs[t] ** 2 + stat_errs[t] ** 2)
            margin = dyn_means[t] - (stat_means[t] - 2.0 * pooled)
            if margin < min_margin:
                min_margin = margin
            if margin < 0:
                holds = False
    terminal_holds = (
        by_model["dynamic"]["terminal_all_ones"]
        >= by_model["static"]["terminal_all_ones"]
    )
    summary["dominance"] = {
        "from_step": from_step,
        "holds": holds,
        "min_margin": None if min_margin is math.inf else min_margin,
        "terminal_all_ones_holds": terminal_holds,
    }
    return summary


def write_summary(summary: dict, path: Path) -> None:
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def render_figure(
    records: Sequence[TrialRecord],
    config: ExperimentConfig,
    path: Path,
    title: Optional[str] = None,
) -> None:
    """Faint per-trial count traces with bold means (dynamic vs static); the
    epidemic family adds the mean infected fraction on a twin axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "hdgames"

    horizon = config.horizon
    steps = range(1, horizon + 1)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    colors = {"dynamic": "tab:red", "static": "tab:blue"}
    for model in ("dynamic", "static"):
        rows = [r for r in records if r.model == model]
        for r in rows:
            ax.plot(steps, r.count_ones, color=colors[model], alpha=0.12, linewidth=0.6)
        means = [
            sum(r.count_ones[t] for r in rows) / len(rows) for t in range(horizon)
        ]
        ax.plot(steps, means, color=colors[model], linewidth=2.0,
                label=f"{model} (mean)")
    ax.set_xlabel("time step")
    ax.set_ylabel("agents playing 1")
    ax.set_title(title or config.experiment)
    if config.family == "sisgcg":
        dynamic_rows = [r for r in records if r.model == "dynamic"]
        mean_infected = [
            sum(r.infected[t] for r in dynamic_rows) / len(dynamic_rows)
            for t in range(horizon)
        ]
        twin = ax.twinx()
        twin.plot(steps, mean_infected, color="black", linestyle=":",
                  linewidth=1.5, label="mean infected fraction")
        twin.set_ylabel("infected fraction")
        twin.set_ylim(0.0, 1.0)
        lines, labels = ax.get_legend_handles_labels()
        tlines, tlabels = twin.get_legend_handles_labels()
        ax.legend(lines + tlines, labels + tlabels, loc="lower right", fontsize=8)
    else:
        ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
