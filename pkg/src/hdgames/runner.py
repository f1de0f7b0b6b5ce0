"""Experiment orchestration: seeded parallel trials plus artifact emission."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

from .config import ExperimentConfig
from .cti import figure_one_experiment
from .errors import ConfigError
from .records import TrialRecord
from .report import render_figure, summarize, write_csv, write_summary
from .sisgcg import figure_two_experiment


def run_experiment_records(config: ExperimentConfig) -> list[TrialRecord]:
    """Execute both model variants for the configured experiment."""
    if config.family == "cti":
        return figure_one_experiment(
            cfg=config.cti,
            tau=config.tau,
            trials=config.trials,
            horizon=config.horizon,
            seed=config.seed,
            parallelism=config.parallelism,
        )
    return figure_two_experiment(
        cfg=config.sis,
        tau=config.tau,
        trials=config.trials,
        horizon=config.horizon,
        seed=config.seed,
        parallelism=config.parallelism,
    )


def run_experiment(
    config: ExperimentConfig,
    out_dir: Optional[str] = None,
    records: Optional[Sequence[TrialRecord]] = None,
) -> dict:
    """Run the experiment and write results.csv, summary.json, figure.svg.

    Returns the summary mapping (also written to disk)."""
    target = out_dir or config.out
    if target is None:
        raise ConfigError("no output directory given (config key 'out' or --out)")
    directory = Path(target)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc

    if records is None:
        records = run_experiment_records(config)
    summary = summarize(config, records)
    write_csv(records, directory / "results.csv")
    write_summary(summary, directory / "summary.json")
    render_figure(records, config, directory / "figure.svg")
    return summary
