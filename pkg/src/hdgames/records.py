"""Per-trial observable records and the trial-granular worker pool."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

#: Seed-stream tags; per-trial generators derive from
#: (root_seed, stream, trial) so results never depend on execution order.
STREAM_DYNAMIC = 0
STREAM_STATIC = 1
STREAM_VALUES = 2


@dataclass(frozen=True)
class TrialRecord:
    """One trial's per-step observables; step count equals the horizon."""

    model: str  # "dynamic" or "static"
    trial: int
    count_ones: tuple[int, ...]
    at_all_ones: tuple[int, ...]
    infected: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.model not in ("dynamic", "static"):
            raise ValueError(f"unknown model tag {self.model!r}")
        if len(self.at_all_ones) != len(self.count_ones):
            raise ValueError("observable lengths disagree")
        if self.infected is not None and len(self.infected) != len(self.count_ones):
            raise ValueError("observable lengths disagree")


def run_trials(worker: Callable, tasks: Sequence, parallelism: int = 1) -> list:
    """Run ``worker`` over ``tasks``, optionally across processes.

    Results come back in task order regardless of the worker pool, so output
    bytes do not depend on the parallelism degree.
    """
    if parallelism <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(worker, tasks))
