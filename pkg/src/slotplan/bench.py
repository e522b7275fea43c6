"""Strategy sweeps over generated instances.

One cell = (activity-selection strategy, fill percent, seed).  Each cell
generates its instance, solves to completion or the iteration cap, and
records iterations used, wall time around the solve loop only, and the
scheduled percentage of the best snapshot.  Aggregates are per (strategy,
fill): mean and population standard deviation over the cell's seeds.

Cells are independent; with ``workers > 1`` they run on a process pool and
the rows are merged back into configuration order by their (strategy, fill,
seed) key, so the table is identical however it was computed.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

from .generator import GenParams, generate
from .model import ModelError
from .serialize import (
    FormatError,
    VERSION,
    _decode,
    _enum,
    _header,
    _int,
    _num,
    _obj,
    canonical_bytes,
    genparams_from_doc,
    genparams_to_doc,
    weights_from_doc,
    weights_to_doc,
)
from .solver import HeuristicWeights, SolverState, Strategy, solve

BENCH_FORMAT = "slotplan-bench"


@dataclass(frozen=True)
class BenchConfig:
    strategies: tuple[Strategy, ...] = (Strategy.RANDOM, Strategy.SAMPLED, Strategy.FULL)
    fills: tuple[float, ...] = (30.0, 50.0, 70.0)
    seeds: int = 5
    seed0: int = 0
    max_iterations: int = 20_000
    weights: HeuristicWeights = field(default_factory=HeuristicWeights)
    generator: GenParams = field(default_factory=GenParams)
    workers: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.strategies, list):
            object.__setattr__(self, "strategies", tuple(self.strategies))
        if isinstance(self.fills, list):
            object.__setattr__(self, "fills", tuple(self.fills))
        if not self.strategies:
            raise ModelError("need at least one strategy")
        if not self.fills:
            raise ModelError("need at least one fill level")
        for f in self.fills:
            if not 0 < f <= 100:
                raise ModelError(f"fill levels must be in (0, 100], got {f!r}")
        if self.seeds < 1:
            raise ModelError(f"seeds per cell must be >= 1, got {self.seeds!r}")
        if self.max_iterations < 0:
            raise ModelError(f"max_iterations must be >= 0, got {self.max_iterations!r}")
        if self.workers < 1:
            raise ModelError(f"workers must be >= 1, got {self.workers!r}")


@dataclass(frozen=True)
class RunRow:
    strategy: Strategy
    fill: float
    seed: int
    n_activities: int
    scheduled: int
    scheduled_pct: float
    iterations: int
    wall_s: float
    cap_hit: bool


@dataclass(frozen=True)
class CellAggregate:
    strategy: Strategy
    fill: float
    runs: int
    scheduled_pct_mean: float
    scheduled_pct_std: float
    iterations_mean: float
    iterations_std: float
    wall_s_mean: float
    wall_s_std: float
    cap_hits: int


@dataclass(frozen=True)
class BenchResult:
    config: BenchConfig
    runs: tuple[RunRow, ...]
    aggregates: tuple[CellAggregate, ...]

    def write_csv(self, out: IO[str]) -> None:
        write_table(out, self.runs, self.aggregates)

    def render_chart(self, path: str) -> None:
        render_chart(self, path)


def run_cell(config: BenchConfig, strategy: Strategy, fill: float, seed: int) -> RunRow:
    params = replace(config.generator, fill_percent=float(fill), seed=seed)
    problem, _ = generate(params)
    weights = replace(config.weights, strategy=strategy, max_iterations=config.max_iterations)
    state = SolverState(problem, weights=weights)
    t0 = time.perf_counter()
    solve(state)
    wall = time.perf_counter() - t0
    n = len(problem.activities)
    best = state.best
    return RunRow(
        strategy=strategy,
        fill=float(fill),
        seed=seed,
        n_activities=n,
        scheduled=best.scheduled_count,
        scheduled_pct=100.0 * best.scheduled_count / n,
        iterations=state.iteration,
        wall_s=wall,
        cap_hit=bool(state.unscheduled),
    )


def _cells(config: BenchConfig) -> list[tuple[Strategy, float, int]]:
    return [
        (strategy, fill, config.seed0 + k)
        for strategy in config.strategies
        for fill in config.fills
        for k in range(config.seeds)
    ]


def _run_cell_job(args: tuple[BenchConfig, Strategy, float, int]) -> RunRow:
    return run_cell(*args)


def run_experiment(config: BenchConfig) -> BenchResult:
    cells = _cells(config)
    if config.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_cell_job, [(config, *c) for c in cells]))
    else:
        rows = [run_cell(config, *c) for c in cells]
    by_key = {(r.strategy, r.fill, r.seed): r for r in rows}
    runs = tuple(by_key[c] for c in cells)

    aggregates = []
    for strategy in config.strategies:
        for fill in config.fills:
            cell = [r for r in runs if r.strategy is strategy and r.fill == fill]
            aggregates.append(
                CellAggregate(
                    strategy=strategy,
                    fill=fill,
                    runs=len(cell),
                    scheduled_pct_mean=statistics.fmean(r.scheduled_pct for r in cell),
                    scheduled_pct_std=statistics.pstdev(r.scheduled_pct for r in cell),
                    iterations_mean=statistics.fmean(r.iterations for r in cell),
                    iterations_std=statistics.pstdev(r.iterations for r in cell),
                    wall_s_mean=statistics.fmean(r.wall_s for r in cell),
                    wall_s_std=statistics.pstdev(r.wall_s for r in cell),
                    cap_hits=sum(r.cap_hit for r in cell),
                )
            )
    return BenchResult(config=config, runs=runs, aggregates=tuple(aggregates))


# ---------------------------------------------------------------------------
# table output

_COLUMNS = (
    "row_type", "strategy", "fill", "seed",
    "n_activities", "scheduled", "scheduled_pct", "iterations", "wall_s", "cap_hit",
    "runs", "scheduled_pct_mean", "scheduled_pct_std",
    "iterations_mean", "iterations_std", "wall_s_mean", "wall_s_std", "cap_hits",
)


def write_table(out: IO[str], runs: Iterable[RunRow], aggregates: Iterable[CellAggregate]) -> None:
    w = csv.DictWriter(out, fieldnames=_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in runs:
        w.writerow({
            "row_type": "run",
            "strategy": r.strategy.value,
            "fill": repr(r.fill),
            "seed": r.seed,
            "n_activities": r.n_activities,
            "scheduled": r.scheduled,
            "scheduled_pct": repr(r.scheduled_pct),
            "iterations": r.iterations,
            "wall_s": f"{r.wall_s:.6f}",
            "cap_hit": int(r.cap_hit),
        })
    for a in aggregates:
        w.writerow({
            "row_type": "aggregate",
            "strategy": a.strategy.value,
            "fill": repr(a.fill),
            "runs": a.runs,
            "scheduled_pct_mean": repr(a.scheduled_pct_mean),
            "scheduled_pct_std": repr(a.scheduled_pct_std),
            "iterations_mean": repr(a.iterations_mean),
            "iterations_std": repr(a.iterations_std),
            "wall_s_mean": f"{a.wall_s_mean:.6f}",
            "wall_s_std": f"{a.wall_s_std:.6f}",
            "cap_hits": a.cap_hits,
        })


_MARKERS = {Strategy.RANDOM: "x", Strategy.SAMPLED: "D", Strategy.FULL: "o"}


def render_chart(result: BenchResult, path: str) -> None:
    """Two panels over fill: mean iterations and mean scheduled %."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_it, ax_pct) = plt.subplots(1, 2, figsize=(11, 4.2))
    for strategy in result.config.strategies:
        cells = [a for a in result.aggregates if a.strategy is strategy]
        fills = [a.fill for a in cells]
        marker = _MARKERS.get(strategy, "s")
        ax_it.plot(fills, [a.iterations_mean for a in cells], marker=marker, label=strategy.value)
        ax_pct.plot(fills, [a.scheduled_pct_mean for a in cells], marker=marker, label=strategy.value)
    ax_it.set_xlabel("fill (% of class-slot capacity)")
    ax_it.set_ylabel("iterations (mean)")
    ax_pct.set_xlabel("fill (% of class-slot capacity)")
    ax_pct.set_ylabel("scheduled activities (mean %)")
    ax_pct.set_ylim(0, 105)
    for ax in (ax_it, ax_pct):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# config documents

def bench_config_to_doc(config: BenchConfig) -> dict:
    return {
        "format": BENCH_FORMAT,
        "version": VERSION,
        "strategies": [s.value for s in config.strategies],
        "fills": [float(f) for f in config.fills],
        "seeds": config.seeds,
        "seed0": config.seed0,
        "max_iterations": config.max_iterations,
        "workers": config.workers,
        "weights": weights_to_doc(config.weights),
        "generator": genparams_to_doc(config.generator),
    }


def bench_config_from_doc(doc) -> BenchConfig:
    doc = _header(doc, BENCH_FORMAT)
    _obj(doc, "$", {
        "format": True, "version": True, "strategies": False, "fills": False,
        "seeds": False, "seed0": False, "max_iterations": False,
        "workers": False, "weights": False, "generator": False,
    })
    kwargs: dict = {}
    if "strategies" in doc:
        raw = doc["strategies"]
        if not isinstance(raw, list):
            raise FormatError("$.strategies", f"expected an array, got {type(raw).__name__}")
        kwargs["strategies"] = tuple(
            _enum(v, f"$.strategies[{i}]", Strategy) for i, v in enumerate(raw)
        )
    if "fills" in doc:
        raw = doc["fills"]
        if not isinstance(raw, list):
            raise FormatError("$.fills", f"expected an array, got {type(raw).__name__}")
        kwargs["fills"] = tuple(_num(v, f"$.fills[{i}]") for i, v in enumerate(raw))
    for name in ("seeds", "seed0", "max_iterations", "workers"):
        if name in doc:
            kwargs[name] = _int(doc[name], f"$.{name}")
    if "weights" in doc:
        kwargs["weights"] = weights_from_doc(doc["weights"])
    if "generator" in doc:
        kwargs["generator"] = genparams_from_doc(doc["generator"])
    try:
        return BenchConfig(**kwargs)
    except ModelError as e:
        raise FormatError("$", str(e)) from None


def save_bench_config(config: BenchConfig) -> bytes:
    return canonical_bytes(bench_config_to_doc(config))


def load_bench_config(data: bytes | str) -> BenchConfig:
    return bench_config_from_doc(_decode(data))
