"""Experiment protocol: seeded runs, per-characteristic sweeps and metrics.

Seeds are derived, never drawn: every landscape and every run seed is a
pure function of the master seed and the cell coordinates (see
:func:`derive_seed`), so any cell can be replayed in isolation.
"""

from __future__ import annotations

import csv
import io
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptyCell, MsgBenchError, ZeroBudget
from .landscape import DEFAULT_SPEC, Landscape, LandscapeSpec, generate_landscape
from .optimizers import (
    ALGORITHM_ORDER,
    DEFAULT_BUDGET,
    AlgorithmConfig,
    BudgetedObjective,
    Domain,
    RunRecord,
    get_algorithm,
)
from .optimizers.base import LOCKSTEP, LockstepObjective, run_lockstep

DEFAULT_TOLERANCE = 1e-4
DEFAULT_RUNS = 100

# characteristic -> (spec field, min, step, max), in canonical axis order
CHARACTERISTICS = {
    "local_optima": ("num_local_optima", 0, 1, 9),
    "ratio": ("ratio", 0.1, 0.2, 0.9),
    "dimensions": ("dimensions", 1, 1, 10),
    "boundary": ("boundary", 10.0, 10.0, 100.0),
    "smoothness": ("smoothness", 10.0, 10.0, 100.0),
}
CHARACTERISTIC_ORDER = tuple(CHARACTERISTICS)
ALL = "all"

RECORD_COLUMNS = ("characteristic", "value", "landscape_id", "algorithm", "seed",
                  "best_fitness", "evals_used", "success")


def characteristic_values(characteristic: str) -> list:
    """Min..max by step for one characteristic, as exact decimals."""
    spec_field, lo, step, hi = CHARACTERISTICS[characteristic]
    count = int(round((hi - lo) / step)) + 1
    if isinstance(lo, int):
        return [lo + k * step for k in range(count)]
    return [round(lo + k * step, 10) for k in range(count)]


def spec_for(characteristic: str, value, defaults: LandscapeSpec = DEFAULT_SPEC,
             seed: int | None = None) -> LandscapeSpec:
    spec_field = CHARACTERISTICS[characteristic][0]
    if spec_field in ("num_local_optima", "dimensions"):
        value = int(value)
    else:
        value = float(value)
    changes = {spec_field: value}
    if seed is not None:
        changes["seed"] = seed
    return defaults.replace(**changes)


# -- seeds -------------------------------------------------------------------

_LANDSCAPE_STREAM = 1
_RUN_STREAM = 2


def derive_seed(*key: int) -> int:
    """Map a tuple of non-negative integers to a 64-bit seed.

    Uses numpy's ``SeedSequence`` hash over the whole key, so nearby keys
    give unrelated seeds and no stream has to be replayed to reach a cell.
    """
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def run_seed(base_seed: int, index: int) -> int:
    """Seed of run ``index`` in a batch started from ``base_seed``."""
    return derive_seed(base_seed, index)


def _value_key(value) -> int:
    return int(round(float(value) * 1000))


def _algorithm_key(algorithm_id: str) -> int:
    return zlib.crc32(algorithm_id.encode("ascii"))


def landscape_seed(master_seed: int, characteristic: str, value, index: int = 0) -> int:
    return derive_seed(master_seed, _LANDSCAPE_STREAM, CHARACTERISTIC_ORDER.index(characteristic),
                       _value_key(value), index)


def cell_base_seed(master_seed: int, characteristic: str, value, index: int,
                   algorithm_id: str) -> int:
    return derive_seed(master_seed, _RUN_STREAM, CHARACTERISTIC_ORDER.index(characteristic),
                       _value_key(value), index, _algorithm_key(algorithm_id))


def planned_landscape(characteristic: str, value, master_seed: int = 0, index: int = 0,
                      defaults: LandscapeSpec = DEFAULT_SPEC) -> Landscape:
    """The landscape a sweep uses for one characteristic value."""
    seed = landscape_seed(master_seed, characteristic, value, index)
    return generate_landscape(spec_for(characteristic, value, defaults, seed))


# -- runs --------------------------------------------------------------------

def _domain(landscape: Landscape) -> Domain:
    lower, upper = landscape.bounds
    return Domain(lower, upper, landscape.dimensions)


def run_once(landscape: Landscape, algorithm_id: str, config: AlgorithmConfig | None = None,
             seed: int = 0, budget: int = DEFAULT_BUDGET) -> RunRecord:
    """One seeded run of ``algorithm_id`` under a fresh evaluation budget."""
    algo = get_algorithm(algorithm_id)
    if budget < 1:
        raise ZeroBudget(f"budget must be >= 1, got {budget}")
    objective = BudgetedObjective(landscape, landscape.dimensions, budget)
    record = algo(objective, _domain(landscape), config or AlgorithmConfig(),
                  np.random.default_rng(seed))
    return replace(record, seed=int(seed), landscape_id=landscape.landscape_id)


def run_batch(landscape: Landscape, algorithm_id: str, config: AlgorithmConfig | None = None,
              n_runs: int = DEFAULT_RUNS, base_seed: int = 0,
              budget: int = DEFAULT_BUDGET) -> list[RunRecord]:
    """``n_runs`` runs seeded with ``run_seed(base_seed, i)``, in run order.

    Record ``i`` is identical to ``run_once(..., seed=run_seed(base_seed, i))``;
    algorithms with a fixed one-evaluation-per-step schedule are advanced in
    lock step across the batch for speed.
    """
    get_algorithm(algorithm_id)
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if budget < 1:
        raise ZeroBudget(f"budget must be >= 1, got {budget}")
    seeds = [run_seed(base_seed, i) for i in range(n_runs)]
    config = config or AlgorithmConfig()
    if algorithm_id not in LOCKSTEP:
        return [run_once(landscape, algorithm_id, config, s, budget) for s in seeds]
    objective = LockstepObjective(landscape, landscape.dimensions, n_runs, budget)
    records = run_lockstep(algorithm_id, objective, _domain(landscape), config,
                           [np.random.default_rng(s) for s in seeds])
    return [replace(r, seed=s, landscape_id=landscape.landscape_id)
            for r, s in zip(records, seeds)]


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class MetricsSummary:
    algorithm: str
    characteristic: str
    value: float | int | None
    mean_error: float
    std_error: float
    success_rate: float
    n_runs: int
    tolerance: float = DEFAULT_TOLERANCE


def compute_metrics(records: Sequence[RunRecord], tolerance: float = DEFAULT_TOLERANCE,
                    characteristic: str = "", value=None) -> MetricsSummary:
    """Accuracy, spread and success rate of a cell's final errors.

    The optimum is 0, so the error of a run is ``|best_fitness|``.  The
    spread uses the ``n - 1`` denominator and is 0 for a single run.  A run
    succeeds when its error is strictly below ``tolerance``.
    """
    if not records:
        raise EmptyCell("no records to summarise")
    algorithms = {r.algorithm for r in records}
    if len(algorithms) != 1:
        raise ValueError(f"records mix algorithms: {sorted(algorithms)}")
    errors = np.abs(np.array([r.best_fitness for r in records], dtype=float))
    n = len(errors)
    mean = float(errors.mean())
    std = float(errors.std(ddof=1)) if n > 1 else 0.0
    hits = int(np.count_nonzero(errors < tolerance))
    return MetricsSummary(
        algorithm=records[0].algorithm,
        characteristic=characteristic,
        value=value,
        mean_error=mean,
        std_error=std,
        success_rate=hits / n,
        n_runs=n,
        tolerance=float(tolerance),
    )


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepPlan:
    """One characteristic sweep, or all five back to back when ``characteristic='all'``."""

    characteristic: str
    values: list | None = None
    defaults: LandscapeSpec = DEFAULT_SPEC
    algorithms: Sequence[str] = ALGORITHM_ORDER
    runs_per_cell: int = DEFAULT_RUNS
    landscapes_per_value: int = 1
    budget: int = DEFAULT_BUDGET
    master_seed: int = 0
    config: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.characteristic != ALL and self.characteristic not in CHARACTERISTICS:
            choices = ", ".join(CHARACTERISTIC_ORDER + (ALL,))
            raise ValueError(f"unknown characteristic {self.characteristic!r} (choose from {choices})")
        if self.characteristic == ALL and self.values is not None:
            raise ValueError("explicit values need a single characteristic")
        if self.values is not None:
            vals = list(self.values)
            if not vals:
                raise ValueError("values must be non-empty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError("values must be strictly increasing")
            self.values = vals
        for name in self.algorithms:
            get_algorithm(name)
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if self.landscapes_per_value < 1:
            raise ValueError("landscapes_per_value must be >= 1")
        if self.budget < 1:
            raise ZeroBudget(f"budget must be >= 1, got {self.budget}")

    @property
    def characteristics(self) -> tuple[str, ...]:
        return CHARACTERISTIC_ORDER if self.characteristic == ALL else (self.characteristic,)

    def cells(self) -> list[tuple[str, object]]:
        """Every (characteristic, value) pair in execution order."""
        out = []
        for name in self.characteristics:
            vals = self.values if self.values is not None else characteristic_values(name)
            out.extend((name, v) for v in vals)
        return out

    def landscape_specs(self) -> list[tuple[str, object, int, LandscapeSpec]]:
        return [
            (name, v, k, spec_for(name, v, self.defaults,
                                  landscape_seed(self.master_seed, name, v, k)))
            for name, v in self.cells()
            for k in range(self.landscapes_per_value)
        ]


@dataclass
class CellResult:
    characteristic: str
    value: object
    algorithm: str
    landscape_ids: list[str]
    records: list[RunRecord]
    summary: MetricsSummary


@dataclass
class CellFailure:
    characteristic: str
    value: object
    landscape_index: int
    message: str


@dataclass
class SweepResult:
    plan: SweepPlan
    cells: list[CellResult] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)

    @property
    def summaries(self) -> list[MetricsSummary]:
        return [c.summary for c in self.cells]

    @property
    def records(self) -> list[RunRecord]:
        return [r for c in self.cells for r in c.records]

    def write_records_csv(self, stream) -> None:
        write_records_csv(stream, (
            (c.characteristic, c.value, r) for c in self.cells for r in c.records),
            self.plan.tolerance)


def _run_task(task):
    landscape, algorithm_id, config, n_runs, base_seed, budget = task
    return run_batch(landscape, algorithm_id, config, n_runs, base_seed, budget)


def sweep(plan: SweepPlan, jobs: int = 1,
          progress: Callable[[str], None] | None = None) -> SweepResult:
    """Run every algorithm ``runs_per_cell`` times on every planned landscape.

    Only the swept characteristic departs from ``plan.defaults``.  A value
    whose landscape cannot be generated is recorded in ``failures`` and
    skipped; the other values still run.  Results are merged in plan order,
    so the output does not depend on ``jobs``.
    """
    result = SweepResult(plan)
    landscapes: dict[tuple, list[Landscape]] = {}
    for name, value, k, spec in plan.landscape_specs():
        key = (name, value)
        if key in landscapes and landscapes[key] is None:
            continue
        try:
            landscape = generate_landscape(spec)
        except MsgBenchError as exc:
            result.failures.append(CellFailure(name, value, k, f"{type(exc).__name__}: {exc}"))
            landscapes[key] = None
            continue
        landscapes.setdefault(key, []).append(landscape)

    tasks, slots = [], []
    for (name, value), group in landscapes.items():
        if group is None:
            continue
        for algorithm_id in plan.algorithms:
            for k, landscape in enumerate(group):
                base = cell_base_seed(plan.master_seed, name, value, k, algorithm_id)
                tasks.append((landscape, algorithm_id, plan.config, plan.runs_per_cell, base,
                              plan.budget))
                slots.append((name, value, algorithm_id))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = _collect(pool.map(_run_task, tasks), slots, progress)
    else:
        outputs = _collect(map(_run_task, tasks), slots, progress)

    grouped: dict[tuple, list[RunRecord]] = {}
    for slot, records in zip(slots, outputs):
        grouped.setdefault(slot, []).extend(records)
    for (name, value, algorithm_id), records in grouped.items():
        summary = compute_metrics(records, plan.tolerance, name, value)
        ids = [l.landscape_id for l in landscapes[(name, value)]]
        result.cells.append(CellResult(name, value, algorithm_id, ids, records, summary))
    return result


def _collect(outputs: Iterable, slots, progress):
    done = []
    for i, (slot, records) in enumerate(zip(slots, outputs), 1):
        done.append(records)
        if progress is not None:
            name, value, algorithm_id = slot
            errors = [r.best_fitness for r in records]
            progress(f"[{i}/{len(slots)}] {name}={value} {algorithm_id}: "
                     f"mean error {float(np.mean(errors)):.3g}")
    return done


# -- records CSV -------------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits: enough for any double to round-trip."""
    return format(float(x), ".17g")


def format_value(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_records_csv(stream, rows: Iterable[tuple[str, object, RunRecord]],
                      tolerance: float = DEFAULT_TOLERANCE) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for characteristic, value, r in rows:
        writer.writerow([
            characteristic, format_value(value), r.landscape_id, r.algorithm,
            "" if r.seed is None else r.seed, format_float(r.best_fitness), r.evals_used,
            int(abs(r.best_fitness) < tolerance),
        ])


def records_csv(rows, tolerance: float = DEFAULT_TOLERANCE) -> str:
    buf = io.StringIO()
    write_records_csv(buf, rows, tolerance)
    return buf.getvalue()


def read_records_csv(stream) -> list[tuple[str, object, RunRecord]]:
    """Parse a records CSV back into ``(characteristic, value, record)`` rows.

    Best points are not part of the CSV and come back empty.
    """
    reader = csv.DictReader(stream)
    missing = set(RECORD_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"records CSV lacks columns: {sorted(missing)}")
    rows = []
    for row in reader:
        value = _parse_value(row["characteristic"], row["value"])
        record = RunRecord(
            algorithm=row["algorithm"],
            best_point=(),
            best_fitness=float(row["best_fitness"]),
            evals_used=int(row["evals_used"]),
            seed=int(row["seed"]) if row["seed"] else None,
            landscape_id=row["landscape_id"],
        )
        rows.append((row["characteristic"], value, record))
    return rows


def _parse_value(characteristic: str, text: str):
    if text == "":
        return None
    if characteristic in ("local_optima", "dimensions"):
        return int(float(text))
    number = float(text)
    return number if math.isfinite(number) else text
