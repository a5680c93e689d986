"""Shared contract for the optimizers: budgeted objective, config, run record."""

from __future__ import annotations

import functools
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from ..errors import ZeroBudget

DEFAULT_BUDGET = 20_000


class BudgetExhausted(Exception):
    """Raised inside an optimizer when the evaluation budget runs out."""


class BudgetedObjective:
    """Evaluation-counting wrapper around a batch fitness function.

    ``func`` maps an ``(n, D)`` array to ``n`` fitness values (a
    :class:`~msgbench.landscape.Landscape` qualifies).  Every evaluated
    point updates ``best_point``/``best_fitness``.  A request that does not
    fit in the remaining budget evaluates the prefix that does and then
    raises :class:`BudgetExhausted`.  With ``audit=True`` every evaluated
    point and fitness is kept for inspection.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], dimensions: int,
                 budget: int = DEFAULT_BUDGET, audit: bool = False):
        if budget < 0:
            raise ValueError("budget must be >= 0")
        self.func = func
        self.dimensions = int(dimensions)
        self.budget = int(budget)
        self.used = 0
        self.best_point: np.ndarray | None = None
        self.best_fitness = np.inf
        self.audit = audit
        self._log_points: list[np.ndarray] = []
        self._log_fitness: list[np.ndarray] = []

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.dimensions)
        room = self.budget - self.used
        if room <= 0:
            raise BudgetExhausted
        truncated = len(points) > room
        if truncated:
            points = points[:room]
        fitness = np.asarray(self.func(points), dtype=float)
        self.used += len(points)
        if len(points):
            k = int(np.argmin(fitness))
            if fitness[k] < self.best_fitness:
                self.best_fitness = float(fitness[k])
                self.best_point = points[k].copy()
        if self.audit:
            self._log_points.append(points.copy())
            self._log_fitness.append(fitness.copy())
        if truncated:
            raise BudgetExhausted
        return fitness

    def __call__(self, point) -> float:
        return float(self.evaluate_batch(np.asarray(point, dtype=float)[None, :])[0])

    def evaluate_runs(self, points: np.ndarray) -> np.ndarray:
        """Lock-step interface with a single run: ``(1, n, D)`` -> ``(1, n)``."""
        return self.evaluate_batch(points[0])[None, :]

    @property
    def runs(self) -> int:
        return 1

    @property
    def log_points(self) -> np.ndarray:
        if not self._log_points:
            return np.empty((0, self.dimensions))
        return np.concatenate(self._log_points)

    @property
    def log_fitness(self) -> np.ndarray:
        if not self._log_fitness:
            return np.empty(0)
        return np.concatenate(self._log_fitness)


class LockstepObjective:
    """Independent budgeted runs on one function, advanced together.

    Each call hands every run the same number of points, so the runs share
    one evaluation counter and exhaust their budgets on the same call.
    Per-run best points and fitnesses are tracked exactly as
    :class:`BudgetedObjective` would for each run on its own.
    """

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], dimensions: int, runs: int,
                 budget: int = DEFAULT_BUDGET, audit: bool = False):
        if budget < 0:
            raise ValueError("budget must be >= 0")
        self.func = func
        self.dimensions = int(dimensions)
        self.runs = int(runs)
        self.budget = int(budget)
        self.used = 0
        self.best_point = np.full((self.runs, self.dimensions), np.nan)
        self.best_fitness = np.full(self.runs, np.inf)
        self.audit = audit
        self._log_points: list[np.ndarray] = []
        self._log_fitness: list[np.ndarray] = []

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def evaluate_runs(self, points: np.ndarray) -> np.ndarray:
        """Evaluate ``(runs, n, D)`` points, ``n`` per run; returns ``(runs, n)``."""
        room = self.budget - self.used
        if room <= 0:
            raise BudgetExhausted
        truncated = points.shape[1] > room
        if truncated:
            points = points[:, :room]
        runs, n, dims = points.shape
        fitness = np.asarray(self.func(points.reshape(runs * n, dims)), dtype=float).reshape(runs, n)
        self.used += n
        if n:
            k = np.argmin(fitness, axis=1)
            rows = np.arange(runs)
            best = fitness[rows, k]
            better = best < self.best_fitness
            self.best_fitness[better] = best[better]
            self.best_point[better] = points[rows[better], k[better]]
        if self.audit:
            self._log_points.append(points.copy())
            self._log_fitness.append(fitness.copy())
        if truncated:
            raise BudgetExhausted
        return fitness

    def log_points(self, run: int) -> np.ndarray:
        if not self._log_points:
            return np.empty((0, self.dimensions))
        return np.concatenate([p[run] for p in self._log_points])

    def log_fitness(self, run: int) -> np.ndarray:
        if not self._log_fitness:
            return np.empty(0)
        return np.concatenate([f[run] for f in self._log_fitness])


def draw(rngs, sample):
    """Stack ``sample(rng)`` over per-run generators (leading axis = run)."""
    return np.stack([sample(rng) for rng in rngs])


@dataclass
class AlgorithmConfig:
    """Vanilla parameterisation; ``None`` fields are derived at run time."""

    population_size: int = 50
    range_param: float = 10.0

    ga_bits_per_dim: int = 16
    ga_crossover_rate: float = 0.98
    ga_mutation_rate: float | None = None  # 1 / (bits * D)

    es_mu: int | None = None  # 3/5 of the population, the rest are offspring
    es_initial_step_fraction: float = 0.1
    es_tau: float | None = None  # 1 / sqrt(2 sqrt(D))
    es_tau_prime: float | None = None  # 1 / sqrt(2 D)

    pso_c1: float = 2.0
    pso_c2: float = 2.0

    ba_sites: int = 5
    ba_elite_sites: int = 2
    ba_elite_recruits: int = 7
    ba_other_recruits: int = 3
    ba_patch_size: float | None = None  # range_param
    ba_patch_shrink: float = 0.95

    bfoa_elim_disp_steps: int = 1
    bfoa_repro_steps: int = 4
    bfoa_chem_steps: int = 70
    bfoa_swim_length: int = 4
    bfoa_step_size: float | None = None  # 0.1 * range_param
    bfoa_p_eliminate: float = 0.25
    bfoa_d_attr: float = 0.1
    bfoa_w_attr: float = 0.2
    bfoa_h_rep: float = 0.1
    bfoa_w_rep: float = 10.0

    hs_consideration_rate: float = 0.95
    hs_adjust_rate: float = 0.7
    hs_bandwidth: float | None = None  # 0.1 * range_param
    hs_init_factor: int = 3

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if not self.range_param > 0:
            raise ValueError("range_param must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    best_point: tuple[float, ...]
    best_fitness: float
    evals_used: int
    seed: int | None = None
    landscape_id: str = ""


@dataclass(frozen=True)
class Domain:
    lower: float
    upper: float
    dimensions: int

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
        shape = (self.dimensions,) if n is None else (n, self.dimensions)
        return rng.uniform(self.lower, self.upper, shape)


ALGORITHMS: dict[str, Callable] = {}
LOCKSTEP: dict[str, Callable] = {}
ALGORITHM_ORDER = ("ba", "bfoa", "es", "ga", "hs", "pso", "rs", "shc")
ALGORITHM_NAMES = {
    "ba": "Bees algorithm",
    "bfoa": "Bacterial foraging optimisation",
    "es": "Evolution strategies",
    "ga": "Genetic algorithm",
    "hs": "Harmony search",
    "pso": "Particle swarm optimisation",
    "rs": "Random search",
    "shc": "Stochastic hill climbing",
}


def optimizer(name: str, lockstep: bool = False):
    """Register a search loop under ``name`` and give it the common contract.

    The wrapped loop runs until the objective raises
    :class:`BudgetExhausted`; the wrapper turns whatever the objective saw
    into a :class:`RunRecord`.  Loops declared ``lockstep`` take a list of
    generators and drive every run in one array program; the single-run
    entry point hands them a one-element list, and :func:`run_lockstep`
    exposes the many-run form.
    """

    def decorate(loop):
        @functools.wraps(loop)
        def run(objective: BudgetedObjective, domain: Domain,
                config: AlgorithmConfig | None = None,
                rng: np.random.Generator | None = None) -> RunRecord:
            if objective.budget < 1:
                raise ZeroBudget(f"{name}: budget must be >= 1, got {objective.budget}")
            config = config or AlgorithmConfig()
            rng = rng if rng is not None else np.random.default_rng()
            try:
                loop(objective, domain, config, [rng] if lockstep else rng)
            except BudgetExhausted:
                pass
            return RunRecord(
                algorithm=name,
                best_point=tuple(float(v) for v in objective.best_point),
                best_fitness=float(objective.best_fitness),
                evals_used=objective.used,
            )

        run.algorithm_id = name
        ALGORITHMS[name] = run
        if lockstep:
            LOCKSTEP[name] = loop
        return run

    return decorate


def run_lockstep(name: str, objective: LockstepObjective, domain: Domain,
                 config: AlgorithmConfig | None, rngs: list) -> list[RunRecord]:
    """Run ``len(rngs)`` independent runs of a lock-step algorithm at once.

    Record ``i`` equals what the single-run entry point returns for
    ``rngs[i]`` on a fresh :class:`BudgetedObjective` with the same budget.
    """
    if objective.budget < 1:
        raise ZeroBudget(f"{name}: budget must be >= 1, got {objective.budget}")
    if len(rngs) != objective.runs:
        raise ValueError("need one generator per run")
    try:
        LOCKSTEP[name](objective, domain, config or AlgorithmConfig(), rngs)
    except BudgetExhausted:
        pass
    return [
        RunRecord(
            algorithm=name,
            best_point=tuple(float(v) for v in objective.best_point[i]),
            best_fitness=float(objective.best_fitness[i]),
            evals_used=objective.used,
        )
        for i in range(objective.runs)
    ]
