"""Eight budgeted black-box minimisers sharing one calling convention.

Every optimizer is called as ``algo(objective, domain, config, rng)`` and
returns a :class:`RunRecord` once the objective's budget is spent.
"""

from ..errors import UnknownAlgorithm, ZeroBudget
from .base import (
    ALGORITHM_NAMES,
    ALGORITHM_ORDER,
    ALGORITHMS,
    DEFAULT_BUDGET,
    AlgorithmConfig,
    BudgetedObjective,
    BudgetExhausted,
    Domain,
    RunRecord,
)
from .baseline import random_search, stochastic_hill_climb
from .evolutionary import evolution_strategies, genetic_algorithm
from .harmony import harmony_search
from .swarm import bacterial_foraging, bees_algorithm, particle_swarm


def get_algorithm(algorithm_id: str):
    try:
        return ALGORITHMS[algorithm_id]
    except KeyError:
        known = ", ".join(ALGORITHM_ORDER)
        raise UnknownAlgorithm(f"unknown algorithm {algorithm_id!r} (known: {known})") from None


__all__ = [
    "ALGORITHMS",
    "ALGORITHM_NAMES",
    "ALGORITHM_ORDER",
    "DEFAULT_BUDGET",
    "AlgorithmConfig",
    "BudgetExhausted",
    "BudgetedObjective",
    "Domain",
    "RunRecord",
    "UnknownAlgorithm",
    "ZeroBudget",
    "bacterial_foraging",
    "bees_algorithm",
    "evolution_strategies",
    "genetic_algorithm",
    "get_algorithm",
    "harmony_search",
    "particle_swarm",
    "random_search",
    "stochastic_hill_climb",
]
