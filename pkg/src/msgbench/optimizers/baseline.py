"""Baseline searches: uniform random sampling and stochastic hill climbing."""

import numpy as np

from .base import draw, optimizer

_BLOCK = 1024


@optimizer("rs")
def random_search(objective, domain, config, rng):
    """Sample the domain uniformly, one independent point per evaluation."""
    while True:
        objective.evaluate_batch(domain.sample(rng, min(_BLOCK, objective.remaining)))


def hill_climb_accept(current_f, candidate_f):
    """A move is taken when it is no worse than the current point."""
    return candidate_f <= current_f


@optimizer("shc", lockstep=True)
def stochastic_hill_climb(objective, domain, config, rngs):
    """Accept a uniform perturbation of half-width ``range_param`` iff it is not worse."""
    step = config.range_param
    dims = domain.dimensions
    current = draw(rngs, lambda r: domain.sample(r))
    current_f = objective.evaluate_runs(current[:, None, :])[:, 0]
    while True:
        moves = draw(rngs, lambda r: r.uniform(-step, step, (_BLOCK, dims)))
        for t in range(_BLOCK):
            candidate = np.clip(current + moves[:, t], domain.lower, domain.upper)
            f = objective.evaluate_runs(candidate[:, None, :])[:, 0]
            take = hill_climb_accept(current_f, f)
            current[take] = candidate[take]
            current_f[take] = f[take]
