"""Social searches: particle swarm, bees algorithm, bacterial foraging."""

import numpy as np

from .base import optimizer


# -- particle swarm ----------------------------------------------------------

def pso_step(position, velocity, pbest, gbest, c1, c2, vmax, domain, rng):
    """One inertia-free velocity/position update for a whole swarm."""
    r1 = rng.random(position.shape)
    r2 = rng.random(position.shape)
    velocity = velocity + c1 * r1 * (pbest - position) + c2 * r2 * (gbest - position)
    velocity = np.clip(velocity, -vmax, vmax)
    return domain.clip(position + velocity), velocity


@optimizer("pso")
def particle_swarm(objective, domain, config, rng):
    """Global-best PSO with per-coordinate velocity clamping at ``range_param``."""
    size = config.population_size
    vmax = config.range_param
    position = domain.sample(rng, size)
    velocity = rng.uniform(-vmax, vmax, position.shape)
    fitness = objective.evaluate_batch(position)
    pbest, pbest_f = position.copy(), fitness.copy()
    while True:
        gbest = pbest[np.argmin(pbest_f)]
        position, velocity = pso_step(position, velocity, pbest, gbest,
                                      config.pso_c1, config.pso_c2, vmax, domain, rng)
        fitness = objective.evaluate_batch(position)
        improved = fitness <= pbest_f
        pbest[improved] = position[improved]
        pbest_f[improved] = fitness[improved]


# -- bees algorithm ----------------------------------------------------------

def patch_recruits(center, count, patch, domain, rng):
    """``count`` uniform samples from the hypercube of half-width ``patch`` around ``center``."""
    offsets = rng.uniform(-1.0, 1.0, (count, center.shape[-1])) * patch
    return domain.clip(center + offsets)


@optimizer("ba")
def bees_algorithm(objective, domain, config, rng):
    """Neighbourhood search around the best sites plus fresh uniform scouts.

    Each selected site keeps the best of itself and its recruits; the
    remaining scouts are redrawn uniformly every generation and the patch
    half-width shrinks geometrically.
    """
    size = config.population_size
    n_sites = min(config.ba_sites, size)
    n_elite = min(config.ba_elite_sites, n_sites)
    patch = config.ba_patch_size if config.ba_patch_size is not None else config.range_param

    bees = domain.sample(rng, size)
    fitness = objective.evaluate_batch(bees)
    while True:
        order = np.argsort(fitness, kind="stable")
        sites, site_f = bees[order[:n_sites]], fitness[order[:n_sites]]
        counts = [config.ba_elite_recruits if k < n_elite else config.ba_other_recruits
                  for k in range(n_sites)]
        recruits = [patch_recruits(sites[k], counts[k], patch, domain, rng) for k in range(n_sites)]
        recruit_f = objective.evaluate_batch(np.concatenate(recruits))
        start = 0
        for k, count in enumerate(counts):
            local = recruit_f[start:start + count]
            start += count
            if count and local.min() < site_f[k]:
                j = int(np.argmin(local))
                sites[k], site_f[k] = recruits[k][j], local[j]
        scouts = domain.sample(rng, size - n_sites)
        scout_f = objective.evaluate_batch(scouts)
        bees = np.concatenate([sites, scouts])
        fitness = np.concatenate([site_f, scout_f])
        patch *= config.ba_patch_shrink


# -- bacterial foraging ------------------------------------------------------

def cell_interaction(points, colony, d_attr, w_attr, h_rep, w_rep):
    """Attraction/repulsion felt at each of ``points`` from every cell of ``colony``."""
    diff = points[:, None, :] - colony[None, :, :]
    sq = np.einsum("nkd,nkd->nk", diff, diff)
    attract = -d_attr * np.exp(-w_attr * sq)
    repel = h_rep * np.exp(-w_rep * sq)
    return (attract + repel).sum(axis=1)


@optimizer("bfoa")
def bacterial_foraging(objective, domain, config, rng):
    """Chemotaxis, reproduction and elimination-dispersal over a colony of cells.

    Movement decisions use the raw cost plus the cell-to-cell interaction
    measured against the colony as it stood at the start of the chemotactic
    step; the best-seen point tracks raw cost only.  Each swim move takes a
    fresh random direction in ``[-1, 1]^D`` scaled by the step size, and a
    move is kept while it does not worsen the combined cost.  The whole
    schedule repeats until the budget is spent.
    """
    size = config.population_size
    step = config.bfoa_step_size if config.bfoa_step_size is not None else 0.1 * config.range_param
    swarm_terms = (config.bfoa_d_attr, config.bfoa_w_attr, config.bfoa_h_rep, config.bfoa_w_rep)

    cells = domain.sample(rng, size)
    cost = objective.evaluate_batch(cells)
    while True:
        for _ in range(config.bfoa_elim_disp_steps):
            for _ in range(config.bfoa_repro_steps):
                health = np.zeros(size)
                for _ in range(config.bfoa_chem_steps):
                    colony = cells.copy()
                    merit = cost + cell_interaction(cells, colony, *swarm_terms)
                    health += merit
                    swimming = np.ones(size, dtype=bool)
                    for _ in range(config.bfoa_swim_length):
                        idx = np.nonzero(swimming)[0]
                        if not len(idx):
                            break
                        moved = domain.clip(
                            cells[idx] + step * rng.uniform(-1.0, 1.0, (len(idx), domain.dimensions)))
                        moved_cost = objective.evaluate_batch(moved)
                        moved_merit = moved_cost + cell_interaction(moved, colony, *swarm_terms)
                        ok = moved_merit <= merit[idx]
                        keep = idx[ok]
                        cells[keep] = moved[ok]
                        cost[keep] = moved_cost[ok]
                        merit[keep] = moved_merit[ok]
                        health[keep] += moved_merit[ok]
                        swimming[idx[~ok]] = False
                order = np.argsort(health, kind="stable")
                half = order[: size // 2]
                survivors = np.concatenate([half, half, order[size // 2: size // 2 + size % 2]])
                cells, cost = cells[survivors].copy(), cost[survivors].copy()
            dispersed = np.nonzero(rng.random(size) <= config.bfoa_p_eliminate)[0]
            if len(dispersed):
                cells[dispersed] = domain.sample(rng, len(dispersed))
                cost[dispersed] = objective.evaluate_batch(cells[dispersed])
