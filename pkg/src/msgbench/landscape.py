"""Max-set-of-Gaussians fitness landscapes.

A landscape is the upper envelope of weighted isotropic Gaussian bumps on
the box ``[0, boundary]^D``.  The global bump has weight 1 and every other
bump is a strictly worse local optimum, so the quantity minimised by the
optimizers,

    f(x) = 1 - max_i w_i * exp(-|x - mu_i|^2 / (2 sigma_i^2)),

is exactly 0 at the global optimum and lies in ``[0, 1)`` everywhere.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooHigh,
    InvalidSpec,
    ResamplingExhausted,
    SchemaError,
)

__all__ = [
    "DEFAULT_SPEC",
    "GaussianComponent",
    "Landscape",
    "LandscapeSpec",
    "MAX_PLACEMENT_ATTEMPTS",
    "REFERENCE_WIDTH",
    "component_sigma",
    "evaluate",
    "generate_landscape",
    "load_landscape",
    "save_landscape",
    "verify_local_optima",
]

MAX_PLACEMENT_ATTEMPTS = 1000
# Basin widths are expressed relative to the default 30-unit domain so that
# widening the boundary enlarges the search space instead of rescaling it.
REFERENCE_WIDTH = 30.0
# Every optimum owns at least a ball of this many widths; bare dominance at
# the centre admits basins far narrower than any optimizer can resolve.
MIN_BASIN_FRACTION = 0.1
_UINT64_MAX = 2**64 - 1
# True fitness is always below 1; when the envelope underflows past half an
# ulp, 1 - G would round up to 1.0, so round down to the last double instead.
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class LandscapeSpec:
    num_local_optima: int = 3
    ratio: float = 0.5
    dimensions: int = 2
    boundary: float = 30.0
    smoothness: float = 15.0
    seed: int = 0

    def validate(self) -> "LandscapeSpec":
        """Raise :class:`InvalidSpec` naming the first bad field."""
        checks = [
            ("num_local_optima", _is_int(self.num_local_optima) and self.num_local_optima >= 0,
             "must be an integer >= 0"),
            ("ratio", _is_finite(self.ratio) and 0.0 < self.ratio < 1.0, "must lie in (0, 1)"),
            ("dimensions", _is_int(self.dimensions) and self.dimensions >= 1,
             "must be an integer >= 1"),
            ("boundary", _is_finite(self.boundary) and self.boundary > 0, "must be > 0"),
            ("smoothness", _is_finite(self.smoothness) and self.smoothness > 0, "must be > 0"),
            ("seed", _is_int(self.seed) and 0 <= self.seed <= _UINT64_MAX,
             "must be an unsigned 64-bit integer"),
        ]
        for name, ok, why in checks:
            if not ok:
                raise InvalidSpec(f"{name}={getattr(self, name)!r} {why}")
        return self

    def replace(self, **changes) -> "LandscapeSpec":
        fields = self.to_dict()
        fields.update(changes)
        return LandscapeSpec(**fields)

    def to_dict(self) -> dict:
        return {
            "num_local_optima": int(self.num_local_optima),
            "ratio": float(self.ratio),
            "dimensions": int(self.dimensions),
            "boundary": float(self.boundary),
            "smoothness": float(self.smoothness),
            "seed": int(self.seed),
        }


DEFAULT_SPEC = LandscapeSpec()


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_finite(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value)


@dataclass(frozen=True)
class GaussianComponent:
    mean: tuple[float, ...]
    weight: float
    sigma: float


def component_sigma(spec: LandscapeSpec) -> float:
    """Isotropic width shared by all bumps: larger smoothness gives steeper bumps."""
    return REFERENCE_WIDTH / spec.smoothness * math.sqrt(spec.dimensions)


@dataclass(frozen=True, eq=False)
class Landscape:
    """Immutable, evaluable landscape; safe to share between workers."""

    spec: LandscapeSpec
    components: tuple[GaussianComponent, ...]
    global_index: int
    _means: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)
    _inv_two_var: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise SchemaError("components: at least one component is required")
        dims = self.spec.dimensions
        for k, comp in enumerate(comps):
            if len(comp.mean) != dims:
                raise SchemaError(f"components[{k}].mean: expected {dims} coordinates")
        if not 0 <= self.global_index < len(comps):
            raise SchemaError(f"global_index: {self.global_index} out of range")
        means = np.array([c.mean for c in comps], dtype=float).reshape(len(comps), dims)
        sigmas = np.array([c.sigma for c in comps], dtype=float)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_means", means)
        object.__setattr__(self, "_weights", np.array([c.weight for c in comps], dtype=float))
        object.__setattr__(self, "_inv_two_var", 1.0 / (2.0 * sigmas**2))
        for arr in (self._means, self._weights, self._inv_two_var):
            arr.setflags(write=False)

    @property
    def dimensions(self) -> int:
        return self.spec.dimensions

    @property
    def bounds(self) -> tuple[float, float]:
        return 0.0, float(self.spec.boundary)

    @property
    def global_optimum(self) -> np.ndarray:
        return self._means[self.global_index].copy()

    @property
    def means(self) -> np.ndarray:
        return self._means

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def landscape_id(self) -> str:
        return f"msg-{self.spec.seed:016x}"

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimensions,):
            raise DimensionMismatch(
                f"point has shape {x.shape}, landscape has {self.dimensions} dimensions")
        diff = self._means - x
        sq = np.einsum("ij,ij->i", diff, diff)
        return min(float(1.0 - (self._weights * np.exp(-sq * self._inv_two_var)).max()), _BELOW_ONE)

    def evaluate_many(self, points) -> np.ndarray:
        """Vectorised :meth:`evaluate` over the rows of an ``(n, D)`` array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimensions:
            raise DimensionMismatch(
                f"points have shape {pts.shape}, expected (n, {self.dimensions})")
        out = np.empty(len(pts))
        step = max(1, 65536 // (len(self.components) * self.dimensions))
        for start in range(0, len(pts), step):
            chunk = pts[start:start + step]
            diff = chunk[:, None, :] - self._means[None, :, :]
            sq = np.einsum("nkd,nkd->nk", diff, diff)
            out[start:start + step] = 1.0 - (self._weights * np.exp(-sq * self._inv_two_var)).max(axis=1)
        return np.minimum(out, _BELOW_ONE, out=out)

    __call__ = evaluate_many

    def log_height(self, points) -> np.ndarray:
        """``log max_i w_i g_i(x)``; order-equivalent to ``-f`` without underflow."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dimensions)
        out = np.empty(len(pts))
        log_w = np.log(self._weights)
        step = max(1, 65536 // (len(self.components) * self.dimensions))
        for start in range(0, len(pts), step):
            chunk = pts[start:start + step]
            diff = chunk[:, None, :] - self._means[None, :, :]
            sq = np.einsum("nkd,nkd->nk", diff, diff)
            out[start:start + step] = (log_w - sq * self._inv_two_var).max(axis=1)
        return out

    def dominance_holds(self) -> bool:
        """True when every bump is the strict maximum at its own mean."""
        return all(_dominates_everywhere(self._means, self._weights, self._inv_two_var, i)
                   for i in range(len(self.components)))


def evaluate(landscape: Landscape, x) -> float:
    return landscape.evaluate(x)


def _dominates_everywhere(means, weights, inv_two_var, i) -> bool:
    diff = means - means[i]
    sq = np.einsum("ij,ij->i", diff, diff)
    others = np.log(weights) - sq * inv_two_var
    others[i] = -np.inf
    return bool(math.log(weights[i]) > others.max(initial=-np.inf))


def _placement_ok(means, log_w, inv_two_var, n_placed, min_radius) -> bool:
    """Check the newest bump against every bump placed before it.

    All generated bumps share one width, so the set where bump ``i`` beats
    bump ``j`` is a half-space.  Its distance from ``mu_i`` is
    ``(log(w_i / w_j) / c + d^2) / (2 d)`` with ``c = 1 / (2 sigma^2)``;
    requiring that distance to reach ``min_radius`` in both directions keeps
    every optimum's basin a ball of at least that radius.
    """
    new = n_placed
    c = inv_two_var[new]
    d = np.sqrt(np.einsum("ij,ij->i", means[:new] - means[new], means[:new] - means[new]))
    if np.any(d == 0.0):
        return False
    log_ratio = log_w[new] - log_w[:new]
    reach_new = (log_ratio / c + d**2) / (2.0 * d)
    reach_old = (-log_ratio / c + d**2) / (2.0 * d)
    return bool(np.all(reach_new >= min_radius) and np.all(reach_old >= min_radius))


def generate_landscape(spec: LandscapeSpec, rng: np.random.Generator | None = None) -> Landscape:
    """Draw a landscape realising ``spec``.

    Component 0 is the global optimum (weight 1).  Each local optimum gets a
    weight drawn uniformly from ``ratio +/- 0.1`` (clipped to [0.01, 0.99])
    and a mean that is rejection-sampled until every bump still dominates
    at its own centre.  ``rng`` defaults to a generator seeded with
    ``spec.seed``.
    """
    spec.validate()
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    dims, boundary = spec.dimensions, float(spec.boundary)
    n = spec.num_local_optima + 1
    sigma = component_sigma(spec)

    means = np.empty((n, dims))
    weights = np.empty(n)
    inv_two_var = np.full(n, 1.0 / (2.0 * sigma**2))
    min_radius = MIN_BASIN_FRACTION * sigma
    lo_w = max(0.01, spec.ratio - 0.1)
    hi_w = min(0.99, spec.ratio + 0.1)

    weights[0] = 1.0
    means[0] = rng.uniform(0.0, boundary, dims)
    for k in range(1, n):
        weights[k] = rng.uniform(lo_w, hi_w)
        log_w = np.log(weights[: k + 1])
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            means[k] = rng.uniform(0.0, boundary, dims)
            if _placement_ok(means[: k + 1], log_w, inv_two_var[: k + 1], k, min_radius):
                break
        else:
            raise ResamplingExhausted(
                f"could not place local optimum {k} of {n - 1} after "
                f"{MAX_PLACEMENT_ATTEMPTS} attempts (spec too crowded: {spec})")

    components = tuple(
        GaussianComponent(tuple(float(v) for v in means[k]), float(weights[k]), float(sigma))
        for k in range(n))
    return Landscape(spec, components, 0)


def verify_local_optima(landscape: Landscape, grid_points_per_dim: int = 300) -> int:
    """Count basins by steepest descent from every node of a regular grid.

    Each node moves to its best axis neighbour (2D of them) while that
    strictly improves; the number of distinct end points, merged when closer
    than ``boundary / 1000``, is returned.  Descent runs on the log of the
    envelope height, which orders points exactly like the fitness but does
    not flatten out to 1.0 far from every bump.
    """
    dims = landscape.dimensions
    if dims > 3:
        raise DimensionTooHigh(f"grid oracle supports D <= 3, got D={dims}")
    if grid_points_per_dim < 50:
        raise ValueError("grid_points_per_dim must be >= 50")
    n = int(grid_points_per_dim)
    boundary = float(landscape.spec.boundary)
    axis = np.linspace(0.0, boundary, n)
    mesh = np.meshgrid(*([axis] * dims), indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    height = landscape.log_height(nodes).reshape((n,) * dims)

    index = np.arange(n**dims).reshape((n,) * dims)
    best_height = height.copy()
    best_index = index.copy()
    for ax in range(dims):
        for shift in (-1, 1):
            nb_height = np.full_like(height, -np.inf)
            nb_index = index.copy()
            src = [slice(None)] * dims
            dst = [slice(None)] * dims
            if shift == 1:
                src[ax], dst[ax] = slice(1, None), slice(None, -1)
            else:
                src[ax], dst[ax] = slice(None, -1), slice(1, None)
            nb_height[tuple(dst)] = height[tuple(src)]
            nb_index[tuple(dst)] = index[tuple(src)]
            better = nb_height > best_height
            best_height[better] = nb_height[better]
            best_index[better] = nb_index[better]

    pointer = best_index.ravel()
    while True:
        jumped = pointer[pointer]
        if np.array_equal(jumped, pointer):
            break
        pointer = jumped
    terminals = nodes[np.unique(pointer)]
    return _count_clusters(terminals, boundary / 1000.0)


def _count_clusters(points: np.ndarray, radius: float) -> int:
    """Single-linkage cluster count with linkage distance below ``radius``."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        dist = np.linalg.norm(points[i + 1:] - points[i], axis=1)
        for j in np.nonzero(dist < radius)[0] + i + 1:
            parent[find(int(j))] = find(i)
    return len({find(i) for i in range(n)})


# -- persistence -------------------------------------------------------------

def landscape_to_dict(landscape: Landscape) -> dict:
    return {
        "spec": landscape.spec.to_dict(),
        "components": [
            {"mean": [float(v) for v in c.mean], "weight": float(c.weight), "sigma": float(c.sigma)}
            for c in landscape.components
        ],
        "global_index": int(landscape.global_index),
    }


def landscape_from_dict(data) -> Landscape:
    if not isinstance(data, dict):
        raise SchemaError("top level: expected a JSON object")
    for key in ("spec", "components", "global_index"):
        if key not in data:
            raise SchemaError(f"{key}: missing required field")

    raw_spec = data["spec"]
    if not isinstance(raw_spec, dict):
        raise SchemaError("spec: expected an object")
    spec_fields = {}
    for name, kind in (("num_local_optima", int), ("ratio", float), ("dimensions", int),
                       ("boundary", float), ("smoothness", float), ("seed", int)):
        if name not in raw_spec:
            raise SchemaError(f"spec.{name}: missing required field")
        spec_fields[name] = _typed(raw_spec[name], kind, f"spec.{name}")
    spec = LandscapeSpec(**spec_fields)
    try:
        spec.validate()
    except InvalidSpec as exc:
        raise SchemaError(f"spec.{exc}") from None

    raw_components = data["components"]
    if not isinstance(raw_components, list) or not raw_components:
        raise SchemaError("components: expected a non-empty list")
    components = []
    for k, raw in enumerate(raw_components):
        where = f"components[{k}]"
        if not isinstance(raw, dict):
            raise SchemaError(f"{where}: expected an object")
        for name in ("mean", "weight", "sigma"):
            if name not in raw:
                raise SchemaError(f"{where}.{name}: missing required field")
        mean = raw["mean"]
        if not isinstance(mean, list) or len(mean) != spec.dimensions:
            raise SchemaError(f"{where}.mean: expected a list of {spec.dimensions} numbers")
        mean = tuple(_typed(v, float, f"{where}.mean") for v in mean)
        weight = _typed(raw["weight"], float, f"{where}.weight")
        sigma = _typed(raw["sigma"], float, f"{where}.sigma")
        if not 0.0 < weight <= 1.0:
            raise SchemaError(f"{where}.weight: must lie in (0, 1]")
        if not sigma > 0.0:
            raise SchemaError(f"{where}.sigma: must be > 0")
        components.append(GaussianComponent(mean, weight, sigma))

    global_index = _typed(data["global_index"], int, "global_index")
    if not 0 <= global_index < len(components):
        raise SchemaError("global_index: out of range")
    if components[global_index].weight != 1.0:
        raise SchemaError("global_index: referenced component must have weight 1")
    return Landscape(spec, tuple(components), global_index)


def _typed(value, kind, where):
    if isinstance(value, bool):
        raise SchemaError(f"{where}: expected {kind.__name__}, got bool")
    if kind is int:
        if isinstance(value, int):
            return value
        raise SchemaError(f"{where}: expected an integer")
    if isinstance(value, (int, float)) and math.isfinite(value):
        return float(value)
    raise SchemaError(f"{where}: expected a finite number")


def save_landscape(landscape: Landscape, path: str | os.PathLike) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    text = json.dumps(landscape_to_dict(landscape), indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def load_landscape(path: str | os.PathLike) -> Landscape:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from None
    return landscape_from_dict(data)


def make_landscape(means: Sequence[Sequence[float]], weights: Sequence[float],
                   sigma: float | Sequence[float], boundary: float = 30.0,
                   seed: int = 0) -> Landscape:
    """Build a landscape from explicit components (global = the weight-1 one)."""
    means = [tuple(float(v) for v in m) for m in means]
    sigmas = [float(sigma)] * len(means) if np.isscalar(sigma) else [float(s) for s in sigma]
    spec = LandscapeSpec(num_local_optima=len(means) - 1, dimensions=len(means[0]),
                         boundary=float(boundary), seed=seed)
    comps = tuple(GaussianComponent(m, float(w), s) for m, w, s in zip(means, weights, sigmas))
    return Landscape(spec, comps, list(weights).index(1.0))
