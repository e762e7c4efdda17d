"""Monte Carlo oracle for the analytic model.

UEs and pedestrians are dropped explicitly and every link is tested for
blockage geometrically; the estimates carry a 95% normal-approximation
interval over replication means.

A pedestrian blocks a link when the center of its body lies inside the strip
of half-width r_B that runs from the UE towards the AP for the shadow length
x(h_B - h_U)/h_T plus one body radius. That strip is exactly the region the
closed-form blockage probability counts, so agreement validates the
implementation of the model rather than the physical fidelity of the model.
Self-blockage is an independent Bernoulli draw per link.

Each replication draws from its own Philox substream keyed by the
replication index, so results do not depend on how replications are spread
across workers.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .channel import BlockageGeometry, LinkBudget, received_power
from .exceptions import CapacityDomainError, ChannelDomainError
from .geometry import DeploymentOption, make_layout, nearest_ap
from .lifecycle import serving_fraction
from .scenario import ScenarioConfig

logger = logging.getLogger("app_capacity")

Z_95 = 1.96
DROP_MARGIN = 1.25
CHUNK = 100_000
PAIR_ROWS = 256

MapFn = Callable[[Callable[[Any], Any], Iterable[Any]], Iterable[Any]]


@dataclass(frozen=True)
class SimConfig:
    replications: int = 20
    seed: int = 42
    drops_per_replication: int = 50_000

    def __post_init__(self):
        if self.replications < 1:
            raise CapacityDomainError(f"replications must be ≥ 1, got {self.replications}")
        if self.drops_per_replication < 1:
            raise CapacityDomainError(f"drops per replication must be ≥ 1, got {self.drops_per_replication}")
        if not 0 <= self.seed < 2**64:
            raise CapacityDomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def replication_rng(self, index: int) -> np.random.Generator:
        stream = np.random.SeedSequence(self.seed, spawn_key=(index,))
        return np.random.Generator(np.random.Philox(stream))


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    ci95_halfwidth: float
    n_samples: int

    @classmethod
    def from_replications(cls, means: Sequence[float], n_samples: int) -> "SimEstimate":
        means = np.asarray(means, dtype=float)
        if means.size < 2:
            halfwidth = math.inf
        else:
            halfwidth = Z_95 * float(np.std(means, ddof=1)) / math.sqrt(means.size)
        return cls(float(np.mean(means)), halfwidth, int(n_samples))

    def covers(self, value: float) -> bool:
        return abs(self.mean - value) <= self.ci95_halfwidth

    def relative_error(self, reference: float) -> float:
        if reference == 0:
            return abs(self.mean)
        return abs(self.mean - reference) / abs(reference)


def _replicate(task, sim, map_fn):
    """Run ``task(index)`` for every replication; results come back in index order."""
    return list(map_fn(task, range(sim.replications)))


def blocker_disc_radius(geom: BlockageGeometry, x: Union[float, np.ndarray], margin: float = DROP_MARGIN) -> np.ndarray:
    """Radius of a UE-centered disc that contains the whole blocking strip."""
    return margin * np.hypot(geom.shadow_length(x) + geom.r_b, geom.r_b)


def crowd_blocked(
    rng: np.random.Generator,
    geom: BlockageGeometry,
    x: np.ndarray,
    directions: np.ndarray,
    density: float,
    margin: float = DROP_MARGIN,
) -> np.ndarray:
    """Per-link pedestrian blockage for links of 2D length ``x`` leaving the UE along ``directions``.

    Pedestrians are a PPP of intensity ``density`` dropped in a disc around
    each UE; ``x`` is an array of n lengths and ``directions`` an (n, 2)
    array of unit vectors.
    """
    x = np.asarray(x, dtype=float)
    blocked = np.zeros(x.shape, dtype=bool)
    if density <= 0 or x.size == 0:
        return blocked

    disc = blocker_disc_radius(geom, x, margin)
    counts = rng.poisson(density * math.pi * disc**2)
    owner = np.repeat(np.arange(x.size), counts)
    r = disc[owner] * np.sqrt(rng.random(owner.size))
    theta = 2.0 * math.pi * rng.random(owner.size)
    bx, by = r * np.cos(theta), r * np.sin(theta)

    ux, uy = directions[owner, 0], directions[owner, 1]
    along = bx * ux + by * uy
    across = np.abs(bx * uy - by * ux)
    hit = (along >= 0.0) & (along <= geom.shadow_length(x[owner]) + geom.r_b) & (across <= geom.r_b)
    blocked[np.unique(owner[hit])] = True
    return blocked


def self_blocked(rng: np.random.Generator, geom: BlockageGeometry, size: int) -> np.ndarray:
    return rng.random(size) < geom.self_block_probability


class _BlockageTask:
    def __init__(self, geom, x, density, sim, margin):
        self.geom, self.x, self.density, self.sim, self.margin = geom, x, density, sim, margin

    def __call__(self, index):
        rng = self.sim.replication_rng(index)
        n = self.sim.drops_per_replication
        hits = 0
        for start in range(0, n, CHUNK):
            size = min(CHUNK, n - start)
            own = self_blocked(rng, self.geom, size)
            directions = np.tile((1.0, 0.0), (size, 1))
            crowd = crowd_blocked(rng, self.geom, np.full(size, self.x), directions, self.density, self.margin)
            hits += int(np.count_nonzero(own | crowd))
        return hits / n


def simulate_blockage(
    config: ScenarioConfig,
    sim: SimConfig,
    x: float,
    height: float,
    margin: float = DROP_MARGIN,
    map_fn: MapFn = map,
) -> SimEstimate:
    """Monte Carlo blockage probability of a link of 2D length x to an AP at ``height``."""
    if x < 0:
        raise ChannelDomainError(f"2D distance must be non-negative, got {x}")
    geom = BlockageGeometry.from_body(config.body, height)
    means = _replicate(_BlockageTask(geom, float(x), config.area.density, sim, margin), sim, map_fn)
    estimate = SimEstimate.from_replications(means, sim.replications * sim.drops_per_replication)
    logger.debug(f"MC p_B(x={x:g}, h={height:g}) = {estimate.mean:.5f} ± {estimate.ci95_halfwidth:.5f}")
    return estimate


def uniform_in_disc(rng: np.random.Generator, radius: float, size: int) -> np.ndarray:
    r = radius * np.sqrt(rng.random(size))
    theta = 2.0 * math.pi * rng.random(size)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def _links(points, layout):
    """Nearest-AP 2D distances and unit directions from each UE towards its AP."""
    index, dist = nearest_ap(points, layout)
    delta = layout.coordinates()[index] - points
    safe = np.where(dist > 0, dist, 1.0)
    directions = delta / safe[:, None]
    directions[dist <= 0] = (1.0, 0.0)
    return dist, directions


def nearest_ap_distances(option: Union[DeploymentOption, str], m: int, config: ScenarioConfig, size: int, rng: np.random.Generator) -> np.ndarray:
    """2D distances from ``size`` uniform UEs to their nearest AP."""
    # 2D distances do not depend on the AP height.
    layout = make_layout(option, m, config, height=0.0)
    return nearest_ap(uniform_in_disc(rng, config.area.radius, size), layout)[1]


def _spectral_efficiency(budget, geom, x, blocked):
    d = np.hypot(x, geom.h_t)
    return np.log2(1.0 + received_power(budget, d, blocked) / budget.noise_linear)


class _MeanSeTask:
    def __init__(self, option, m, config, height, sim):
        self.layout = make_layout(option, m, config, height)
        self.radius = config.area.radius
        self.density = config.area.density
        self.budget = LinkBudget.from_radio(config.radio)
        self.geom = BlockageGeometry.from_body(config.body, height)
        self.sim = sim

    def __call__(self, index):
        rng = self.sim.replication_rng(index)
        n = self.sim.drops_per_replication
        total = 0.0
        for start in range(0, n, CHUNK):
            size = min(CHUNK, n - start)
            dist, directions = _links(uniform_in_disc(rng, self.radius, size), self.layout)
            blocked = self_blocked(rng, self.geom, size) | crowd_blocked(rng, self.geom, dist, directions, self.density)
            total += float(np.sum(_spectral_efficiency(self.budget, self.geom, dist, blocked)))
        return total / n


def simulate_mean_se(
    option: Union[DeploymentOption, str],
    m: int,
    config: ScenarioConfig,
    height: float,
    sim: SimConfig,
    map_fn: MapFn = map,
) -> SimEstimate:
    option = DeploymentOption.parse(option)
    means = _replicate(_MeanSeTask(option, m, config, float(height), sim), sim, map_fn)
    estimate = SimEstimate.from_replications(means, sim.replications * sim.drops_per_replication)
    logger.debug(f"MC mean SE {option.value} M={m} h={height:g}: {estimate.mean:.5f} ± {estimate.ci95_halfwidth:.5f}")
    return estimate


def population_blocked(geom: BlockageGeometry, ues: np.ndarray, directions: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Links blocked by the bodies of the other UEs of the same realization."""
    k = len(ues)
    blocked = np.zeros(k, dtype=bool)
    reach = geom.shadow_length(dist) + geom.r_b
    for start in range(0, k, PAIR_ROWS):
        rows = slice(start, min(start + PAIR_ROWS, k))
        off = ues[None, :, :] - ues[rows, None, :]
        ux, uy = directions[rows, 0:1], directions[rows, 1:2]
        along = off[..., 0] * ux + off[..., 1] * uy
        across = np.abs(off[..., 0] * uy - off[..., 1] * ux)
        hit = (along >= 0.0) & (along <= reach[rows, None]) & (across <= geom.r_b)
        hit[np.arange(rows.stop - rows.start), np.arange(rows.start, rows.stop)] = False
        blocked[rows] = hit.any(axis=1)
    return blocked


class _UserCapacityTask:
    def __init__(self, option, m, config, height, sim):
        self.layout = make_layout(option, m, config, height)
        self.m = m
        self.radius = config.area.radius
        self.mean_users = config.area.density * math.pi * config.area.radius**2
        self.bandwidth = config.radio.bandwidth_hz
        self.budget = LinkBudget.from_radio(config.radio)
        self.geom = BlockageGeometry.from_body(config.body, height)
        self.sim = sim
        # Area realizations per replication, sized so that about drops_per_replication UEs are drawn.
        self.realizations = max(1, math.ceil(sim.drops_per_replication / max(self.mean_users, 1.0)))

    def __call__(self, index):
        rng = self.sim.replication_rng(index)
        counts = rng.poisson(self.mean_users, size=self.realizations)
        total, samples = 0.0, 0
        for k in counts:
            if k == 0:
                continue
            ues = uniform_in_disc(rng, self.radius, k)
            dist, directions = _links(ues, self.layout)
            blocked = self_blocked(rng, self.geom, k) | population_blocked(self.geom, ues, directions, dist)
            rates = self.bandwidth * self.m / k * _spectral_efficiency(self.budget, self.geom, dist, blocked)
            total += float(np.mean(rates))
            samples += int(k)
        # Empty realizations count with zero rate, as in the K ≥ 1 analytic sum.
        return total / self.realizations, samples


def simulate_user_capacity(
    option: Union[DeploymentOption, str],
    config: ScenarioConfig,
    height: float,
    sim: SimConfig,
    m: Optional[int] = None,
    map_fn: MapFn = map,
) -> SimEstimate:
    """Monte Carlo mean per-user rate; ``m`` defaults to the guaranteed serving count."""
    option = DeploymentOption.parse(option)
    if config.area.density <= 0:
        raise CapacityDomainError("user capacity is undefined for an empty area (lambda = 0)")
    if m is None:
        m = serving_fraction(option, config.fleet, config.area.ell).n_serving
    if m < 1:
        return SimEstimate(0.0, 0.0, 0)
    results = _replicate(_UserCapacityTask(option, m, config, float(height), sim), sim, map_fn)
    estimate = SimEstimate.from_replications([mean for mean, _ in results], sum(n for _, n in results))
    logger.debug(f"MC user capacity {option.value} M={m} h={height:g}: {estimate.mean:.4g} ± {estimate.ci95_halfwidth:.3g} bit/s")
    return estimate
