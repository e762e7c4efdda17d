"""Analytic capacity metrics for airborne and landed deployments.

The serving stage is described by the mean spectral efficiency over the
nearest-AP distance PDF; the operation cycle decides how many APs are
guaranteed to serve. Network capacity is N_serving·B·S̄; user capacity
shares each AP's bandwidth among a Poisson number of users whose own bodies
make up the blocking crowd.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize, stats

from .channel import BlockageGeometry, LinkBudget, branch_efficiencies, spectral_efficiency
from .exceptions import CapacityDomainError, TargetUnreachableError, UnsupportedCountError
from .geometry import DEFAULT_RESOLUTION, DeploymentOption, link_distance_pdf
from .lifecycle import CycleResult, serving_fraction
from .scenario import FleetModel, ScenarioConfig, with_values

logger = logging.getLogger("app_capacity")

QUAD_EPSREL = 1e-8
HEIGHT_XATOL = 0.05
POISSON_TAIL = 1e-9
DEFAULT_HEIGHT_RANGE = (1.5, 60.0)

AUTO_HEIGHT = "auto"
CONFIG_HEIGHT = "config"

Option = Union[DeploymentOption, str]
HeightPolicy = Union[float, str]
HeightRange = Optional[Tuple[float, float]]


@dataclass(frozen=True)
class CapacityReport:
    option: DeploymentOption
    m_serving: int
    mean_se: float  # bit/s/Hz
    network_capacity: float  # bit/s
    user_capacity: float | None  # bit/s, None when not computed or undefined
    height_used: float
    provenance: str = "analytic"
    note: str = ""
    cycle: Optional[CycleResult] = None  # absent for serving-stage-only reports


@lru_cache(maxsize=8192)
def _mean_se(option, m, radius, density, body, radio, height, epsrel):
    pdf = link_distance_pdf(option, m, radius, DEFAULT_RESOLUTION)
    budget = LinkBudget.from_radio(radio)
    geom = BlockageGeometry.from_body(body, height)
    return pdf.integrate(lambda x: spectral_efficiency(budget, geom, x, density), epsrel=epsrel, epsabs=0.0)


def mean_se(option: Option, m: int, config: ScenarioConfig, height: float, tolerance: float = QUAD_EPSREL) -> float:
    """Mean bit/s/Hz of a random UE served by the nearest of M APs at ``height``."""
    option = DeploymentOption.parse(option)
    if m < 1:
        raise CapacityDomainError(f"mean SE needs at least one serving AP, got M={m}")
    area = config.area
    return _mean_se(option, m, area.radius, area.density, config.body, config.radio, float(height), tolerance)


def configured_height(option: Option, fleet: FleetModel) -> float:
    return fleet.h_a if DeploymentOption.parse(option) is DeploymentOption.AIRBORNE else fleet.h_l


def _search_bounds(config, h_range):
    low, high = h_range or DEFAULT_HEIGHT_RANGE
    low = max(low, config.body.h_u + HEIGHT_XATOL)
    if not (math.isfinite(low) and math.isfinite(high)) or low >= high:
        raise CapacityDomainError(f"empty height search range ({low}, {high}) above h_U={config.body.h_u} m")
    return float(low), float(high)


@lru_cache(maxsize=1024)
def _optimize_height(option, m, radius, density, body, radio, low, high):
    def se(h):
        value = _mean_se(option, m, radius, density, body, radio, float(h), QUAD_EPSREL)
        if not math.isfinite(value):
            raise CapacityDomainError(f"non-finite mean SE at height {h:.3f} m")
        return value

    result = optimize.minimize_scalar(lambda h: -se(h), bounds=(low, high), method="bounded", options={"xatol": HEIGHT_XATOL})
    # Brent never lands exactly on the bounds; monotone curves peak there.
    candidates = [(float(result.x), -float(result.fun)), (low, se(low)), (high, se(high))]
    best = max(candidates, key=lambda item: item[1])
    logger.debug(f"optimal {option.value} height for M={m}: {best[0]:.3f} m, SE={best[1]:.6f}")
    return best


def optimize_height(option: Option, m: int, config: ScenarioConfig, h_range: HeightRange = None) -> Tuple[float, float]:
    """(height, mean SE) maximizing the mean SE for M serving APs within ``h_range``."""
    option = DeploymentOption.parse(option)
    if m < 1:
        raise CapacityDomainError(f"height optimization needs at least one serving AP, got M={m}")
    low, high = _search_bounds(config, h_range)
    area = config.area
    return _optimize_height(option, m, area.radius, area.density, config.body, config.radio, low, high)


def resolve_height(option: Option, m: int, config: ScenarioConfig, height: HeightPolicy = AUTO_HEIGHT, h_range: HeightRange = None) -> float:
    """Height in meters for a height policy: a number, ``auto`` or ``config``."""
    if height == AUTO_HEIGHT:
        if m < 1:
            return configured_height(option, config.fleet)
        return optimize_height(option, m, config, h_range)[0]
    if height == CONFIG_HEIGHT:
        return configured_height(option, config.fleet)
    return float(height)


def serving_stage(
    option: Option,
    m: int,
    config: ScenarioConfig,
    height: HeightPolicy = AUTO_HEIGHT,
    h_range: HeightRange = None,
    cycle: Optional[CycleResult] = None,
) -> CapacityReport:
    """Metrics for exactly M serving APs, without the operation-cycle floor."""
    option = DeploymentOption.parse(option)
    h = resolve_height(option, m, config, height, h_range)
    if m < 1:
        return CapacityReport(option, 0, 0.0, 0.0, None, h, note="no guaranteed coverage", cycle=cycle)
    se = mean_se(option, m, config, h)
    return CapacityReport(option, m, se, m * config.radio.bandwidth_hz * se, None, h, cycle=cycle)


def network_capacity(option: Option, config: ScenarioConfig, height: HeightPolicy = AUTO_HEIGHT, h_range: HeightRange = None) -> CapacityReport:
    option = DeploymentOption.parse(option)
    cycle = serving_fraction(option, config.fleet, config.area.ell)
    report = serving_stage(option, cycle.n_serving, config, height, h_range, cycle=cycle)
    if report.m_serving == 0:
        logger.warning(f"{option.value}: rho={cycle.rho:.4f} leaves no guaranteed serving drone out of N={config.fleet.n}")
    return report


def poisson_weights(mean: float, tail: float = POISSON_TAIL) -> Tuple[np.ndarray, np.ndarray]:
    """K = 1..K_max and their Poisson probabilities, with P(K > K_max) < tail."""
    k_max = int(math.ceil(mean + 12.0 * math.sqrt(mean) + 20.0))
    while stats.poisson.sf(k_max, mean) >= tail:
        k_max *= 2
    ks = np.arange(1, k_max + 1)
    return ks, stats.poisson.pmf(ks, mean)


@lru_cache(maxsize=4096)
def _user_capacity(option, m, radius, density, body, radio, height):
    pdf = link_distance_pdf(option, m, radius, DEFAULT_RESOLUTION)
    budget = LinkBudget.from_radio(radio)
    geom = BlockageGeometry.from_body(body, height)
    area = math.pi * radius**2
    ks, weights = poisson_weights(density * area)
    share = weights / ks
    crowd = ks / area
    survive_self = 1.0 - geom.self_block_probability

    def rate(x):
        se_blocked, se_clear = branch_efficiencies(budget, geom, x)
        p_b = 1.0 - survive_self * np.exp(-2.0 * geom.r_b * crowd * (x * geom.shadow_slope + geom.r_b))
        per_k = p_b * se_blocked + (1.0 - p_b) * se_clear
        return radio.bandwidth_hz * m * float(np.dot(share, per_k))

    return pdf.integrate(rate, epsrel=QUAD_EPSREL, epsabs=0.0)


def serving_stage_user_capacity(option: Option, m: int, config: ScenarioConfig, height: float) -> float:
    """Mean per-user rate with M serving APs at a fixed height."""
    option = DeploymentOption.parse(option)
    if config.area.density <= 0:
        raise CapacityDomainError("user capacity is undefined for an empty area (lambda = 0)")
    if m < 1:
        return 0.0
    area = config.area
    return _user_capacity(option, m, area.radius, area.density, config.body, config.radio, float(height))


def user_capacity(option: Option, config: ScenarioConfig, height: HeightPolicy = AUTO_HEIGHT, h_range: HeightRange = None) -> float:
    """Mean per-user rate with the guaranteed serving drones, bit/s."""
    option = DeploymentOption.parse(option)
    if config.area.density <= 0:
        raise CapacityDomainError("user capacity is undefined for an empty area (lambda = 0)")
    cycle = serving_fraction(option, config.fleet, config.area.ell)
    h = resolve_height(option, cycle.n_serving, config, height, h_range)
    return serving_stage_user_capacity(option, cycle.n_serving, config, h)


def evaluate(option: Option, config: ScenarioConfig, height: HeightPolicy = AUTO_HEIGHT, h_range: HeightRange = None) -> CapacityReport:
    """Full report: cycle, network capacity and (when lambda > 0) user capacity."""
    report = network_capacity(option, config, height, h_range)
    if config.area.density <= 0:
        return report
    c_u = serving_stage_user_capacity(report.option, report.m_serving, config, report.height_used)
    return CapacityReport(
        report.option,
        report.m_serving,
        report.mean_se,
        report.network_capacity,
        c_u,
        report.height_used,
        report.provenance,
        report.note,
        report.cycle,
    )


@dataclass(frozen=True)
class BoundaryPoint:
    t_h: float
    ell_star: float | None
    status: str  # crossing, landed_always, airborne_always, infeasible, multiple_crossings


def airborne_better(config: ScenarioConfig, height: HeightPolicy = AUTO_HEIGHT, h_range: HeightRange = None) -> bool:
    airborne = network_capacity(DeploymentOption.AIRBORNE, config, height, h_range)
    landed = network_capacity(DeploymentOption.LANDED, config, height, h_range)
    return airborne.network_capacity > landed.network_capacity


def boundary_at(
    config: ScenarioConfig,
    t_h: float,
    ell_range: Tuple[float, float],
    n: int,
    height: HeightPolicy = AUTO_HEIGHT,
    h_range: HeightRange = None,
    samples: int = 48,
    ell_tol: float = 1.0,
) -> BoundaryPoint:
    """Charging distance where the better option flips, for one battery flight time."""
    config = with_values(config, {"fleet.t_h": float(t_h), "fleet.n": int(n)})
    low, high = ell_range
    high = min(high, config.fleet.reach_m * (1.0 - 1e-9))
    if low >= high:
        return BoundaryPoint(t_h, None, "infeasible")

    def better(ell):
        return airborne_better(with_values(config, {"area.ell": float(ell)}), height, h_range)

    grid = np.linspace(low, high, max(samples, 2))
    flags = [better(ell) for ell in grid]
    flips = [i for i in range(len(flags) - 1) if flags[i] != flags[i + 1]]
    if not flips:
        return BoundaryPoint(t_h, None, "airborne_always" if flags[0] else "landed_always")
    if len(flips) > 1:
        logger.error(f"T={t_h:g} h: {len(flips)} airborne/landed crossings in ell range; boundary is ambiguous")
        return BoundaryPoint(t_h, None, "multiple_crossings")

    i = flips[0]
    ell_star = optimize.bisect(lambda ell: 1.0 if better(ell) else -1.0, grid[i], grid[i + 1], xtol=ell_tol)
    logger.info(f"T={t_h:g} h: airborne/landed boundary at ell*={ell_star:.1f} m")
    return BoundaryPoint(t_h, float(ell_star), "crossing")


def _boundary_task(args):
    return boundary_at(*args)


def tradeoff_boundary(
    config: ScenarioConfig,
    t_values: Iterable[float],
    ell_range: Tuple[float, float],
    n: int,
    height: HeightPolicy = AUTO_HEIGHT,
    h_range: HeightRange = None,
    samples: int = 48,
    map_fn: Callable[..., Iterable[Any]] = map,
) -> List[BoundaryPoint]:
    """One BoundaryPoint per flight time; ``map_fn`` may be a process pool's ordered map."""
    tasks = [(config, float(t), tuple(ell_range), n, height, h_range, samples) for t in t_values]
    return list(map_fn(_boundary_task, tasks))


def min_drones_for_target(
    config: ScenarioConfig,
    target_user_capacity: float,
    t_h: float,
    option: Option,
    height: HeightPolicy = AUTO_HEIGHT,
    h_range: HeightRange = None,
) -> int:
    """Smallest fleet size N ≤ fleet.n_max whose user capacity reaches the target."""
    option = DeploymentOption.parse(option)
    if not target_user_capacity > 0:
        raise CapacityDomainError("target user capacity must be positive")
    config = with_values(config, {"fleet.t_h": float(t_h)})
    best = 0.0
    for n in range(1, config.fleet.n_max + 1):
        try:
            c_u = user_capacity(option, with_values(config, {"fleet.n": n}), height, h_range)
        except UnsupportedCountError as e:
            logger.warning(f"{option.value}: drone search stops at N={n}: {e}")
            break
        if c_u >= target_user_capacity:
            logger.info(f"{option.value}, T={t_h:g} h: {n} drones reach {target_user_capacity:.4g} bit/s")
            return n
        best = max(best, c_u)
    raise TargetUnreachableError(target_user_capacity, best, config.fleet.n_max)
