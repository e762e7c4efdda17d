"""Operation-cycle energy accounting: serving, en-route and charging stages.

A drone leaves the charging station with E = T·P_E, flies ℓ to the area,
serves until the remaining energy just covers the return flight and then
recharges for T_C. While serving it draws P_T (landed, engines off) or
P_T + P_H (airborne, hovering). Inputs are in the scenario units (m, km/h,
h, W) and are converted to SI here.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

from .exceptions import InfeasibleCycleError
from .geometry import DeploymentOption
from .scenario import FleetModel

logger = logging.getLogger("app_capacity")

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class CycleResult:
    option: DeploymentOption
    rho: float  # share of the cycle spent serving
    t_f_h: float  # one-way flight time, h
    t_s_h: float  # serving time per cycle, h
    n_serving: int


def serving_power(option: Union[DeploymentOption, str], fleet: FleetModel) -> float:
    """Power drawn while serving, W."""
    if DeploymentOption.parse(option) is DeploymentOption.AIRBORNE:
        return fleet.p_t + fleet.p_h
    return fleet.p_t


def serving_count(n: int, rho: float) -> int:
    """Drones guaranteed to be serving: ⌊N·ρ⌋."""
    # Relative guard so that N·(j/N) computed in floating point still floors to j.
    return int(math.floor(n * rho * (1.0 + 1e-12)))


def serving_fraction(option: Union[DeploymentOption, str], fleet: FleetModel, ell: float) -> CycleResult:
    option = DeploymentOption.parse(option)
    t = fleet.t_h * SECONDS_PER_HOUR
    t_c = fleet.t_c_h * SECONDS_PER_HOUR
    nu = fleet.nu_kmh / 3.6
    p_drain = serving_power(option, fleet)

    reach = fleet.reach_m
    if ell >= reach:
        raise InfeasibleCycleError(ell, reach)

    numerator = t * fleet.p_e * nu - 2.0 * fleet.p_e * ell
    denominator = t * fleet.p_e * nu + 2.0 * ell * (p_drain - fleet.p_e) + t_c * nu * p_drain
    rho = numerator / denominator

    t_f = ell / nu
    t_s = (t * fleet.p_e - 2.0 * t_f * fleet.p_e) / p_drain
    result = CycleResult(
        option=option,
        rho=rho,
        t_f_h=t_f / SECONDS_PER_HOUR,
        t_s_h=t_s / SECONDS_PER_HOUR,
        n_serving=serving_count(fleet.n, rho),
    )
    logger.debug(f"{option.value} cycle at ell={ell:.1f} m: rho={rho:.6f}, N_serving={result.n_serving}")
    return result


def rho_ratio(fleet: FleetModel, ell: float) -> float:
    """ρ_L / ρ_A for the same fleet and charging distance."""
    landed = serving_fraction(DeploymentOption.LANDED, fleet, ell)
    airborne = serving_fraction(DeploymentOption.AIRBORNE, fleet, ell)
    return landed.rho / airborne.rho
