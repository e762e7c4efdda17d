"""Noise-limited mmWave link: path loss, human-body blockage and spectral efficiency.

Attenuation follows the 3GPP UMi street-canyon LoS fit A_N = 10^-3.24 f_C^-2
with f_C in GHz and distances in meters. A blocked LoS link loses a further
``blockage_loss_db``. The blockage probability combines pedestrians dropped
as a Poisson process in front of the UE with a self-blockage cone.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .exceptions import ChannelDomainError
from .scenario import BodyModel, RadioModel

FloatOrArray = Union[float, np.ndarray]


def db_to_linear(db: FloatOrArray) -> np.ndarray:
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(value: FloatOrArray) -> np.ndarray:
    return 10.0 * np.log10(value)


def dbm_to_watts(dbm: FloatOrArray) -> np.ndarray:
    return db_to_linear(dbm) / 1000.0


def thermal_noise_dbm(bandwidth_hz: float) -> float:
    """Thermal noise over the band at 290 K: -174 dBm/Hz + 10 log10(B)."""
    return -174.0 + 10.0 * math.log10(bandwidth_hz)


def attenuation_coefficient(f_c_ghz: float) -> float:
    return 10.0 ** -3.24 * f_c_ghz**-2


@dataclass(frozen=True)
class LinkBudget:
    eirp_linear: float  # P_A G_A G_U, W
    a_n: float
    a_b: float
    gamma: float
    noise_linear: float  # N0 N_F, W

    @classmethod
    def from_radio(cls, radio: RadioModel) -> "LinkBudget":
        a_n = attenuation_coefficient(radio.f_c_ghz)
        return cls(
            eirp_linear=float(dbm_to_watts(radio.p_a_dbm + radio.g_a_db + radio.g_u_db)),
            a_n=a_n,
            a_b=a_n * float(db_to_linear(-radio.blockage_loss_db)),
            gamma=radio.gamma,
            noise_linear=float(dbm_to_watts(radio.n0_dbm + radio.nf_db)),
        )


@dataclass(frozen=True)
class BlockageGeometry:
    h_t: float  # AP height above the UE plane, m
    shadow_slope: float  # (h_B - h_U) / h_T
    self_block_angle: float  # arcsin(r_B / (r_B + r_U)), rad
    r_b: float

    @classmethod
    def from_body(cls, body: BodyModel, service_height: float) -> "BlockageGeometry":
        h_t = service_height - body.h_u
        if h_t <= 0:
            raise ChannelDomainError(f"service height {service_height} m is not above the UE plane ({body.h_u} m)")
        return cls(
            h_t=h_t,
            shadow_slope=(body.h_b - body.h_u) / h_t,
            self_block_angle=math.asin(body.r_b / (body.r_b + body.r_u)),
            r_b=body.r_b,
        )

    @property
    def self_block_probability(self) -> float:
        return self.self_block_angle / (2.0 * math.pi)

    def shadow_length(self, x: FloatOrArray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.shadow_slope


def received_power(budget: LinkBudget, d: FloatOrArray, blocked: Union[bool, np.ndarray]) -> FloatOrArray:
    """Received power in watts at 3D distance d."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ChannelDomainError("3D distance must be positive")
    attenuation = np.where(blocked, budget.a_b, budget.a_n)
    power = budget.eirp_linear * attenuation * d ** (-budget.gamma)
    return float(power) if power.ndim == 0 else power


def link_distance(geom: BlockageGeometry, x: FloatOrArray) -> np.ndarray:
    return np.hypot(np.asarray(x, dtype=float), geom.h_t)


def blockage_probability(geom: BlockageGeometry, x: FloatOrArray, density: FloatOrArray) -> FloatOrArray:
    """Probability that the LoS link of a UE at 2D distance x is blocked."""
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    survive_self = 1.0 - geom.self_block_probability
    survive_crowd = np.exp(-2.0 * geom.r_b * density * (x * geom.shadow_slope + geom.r_b))
    p = 1.0 - survive_self * survive_crowd
    return float(p) if p.ndim == 0 else p


def branch_efficiencies(budget: LinkBudget, geom: BlockageGeometry, x: FloatOrArray) -> Tuple[np.ndarray, np.ndarray]:
    """(blocked, non-blocked) log2(1 + SNR) at 2D distance x."""
    d = link_distance(geom, x)
    se_blocked = np.log2(1.0 + received_power(budget, d, True) / budget.noise_linear)
    se_clear = np.log2(1.0 + received_power(budget, d, False) / budget.noise_linear)
    return se_blocked, se_clear


def spectral_efficiency(budget: LinkBudget, geom: BlockageGeometry, x: FloatOrArray, density: FloatOrArray) -> FloatOrArray:
    """Mean bit/s/Hz at 2D distance x, mixing blocked and clear LoS by p_B."""
    p_b = blockage_probability(geom, x, density)
    se_blocked, se_clear = branch_efficiencies(budget, geom, x)
    se = p_b * se_blocked + (1.0 - p_b) * se_clear
    return float(se) if np.ndim(se) == 0 else se
