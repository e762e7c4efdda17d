"""AP placements and the PDF of the UE-to-nearest-AP 2D distance.

Every AP serves the circular sector of angle 2π/M it sits in. The density of
the distance X from a uniform UE in that sector to its AP is the length of
the circle of radius x around the AP that lies inside the sector, divided by
the sector area Q = πR²/M. Two constructions are provided:

* ``pdf_closed_form``: the three-branch formulas for the airborne five-AP
  ring and for landed rings of three or more APs;
* ``pdf_numeric``: the same arc length for any layout of 1..6 APs, obtained
  from the exact intersection angles of the circle with the sector boundary.

Both are checked for normalization when built.
"""

import enum
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate

from .exceptions import GeometryError, UnsupportedCountError
from .scenario import ScenarioConfig

logger = logging.getLogger("app_capacity")

TWO_PI = 2.0 * math.pi
MAX_APS = 6
DEFAULT_RESOLUTION = 4096
NORMALIZATION_TOL = 1e-9


class DeploymentOption(enum.Enum):
    AIRBORNE = "airborne"
    LANDED = "landed"

    @classmethod
    def parse(cls, value: Union["DeploymentOption", str]) -> "DeploymentOption":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown deployment option {value!r} (expected airborne or landed)") from None


# Optimal circle-in-circle packing radii as fractions of R.
_PACKING_RATIOS = {
    1: 1.0,
    2: 0.5,
    3: 2.0 * math.sqrt(3.0) - 3.0,
    4: math.sqrt(2.0) - 1.0,
    5: 1.0 / (1.0 + math.sqrt(2.0 + 2.0 / math.sqrt(5.0))),
    6: 1.0 / 3.0,
}


def packing_radius(m: int, radius: float) -> float:
    """Radius r_A of M equal circles densely packed in a disc of radius R."""
    if m not in _PACKING_RATIOS:
        raise UnsupportedCountError(f"no circle packing for M={m} (supported: 1..{MAX_APS})")
    return _PACKING_RATIOS[m] * radius


@dataclass(frozen=True)
class DeploymentLayout:
    option: DeploymentOption
    m: int
    ap_xy: tuple  # ((x, y), ...) in meters, area center at the origin
    height: float
    r_pack: float  # r_A for airborne, r_L = R sin(π/M) for landed
    sector_angle: float

    def coordinates(self) -> np.ndarray:
        return np.array(self.ap_xy, dtype=float).reshape(-1, 2)


def ring_radius(option: DeploymentOption, m: int, radius: float) -> float:
    """Distance from the area center to every AP of the layout."""
    if option is DeploymentOption.LANDED:
        return radius
    if m == 1:
        return 0.0
    return radius - packing_radius(m, radius)


def make_layout(option: Union[DeploymentOption, str], m: int, config: ScenarioConfig, height: float) -> DeploymentLayout:
    option = DeploymentOption.parse(option)
    if not 1 <= m <= MAX_APS:
        raise UnsupportedCountError(f"no layout for M={m} (supported: 1..{MAX_APS})")
    radius = config.area.radius
    ring = ring_radius(option, m, radius)
    angles = TWO_PI * np.arange(m) / m
    ap_xy = tuple((float(ring * math.cos(a)), float(ring * math.sin(a))) for a in angles)
    if option is DeploymentOption.AIRBORNE:
        r_pack = packing_radius(m, radius)
    else:
        r_pack = radius * math.sin(math.pi / m)
    return DeploymentLayout(option, m, ap_xy, float(height), r_pack, TWO_PI / m)


def nearest_ap(points: np.ndarray, layout: DeploymentLayout) -> Tuple[np.ndarray, np.ndarray]:
    """Index of the nearest AP (ties go to the lower index) and the 2D distance to it."""
    aps = layout.coordinates()
    dist = np.hypot(points[:, None, 0] - aps[None, :, 0], points[:, None, 1] - aps[None, :, 1])
    index = np.argmin(dist, axis=1)
    return index, dist[np.arange(len(points)), index]


@dataclass(frozen=True)
class SectorGeometry:
    """One serving sector, rotated so that its AP lies on the positive x axis."""

    radius: float
    ap_offset: float  # D, distance from the area center to the AP
    half_angle: float  # β = π/M
    m: int

    @classmethod
    def for_layout(cls, option: DeploymentOption, m: int, radius: float) -> "SectorGeometry":
        if m < 1:
            raise GeometryError(f"degenerate sector for M={m}")
        return cls(radius, ring_radius(option, m, radius), math.pi / m, m)

    @property
    def area(self):
        return math.pi * self.radius**2 / self.m

    @property
    def corner_distance(self):
        """Distance from the AP to the sector corner on the boundary circle."""
        d, r = self.ap_offset, self.radius
        return math.sqrt(max(d * d + r * r - 2.0 * d * r * math.cos(self.half_angle), 0.0))

    @property
    def x_max(self):
        return max(self.ap_offset, self.corner_distance)

    def breakpoints(self):
        """Distances where the circle around the AP changes how it crosses the sector boundary."""
        d, r, beta = self.ap_offset, self.radius, self.half_angle
        candidates = []
        if d > 0:
            candidates.append(r - d)
        if self.m >= 2:
            candidates += [d * math.sin(beta), self.corner_distance, d]
        x_max = self.x_max
        tol = 1e-9 * r
        points = [0.0]
        for b in sorted(candidates):
            if tol < b < x_max - tol and b - points[-1] > tol:
                points.append(b)
        points.append(x_max)
        return tuple(points)

    def _inside(self, px, py):
        tol = 1e-12 * self.radius
        if px * px + py * py > self.radius**2 + tol * self.radius:
            return False
        if self.m == 1:
            return True
        sin_b, cos_b = math.sin(self.half_angle), math.cos(self.half_angle)
        return px * sin_b - py * cos_b >= -tol and px * sin_b + py * cos_b >= -tol

    def inside_angle(self, x):
        """Total angle of the circle of radius x around the AP that lies in the sector."""
        if x <= 0.0:
            return TWO_PI
        d, r = self.ap_offset, self.radius
        cuts = [0.0, TWO_PI]

        if d > 0:
            c = (r * r - d * d - x * x) / (2.0 * d * x)
            if -1.0 < c < 1.0:
                a = math.acos(c)
                cuts += [a, TWO_PI - a]

        if self.m >= 2:
            h = d * math.sin(self.half_angle)
            if x > h:
                root = math.sqrt(x * x - h * h)
                along = d * math.cos(self.half_angle)
                for sign in (1.0, -1.0):
                    ux, uy = math.cos(self.half_angle), sign * math.sin(self.half_angle)
                    for t in (along - root, along + root):
                        cuts.append(math.atan2(t * uy, t * ux - d) % TWO_PI)

        cuts.sort()
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi - lo <= 0.0:
                continue
            mid = 0.5 * (lo + hi)
            if self._inside(d + x * math.cos(mid), x * math.sin(mid)):
                total += hi - lo
        return total

    def arc_density(self, x):
        if x < 0.0 or x > self.x_max:
            return 0.0
        return x * self.inside_angle(x) / self.area


def _acos(value):
    return math.acos(min(1.0, max(-1.0, value)))


def _airborne_ring_density(sector):
    """Three-branch density of the airborne ring: disc, disc minus cut-offs, wedge near the center."""
    r, d, beta = sector.radius, sector.ap_offset, sector.half_angle
    r_a = r - d
    q = sector.area
    psi = (math.pi - beta) / 2.0
    chord = 2.0 * r * math.sin(beta / 2.0)
    d_a = math.sqrt(r_a**2 + chord**2 - 2.0 * r_a * chord * math.cos(psi))

    def l1(x):
        # arc beyond the boundary circle
        return 2.0 * x * _acos((r * r - d * d - x * x) / (2.0 * d * x))

    def l2(x):
        # arc beyond one sector edge
        return 2.0 * x * _acos(r_a / x)

    def l3(x):
        # arc between the two sector edges on the center side
        return 2.0 * x * (math.pi / 2.0 - beta - _acos(r_a / x))

    def density(x):
        if x < 0.0 or x > d:
            return 0.0
        if x < r_a:
            return TWO_PI * x / q
        if x < d_a:
            return (TWO_PI * x - l1(x) - 2.0 * l2(x)) / q
        return l3(x) / q

    return density, (0.0, r_a, d_a, d)


def _landed_ring_density(sector):
    r, beta = sector.radius, sector.half_angle
    q = sector.area
    r_l = r * math.sin(beta)
    d_l = r * math.sqrt(2.0 - 2.0 * math.cos(beta))

    def l4(x):
        return 4.0 * x * _acos(r_l / x)

    def l5(x):
        return x * (math.pi - 2.0 * beta - 2.0 * _acos(r_l / x))

    def density(x):
        if x < 0.0 or x > r:
            return 0.0
        inside_disc = 2.0 * x * _acos(x / (2.0 * r))
        if x < r_l:
            return inside_disc / q
        if x < d_l:
            return (inside_disc - l4(x)) / q
        return l5(x) / q

    return density, (0.0, r_l, d_l, r)


class LinkDistancePdf:
    """Density of the 2D UE-to-AP distance with a tabulated CDF for sampling.

    ``density`` is exact at every x; the piecewise-linear table on a grid that
    contains every breakpoint backs the CDF, sampling and CSV dumps.
    """

    def __init__(self, option, m, radius, breakpoints, density_fn, resolution, source):
        self.option = option
        self.m = m
        self.radius = radius
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.x_max = self.breakpoints[-1]
        self.source = source
        self._density_fn = density_fn

        self.grid_x = branch_grid(self.breakpoints, resolution)
        self.grid_f = np.array([density_fn(x) for x in self.grid_x])
        cdf = integrate.cumulative_trapezoid(self.grid_f, self.grid_x, initial=0.0)
        if abs(cdf[-1] - 1.0) > 1e-6:
            logger.warning(f"{self}: tabulated CDF ends at {cdf[-1]:.9f}")
        self.grid_cdf = cdf / cdf[-1]

    def __repr__(self):
        return f"LinkDistancePdf({self.option.value}, M={self.m}, R={self.radius:g}, {self.source})"

    def branches(self):
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))

    def density(self, x):
        if np.ndim(x) == 0:
            return self._density_fn(float(x))
        return np.array([self._density_fn(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    def interpolated(self, x):
        return np.interp(x, self.grid_x, self.grid_f, left=0.0, right=0.0)

    def cdf(self, x):
        return np.interp(x, self.grid_x, self.grid_cdf, left=0.0, right=1.0)

    def integrate(self, func: Callable[[float], float], epsrel: float = 1e-10, epsabs: float = 1e-13) -> float:
        """∫ func(x) f(x) dx over the support, split at every breakpoint."""
        total = 0.0
        for lo, hi in self.branches():
            value, _ = integrate.quad(lambda x: func(x) * self._density_fn(x), lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
            total += value
        return total

    def total_mass(self) -> float:
        return self.integrate(lambda x: 1.0, epsrel=1e-12, epsabs=1e-14)

    def mean(self) -> float:
        return self.integrate(lambda x: x)


def branch_grid(breakpoints: Tuple[float, ...], resolution: int) -> np.ndarray:
    """Cosine-spaced points on every branch, denser next to the breakpoints."""
    n_branches = len(breakpoints) - 1
    per_branch = max(resolution // n_branches, 16)
    u = (1.0 - np.cos(np.linspace(0.0, math.pi, per_branch))) / 2.0
    pieces = [lo + (hi - lo) * u[:-1] for lo, hi in zip(breakpoints[:-1], breakpoints[1:])]
    pieces.append(np.array([breakpoints[-1]]))
    return np.concatenate(pieces)


def _distinct(points, radius):
    kept = [points[0]]
    for b in points[1:]:
        if b - kept[-1] > 1e-9 * radius:
            kept.append(b)
    kept[-1] = points[-1]
    return tuple(kept)


def _checked(pdf):
    mass = pdf.total_mass()
    if abs(mass - 1.0) > NORMALIZATION_TOL:
        raise GeometryError(f"{pdf} integrates to {mass:.12f}")
    logger.debug(f"{pdf} built, breakpoints={[round(b, 4) for b in pdf.breakpoints]}")
    return pdf


def pdf_closed_form(option: Union[DeploymentOption, str], m: int, radius: float, resolution: int = DEFAULT_RESOLUTION) -> LinkDistancePdf:
    option = DeploymentOption.parse(option)
    if option is DeploymentOption.AIRBORNE and m == 5:
        density, breakpoints = _airborne_ring_density(SectorGeometry.for_layout(option, m, radius))
    elif option is DeploymentOption.LANDED and 3 <= m <= MAX_APS:
        density, breakpoints = _landed_ring_density(SectorGeometry.for_layout(option, m, radius))
    else:
        raise UnsupportedCountError(f"no closed form for {option.value} M={m}; use pdf_numeric")
    # d_L = R for M = 3 collapses the last branch.
    breakpoints = _distinct(breakpoints, radius)
    return _checked(LinkDistancePdf(option, m, radius, breakpoints, density, resolution, "closed_form"))


def pdf_numeric(option: Union[DeploymentOption, str], m: int, radius: float, resolution: int = DEFAULT_RESOLUTION) -> LinkDistancePdf:
    option = DeploymentOption.parse(option)
    if m < 1:
        raise GeometryError(f"degenerate sector for M={m}")
    if m > MAX_APS:
        raise UnsupportedCountError(f"no layout for M={m} (supported: 1..{MAX_APS})")
    sector = SectorGeometry.for_layout(option, m, radius)
    return _checked(LinkDistancePdf(option, m, radius, sector.breakpoints(), sector.arc_density, resolution, "numeric"))


@lru_cache(maxsize=128)
def link_distance_pdf(option: DeploymentOption, m: int, radius: float, resolution: int = DEFAULT_RESOLUTION) -> LinkDistancePdf:
    """Closed form where one exists, numeric arc length otherwise."""
    try:
        return pdf_closed_form(option, m, radius, resolution)
    except UnsupportedCountError:
        return pdf_numeric(option, m, radius, resolution)


def sample_distance(pdf: LinkDistancePdf, rng: np.random.Generator, size: Optional[int] = None) -> Union[float, np.ndarray]:
    """Inverse-CDF draws from the tabulated distribution; ``rng`` is a numpy Generator."""
    u = rng.random(size)
    return np.interp(u, pdf.grid_cdf, pdf.grid_x)
