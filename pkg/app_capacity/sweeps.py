"""Grid evaluation behind the sweep, boundary, min_drones and evaluate commands.

Everything here is importable without Django so that grid points can be
farmed out to worker processes; rows always come back in grid order.
"""

import csv
import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .capacity import (
    AUTO_HEIGHT,
    BoundaryPoint,
    CapacityReport,
    evaluate,
    min_drones_for_target,
    serving_stage,
    serving_stage_user_capacity,
    user_capacity,
)
from .exceptions import (
    CapacityDomainError,
    ChannelDomainError,
    InfeasibleCycleError,
    TargetUnreachableError,
    UnsupportedCountError,
)
from .geometry import DeploymentOption, LinkDistancePdf
from .lifecycle import rho_ratio
from .scenario import ScenarioConfig, validate, with_values

logger = logging.getLogger("app_capacity")

SWEEP_VARIABLES = ("height", "M", "ell", "lambda", "T", "N")
INTEGER_VARIABLES = ("M", "N")
SCENARIO_KEYS = {"ell": "area.ell", "lambda": "area.density", "T": "fleet.t_h", "N": "fleet.n"}

SWEEP_HEADER = [
    "variable",
    "value",
    "option",
    "height_m",
    "rho",
    "n_serving",
    "mean_se_bps_hz",
    "network_capacity_bps",
    "user_capacity_bps",
    "rho_ratio",
    "status",
]
BOUNDARY_HEADER = ["T_h", "ell_star_m", "status"]
MIN_DRONES_HEADER = ["T_h", "option", "n_min", "user_capacity_bps", "status"]
PDF_HEADER = ["x_m", "pdf", "cdf"]

Row = List[str]
MapFn = Callable[[Callable[[Any], Any], Iterable[Any]], Iterable[Any]]


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    steps: int
    options: tuple = (DeploymentOption.AIRBORNE, DeploymentOption.LANDED)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise CapacityDomainError(f"unknown sweep variable {self.variable!r} (expected one of {', '.join(SWEEP_VARIABLES)})")
        if not self.start < self.stop:
            raise CapacityDomainError(f"sweep needs start < stop, got {self.start} and {self.stop}")
        if self.steps < 2:
            raise CapacityDomainError(f"sweep needs at least 2 steps, got {self.steps}")
        if not self.options:
            raise CapacityDomainError("sweep needs at least one option")

    def grid(self) -> List[float]:
        values = np.linspace(self.start, self.stop, self.steps)
        if self.variable in INTEGER_VARIABLES:
            # Rounded grids can repeat a count; each one is evaluated once.
            return [int(v) for v in np.unique(np.round(values))]
        return [float(v) for v in values]


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def report_row(
    variable: str,
    value: Optional[float],
    report: CapacityReport,
    status: str = "ok",
    ratio: Optional[float] = None,
) -> Row:
    """``ratio`` is ρ_L/ρ_A of the scenario behind the row, when it has an operation cycle."""
    cycle = report.cycle
    return [
        variable,
        _fmt(value),
        report.option.value,
        _fmt(report.height_used),
        _fmt(cycle.rho if cycle is not None else None),
        _fmt(report.m_serving),
        _fmt(report.mean_se),
        _fmt(report.network_capacity),
        _fmt(report.user_capacity),
        _fmt(ratio),
        "no_coverage" if status == "ok" and report.m_serving == 0 else status,
    ]


def empty_row(variable: str, value: Optional[float], option: DeploymentOption, status: str) -> Row:
    return [variable, _fmt(value), option.value] + [""] * (len(SWEEP_HEADER) - 4) + [status]


def scenario_rho_ratio(config: ScenarioConfig) -> float:
    return rho_ratio(config.fleet, config.area.ell)


def _serving_stage_report(option, m, config, height, h_range):
    report = serving_stage(option, m, config, height, h_range)
    if config.area.density <= 0:
        return report
    return replace(report, user_capacity=serving_stage_user_capacity(option, m, config, report.height_used))


def evaluate_point(task: tuple) -> Row:
    """One CSV row for (variable, value, option); bad points become status rows."""
    config, variable, value, option, height, h_range = task
    try:
        if variable == "M":
            return report_row(variable, value, _serving_stage_report(option, int(value), config, height, h_range))
        if variable == "height":
            report = evaluate(option, config, float(value), h_range)
            return report_row(variable, value, report, ratio=scenario_rho_ratio(config))

        point = with_values(config, {SCENARIO_KEYS[variable]: int(value) if variable == "N" else float(value)})
        violations = validate(point)
        if violations:
            status = "infeasible" if all("infeasible cycle" in v.rule for v in violations) else "invalid"
            logger.warning(f"sweep {variable}={value}: {'; '.join(str(v) for v in violations)}")
            return empty_row(variable, value, option, status)
        return report_row(variable, value, evaluate(option, point, height, h_range), ratio=scenario_rho_ratio(point))
    except InfeasibleCycleError as e:
        logger.warning(f"sweep {variable}={value}: {e}")
        return empty_row(variable, value, option, "infeasible")
    except UnsupportedCountError as e:
        logger.warning(f"sweep {variable}={value}, {option.value}: {e}")
        return empty_row(variable, value, option, "unsupported")
    except ChannelDomainError as e:
        logger.warning(f"sweep {variable}={value}, {option.value}: {e}")
        return empty_row(variable, value, option, "invalid")


def run_sweep(
    config: ScenarioConfig,
    spec: SweepSpec,
    height: Any = AUTO_HEIGHT,
    h_range: Optional[Tuple[float, float]] = None,
    map_fn: MapFn = map,
) -> List[Row]:
    tasks = [(config, spec.variable, value, option, height, h_range) for value in spec.grid() for option in spec.options]
    logger.info(f"sweep {spec.variable} over {len(tasks)} points")
    rows = list(map_fn(evaluate_point, tasks))
    logger.info(f"sweep {spec.variable} finished")
    return rows


def min_drones_point(task: tuple) -> Row:
    """Smallest fleet for one (T, option); unreachable targets keep the best rate seen."""
    config, t_h, option, target_bps, height, h_range = task
    try:
        n = min_drones_for_target(config, target_bps, t_h, option, height, h_range)
    except TargetUnreachableError as e:
        logger.warning(f"min drones T={t_h:g} h, {option.value}: {e}")
        return [_fmt(t_h), option.value, "", _fmt(e.best_bps), "unreachable"]
    except InfeasibleCycleError as e:
        logger.warning(f"min drones T={t_h:g} h, {option.value}: {e}")
        return [_fmt(t_h), option.value, "", "", "infeasible"]
    point = with_values(config, {"fleet.t_h": float(t_h), "fleet.n": n})
    return [_fmt(t_h), option.value, _fmt(n), _fmt(user_capacity(option, point, height, h_range)), "ok"]


def run_min_drones(
    config: ScenarioConfig,
    target_bps: float,
    t_values: Sequence[float],
    options: Sequence[DeploymentOption],
    height: Any = AUTO_HEIGHT,
    h_range: Optional[Tuple[float, float]] = None,
    map_fn: MapFn = map,
) -> List[Row]:
    if not target_bps > 0:
        raise CapacityDomainError("target user capacity must be positive")
    tasks = [(config, float(t), option, float(target_bps), height, h_range) for t in t_values for option in options]
    logger.info(f"min drones for {target_bps:.4g} bit/s over {len(tasks)} points")
    return list(map_fn(min_drones_point, tasks))


def boundary_rows(points: Iterable[BoundaryPoint]) -> List[Row]:
    return [[_fmt(p.t_h), _fmt(p.ell_star), p.status] for p in points]


def pdf_rows(pdf: LinkDistancePdf) -> List[Row]:
    return [[_fmt(x), _fmt(f), _fmt(c)] for x, f, c in zip(pdf.grid_x, pdf.grid_f, pdf.grid_cdf)]


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Row]) -> None:
    """Comma-separated, '.' decimals, LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
