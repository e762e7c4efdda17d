import argparse

import numpy as np
from django.conf import settings
from django.core.management.base import CommandError

from app_capacity.capacity import resolve_height, serving_stage, serving_stage_user_capacity
from app_capacity.channel import BlockageGeometry, blockage_probability
from app_capacity.exceptions import CapacityDomainError, UnsupportedCountError
from app_capacity.geometry import link_distance_pdf
from app_capacity.management.base import (
    EXIT_CONFIG_ERROR,
    EXIT_VALIDATION_FAILED,
    CapacityCommand,
    height_policy,
    option_list,
)
from app_capacity.scenario import with_values
from app_capacity.simulate import SimConfig, simulate_blockage, simulate_mean_se, simulate_user_capacity
from app_capacity.sweeps import write_csv

REPORT_HEADER = ["quantity", "option", "analytic", "montecarlo", "ci95", "rel_error", "tolerance", "ok"]
SE_TOLERANCE = 0.02
BLOCKAGE_TOLERANCE = 0.02
USER_CAPACITY_TOLERANCE = 0.03
# Quantiles of the link-distance distribution where p_B is checked.
BLOCKAGE_QUANTILES = (0.1, 0.3, 0.5, 0.7, 0.9)


class Command(CapacityCommand):
    help = "Compare analytic mean SE, blockage probability and user capacity with Monte Carlo estimates"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--m", type=int, default=5, help="Number of serving APs M (1..6)")
        parser.add_argument("--seed", type=int, default=None, help="Unsigned 64-bit seed (default: UAVCAP_SIM_SEED)")
        parser.add_argument("--reps", type=int, default=None, help="Replications (default: UAVCAP_SIM_REPLICATIONS)")
        parser.add_argument("--drops", type=int, default=None, help="Drops per replication (default: UAVCAP_SIM_DROPS)")
        parser.add_argument("--out", type=str, help="Write the report table to this file instead of stdout")
        parser.add_argument("--workers", type=int, default=0, help="Worker processes (default: UAVCAP_WORKERS)")
        # Negative control: shifts the analytic antenna gain only.
        parser.add_argument("--analytic-gain-offset-db", type=float, default=0.0, help=argparse.SUPPRESS)

    def handle(self, *args, **options):
        config = self.load_scenario(options)
        height = height_policy(options["height"])
        uavcap = settings.UAVCAP
        try:
            sim = SimConfig(
                replications=options["reps"] or uavcap["SIM_REPLICATIONS"],
                seed=uavcap["SIM_SEED"] if options["seed"] is None else options["seed"],
                drops_per_replication=options["drops"] or uavcap["SIM_DROPS"],
            )
        except CapacityDomainError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)

        analytic = config
        if options["analytic_gain_offset_db"]:
            analytic = with_values(config, {"radio.g_a_db": config.radio.g_a_db + options["analytic_gain_offset_db"]})

        rows = []
        try:
            with self.mapper(options["workers"]) as map_fn:
                for option in option_list(options["option"]):
                    rows += self.compare(option, options["m"], config, analytic, height, sim, map_fn)
        except (CapacityDomainError, UnsupportedCountError) as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)

        self.write_output(options.get("out"), lambda stream: write_csv(stream, REPORT_HEADER, rows))
        offenders = [f"{row[0]} ({row[1]}): {row[5]} > {row[6]}" for row in rows if row[-1] == "no"]
        if offenders:
            raise CommandError("validation failed: " + "; ".join(offenders), returncode=EXIT_VALIDATION_FAILED)
        self.stderr.write(self.style.SUCCESS(f"all {len(rows)} checks within tolerance"))

    def compare(self, option, m, config, analytic, height, sim, map_fn):
        # The height is chosen on the unperturbed scenario so that both sides see the same geometry.
        h = resolve_height(option, m, config, height, self.height_range)
        rows = []

        se = serving_stage(option, m, analytic, h).mean_se
        rows.append(self.row("mean_se", option, se, simulate_mean_se(option, m, config, h, sim, map_fn), SE_TOLERANCE))

        pdf = link_distance_pdf(option, m, config.area.radius)
        geom = BlockageGeometry.from_body(config.body, h)
        for q in BLOCKAGE_QUANTILES:
            x = float(np.interp(q, pdf.grid_cdf, pdf.grid_x))
            p_b = blockage_probability(geom, x, config.area.density)
            rows.append(self.row(f"p_B(x={x:.2f})", option, p_b, simulate_blockage(config, sim, x, h, map_fn=map_fn), BLOCKAGE_TOLERANCE))

        if config.area.density > 0:
            c_u = serving_stage_user_capacity(option, m, analytic, h)
            mc = simulate_user_capacity(option, config, h, sim, m=m, map_fn=map_fn)
            rows.append(self.row("user_capacity", option, c_u, mc, USER_CAPACITY_TOLERANCE))
        return rows

    @staticmethod
    def row(quantity, option, analytic, estimate, tolerance):
        error = estimate.relative_error(analytic)
        return [
            quantity,
            option.value,
            f"{analytic:.8g}",
            f"{estimate.mean:.8g}",
            f"{estimate.ci95_halfwidth:.3g}",
            f"{error:.3e}",
            f"{tolerance:g}",
            "yes" if error <= tolerance else "no",
        ]
