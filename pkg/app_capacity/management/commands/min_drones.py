import numpy as np
from django.core.management.base import CommandError

from app_capacity.exceptions import CapacityDomainError
from app_capacity.management.base import EXIT_CONFIG_ERROR, CapacityCommand, height_policy, option_list
from app_capacity.sweeps import MIN_DRONES_HEADER, run_min_drones, write_csv


class Command(CapacityCommand):
    help = "Smallest fleet size N whose user capacity reaches a target, per flight time T and option"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--target-bps", type=float, required=True, help="Target user capacity, bit/s")
        parser.add_argument("--t-from", type=float, default=0.5, help="First flight time T, hours")
        parser.add_argument("--t-to", type=float, default=5.0, help="Last flight time T, hours")
        parser.add_argument("--t-steps", type=int, default=10, help="Number of T grid points")
        parser.add_argument("--out", type=str, help="CSV file; stdout when omitted")
        parser.add_argument("--workers", type=int, default=0, help="Worker processes (default: UAVCAP_WORKERS)")

    def handle(self, *args, **options):
        config = self.load_scenario(options)
        height = height_policy(options["height"])
        if not 0 < options["t_from"] <= options["t_to"] or options["t_steps"] < 1:
            raise CommandError("need 0 < --t-from ≤ --t-to and --t-steps ≥ 1", returncode=EXIT_CONFIG_ERROR)
        if config.area.density <= 0:
            raise CommandError("user capacity is undefined for area.density = 0", returncode=EXIT_CONFIG_ERROR)

        t_values = np.linspace(options["t_from"], options["t_to"], options["t_steps"])
        try:
            with self.mapper(options["workers"]) as map_fn:
                rows = run_min_drones(
                    config,
                    options["target_bps"],
                    t_values,
                    option_list(options["option"]),
                    height,
                    self.height_range,
                    map_fn,
                )
        except CapacityDomainError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)

        self.write_output(options.get("out"), lambda stream: write_csv(stream, MIN_DRONES_HEADER, rows))
        reached = sum(1 for row in rows if row[-1] == "ok")
        self.stderr.write(f"{reached} of {len(rows)} points reach {options['target_bps']:.4g} bit/s with at most fleet.n_max={config.fleet.n_max} drones")
