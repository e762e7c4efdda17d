import numpy as np
from django.conf import settings
from django.core.management.base import CommandError

from app_capacity.capacity import tradeoff_boundary
from app_capacity.exceptions import UnsupportedCountError
from app_capacity.management.base import EXIT_CONFIG_ERROR, CapacityCommand, height_policy
from app_capacity.sweeps import BOUNDARY_HEADER, boundary_rows, write_csv


class Command(CapacityCommand):
    help = "Charging distance ℓ* where airborne and landed network capacity cross, per flight time T"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--t-from", type=float, default=1.0, help="First flight time T, hours")
        parser.add_argument("--t-to", type=float, default=5.0, help="Last flight time T, hours")
        parser.add_argument("--t-steps", type=int, default=9, help="Number of T grid points (≥ 2)")
        parser.add_argument("--ell-from", type=float, default=0.0, help="Shortest charging distance, meters")
        parser.add_argument("--ell-to", type=float, default=20000.0, help="Longest charging distance, meters (clipped below Tν/2)")
        parser.add_argument("--n", type=int, default=None, help="Fleet size N (default: fleet.n of the scenario)")
        parser.add_argument("--out", type=str, help="CSV file; stdout when omitted")
        parser.add_argument("--workers", type=int, default=0, help="Worker processes (default: UAVCAP_WORKERS)")

    def handle(self, *args, **options):
        config = self.load_scenario(options)
        height = height_policy(options["height"])
        n = options["n"] or config.fleet.n
        if not options["t_from"] < options["t_to"] or options["t_steps"] < 2 or options["t_from"] <= 0:
            raise CommandError("need 0 < --t-from < --t-to and --t-steps ≥ 2", returncode=EXIT_CONFIG_ERROR)
        if options["ell_from"] < 0 or not options["ell_from"] < options["ell_to"]:
            raise CommandError("need 0 ≤ --ell-from < --ell-to", returncode=EXIT_CONFIG_ERROR)
        if n < 1:
            raise CommandError("--n must be ≥ 1", returncode=EXIT_CONFIG_ERROR)

        t_values = np.linspace(options["t_from"], options["t_to"], options["t_steps"])
        try:
            with self.mapper(options["workers"]) as map_fn:
                points = tradeoff_boundary(
                    config,
                    t_values,
                    (options["ell_from"], options["ell_to"]),
                    n,
                    height,
                    self.height_range,
                    samples=settings.UAVCAP["BOUNDARY_ELL_SAMPLES"],
                    map_fn=map_fn,
                )
        except UnsupportedCountError as e:
            raise CommandError(f"N={n}: {e}", returncode=EXIT_CONFIG_ERROR)

        self.write_output(options.get("out"), lambda stream: write_csv(stream, BOUNDARY_HEADER, boundary_rows(points)))
        crossings = sum(1 for p in points if p.status == "crossing")
        self.stderr.write(f"{crossings} of {len(points)} flight times have a crossing")
