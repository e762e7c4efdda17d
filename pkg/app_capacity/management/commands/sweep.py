from django.core.management.base import CommandError

from app_capacity.exceptions import CapacityDomainError
from app_capacity.management.base import EXIT_CONFIG_ERROR, CapacityCommand, height_policy, option_list
from app_capacity.sweeps import SWEEP_HEADER, SWEEP_VARIABLES, SweepSpec, run_sweep, write_csv


class Command(CapacityCommand):
    help = "Sweep one variable over an inclusive grid and write one CSV row per (grid point, option)"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--sweep", choices=SWEEP_VARIABLES, required=True, help="Variable to sweep")
        parser.add_argument("--from", dest="start", type=float, required=True, help="First grid value")
        parser.add_argument("--to", dest="stop", type=float, required=True, help="Last grid value")
        parser.add_argument("--steps", type=int, default=11, help="Number of grid points (≥ 2)")
        parser.add_argument("--out", type=str, help="CSV file; stdout when omitted")
        parser.add_argument("--workers", type=int, default=0, help="Worker processes (default: UAVCAP_WORKERS)")

    def handle(self, *args, **options):
        config = self.load_scenario(options)
        height = height_policy(options["height"])
        try:
            spec = SweepSpec(options["sweep"], options["start"], options["stop"], options["steps"], option_list(options["option"]))
        except CapacityDomainError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)

        with self.mapper(options["workers"]) as map_fn:
            rows = run_sweep(config, spec, height, self.height_range, map_fn)

        self.write_output(options.get("out"), lambda stream: write_csv(stream, SWEEP_HEADER, rows))
        failed = sum(1 for row in rows if row[-1] not in ("ok", "no_coverage"))
        if failed:
            self.stderr.write(self.style.WARNING(f"{failed} of {len(rows)} grid points have no metrics (see status column)"))
