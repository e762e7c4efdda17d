import logging
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from app_capacity.capacity import AUTO_HEIGHT, CONFIG_HEIGHT
from app_capacity.exceptions import ConfigParseError, ConfigValidationError
from app_capacity.geometry import DeploymentOption
from app_capacity.scenario import load_config

logger = logging.getLogger("app_capacity")

EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_INFEASIBLE = 3


def height_policy(value):
    """``auto``, ``config`` or a height in meters."""
    text = str(value).strip().lower()
    if text in (AUTO_HEIGHT, CONFIG_HEIGHT):
        return text
    try:
        return float(text)
    except ValueError:
        raise CommandError(f"--height expects meters, 'auto' or 'config', got {value!r}", returncode=EXIT_CONFIG_ERROR) from None


def option_list(choice):
    if choice == "both":
        return (DeploymentOption.AIRBORNE, DeploymentOption.LANDED)
    return (DeploymentOption.parse(choice),)


class CapacityCommand(BaseCommand):
    """Shared scenario flags and error-to-exit-code mapping."""

    def add_arguments(self, parser):
        parser.add_argument(
            "--config",
            type=str,
            default=None,
            help="Scenario file (section.key = value lines); default: UAVCAP_DEFAULT_CONFIG or built-in defaults",
        )
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="Override one scenario value; repeatable",
        )
        parser.add_argument(
            "--option",
            choices=["airborne", "landed", "both"],
            default="both",
            help="Deployment option(s) to evaluate",
        )
        parser.add_argument(
            "--height",
            type=str,
            default=AUTO_HEIGHT,
            help="Service height in meters, 'auto' (optimized per option and M) or 'config'",
        )

    def load_scenario(self, options):
        path = options.get("config") or settings.UAVCAP["DEFAULT_CONFIG"] or None
        try:
            return load_config(path, options.get("overrides") or [])
        except ConfigValidationError as e:
            for violation in e.violations:
                self.stderr.write(str(violation))
            # The cycle bound is the one invariant that means "infeasible" rather than "bad input".
            if all("infeasible cycle" in v.rule for v in e.violations):
                raise CommandError(f"infeasible scenario: {e}", returncode=EXIT_INFEASIBLE)
            raise CommandError(f"invalid scenario: {e}", returncode=EXIT_CONFIG_ERROR)
        except ConfigParseError as e:
            raise CommandError(f"scenario error: {e}", returncode=EXIT_CONFIG_ERROR)

    @property
    def height_range(self):
        return tuple(settings.UAVCAP["HEIGHT_RANGE_M"])

    @contextmanager
    def mapper(self, workers):
        """Ordered map over a process pool, or the builtin map for a single worker."""
        workers = workers or settings.UAVCAP["WORKERS"]
        if workers <= 1:
            yield map
            return
        logger.info(f"using {workers} worker processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield pool.map

    def write_output(self, path, write):
        """Call ``write(stream)`` on the file at ``path``, or on stdout."""
        if not path:
            write(self.stdout)
            return
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                write(f)
        except OSError as e:
            raise CommandError(f"cannot write {path}: {e}", returncode=EXIT_CONFIG_ERROR)
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
