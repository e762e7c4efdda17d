from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from app_capacity.capacity import evaluate
from app_capacity.exceptions import CapacityDomainError, InfeasibleCycleError, UnsupportedCountError
from app_capacity.geometry import link_distance_pdf
from app_capacity.management.base import (
    EXIT_CONFIG_ERROR,
    EXIT_INFEASIBLE,
    CapacityCommand,
    height_policy,
    option_list,
)
from app_capacity.sweeps import PDF_HEADER, SWEEP_HEADER, pdf_rows, report_row, scenario_rho_ratio, write_csv


class Command(CapacityCommand):
    help = "Evaluate one scenario: serving fraction, serving drones, mean SE, network and user capacity"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--out",
            type=str,
            help="Write the CSV rows to this file instead of stdout",
        )
        parser.add_argument(
            "--dump-pdf",
            nargs="?",
            const=".",
            default=None,
            metavar="DIR",
            help="Also write the link-distance PDF table of every evaluated layout to DIR",
        )

    def handle(self, *args, **options):
        config = self.load_scenario(options)
        height = height_policy(options["height"])

        reports = []
        for option in option_list(options["option"]):
            try:
                report = evaluate(option, config, height, self.height_range)
            except InfeasibleCycleError as e:
                raise CommandError(str(e), returncode=EXIT_INFEASIBLE)
            except (CapacityDomainError, UnsupportedCountError) as e:
                raise CommandError(f"{option.value}: {e}", returncode=EXIT_CONFIG_ERROR)
            reports.append(report)
            self.print_summary(report)

        ratio = scenario_rho_ratio(config)
        rows = [report_row("point", None, report, ratio=ratio) for report in reports]
        self.write_output(options.get("out"), lambda stream: write_csv(stream, SWEEP_HEADER, rows))

        if options.get("dump_pdf"):
            self.dump_pdfs(Path(options["dump_pdf"]), reports, config)

    def print_summary(self, report):
        cycle = report.cycle
        user = "n/a" if report.user_capacity is None else f"{report.user_capacity / 1e6:.3f} Mbit/s"
        self.stdout.write(
            f"{report.option.value}: rho={cycle.rho:.6f} n_serving={report.m_serving} "
            f"height={report.height_used:.2f} m mean_se={report.mean_se:.4f} bit/s/Hz "
            f"network={report.network_capacity / 1e9:.4f} Gbit/s user={user}"
        )
        if report.note:
            self.stdout.write(self.style.WARNING(f"{report.option.value}: {report.note}"))

    def dump_pdfs(self, directory, reports, config):
        directory.mkdir(parents=True, exist_ok=True)
        for report in reports:
            if report.m_serving < 1:
                continue
            pdf = link_distance_pdf(report.option, report.m_serving, config.area.radius, settings.UAVCAP["PDF_RESOLUTION"])
            path = directory / f"pdf_{report.option.value}_M{report.m_serving}.csv"
            self.write_output(str(path), lambda stream, pdf=pdf: write_csv(stream, PDF_HEADER, pdf_rows(pdf)))
