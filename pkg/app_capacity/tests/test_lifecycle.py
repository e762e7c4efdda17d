import numpy as np
from django.test import SimpleTestCase

from app_capacity.exceptions import InfeasibleCycleError
from app_capacity.geometry import DeploymentOption
from app_capacity.lifecycle import rho_ratio, serving_count, serving_fraction, serving_power
from app_capacity.scenario import FleetModel

AIRBORNE = DeploymentOption.AIRBORNE
LANDED = DeploymentOption.LANDED


class ServingFractionTest(SimpleTestCase):
    def setUp(self):
        self.fleet = FleetModel()

    def test_no_flight_landed(self):
        cycle = serving_fraction(LANDED, self.fleet, 0.0)
        self.assertAlmostEqual(cycle.rho, 871 / 918, delta=1e-12)
        self.assertAlmostEqual(cycle.rho, 0.94880, delta=1e-5)

    def test_no_flight_airborne(self):
        cycle = serving_fraction(AIRBORNE, self.fleet, 0.0)
        self.assertAlmostEqual(cycle.rho, 871 / 1942, delta=1e-12)

    def test_one_kilometre(self):
        cycle = serving_fraction(AIRBORNE, self.fleet, 1000.0)
        self.assertAlmostEqual(cycle.rho, 33_098_000 / 78_080_000, delta=1e-12)
        self.assertEqual(cycle.n_serving, 1)
        self.assertEqual(serving_fraction(LANDED, self.fleet, 1000.0).n_serving, 3)

    def test_flight_time_in_hours(self):
        cycle = serving_fraction(LANDED, self.fleet, 2000.0)
        self.assertAlmostEqual(cycle.t_f_h, 0.05)

    def test_energy_budget_closes(self):
        for option in DeploymentOption:
            for ell in (0.0, 1500.0, 12_000.0):
                cycle = serving_fraction(option, self.fleet, ell)
                spent = cycle.t_s_h * serving_power(option, self.fleet) + 2 * cycle.t_f_h * self.fleet.p_e
                self.assertAlmostEqual(spent / (self.fleet.t_h * self.fleet.p_e), 1.0, delta=1e-9)

    def test_rho_vanishes_at_reach(self):
        reach = self.fleet.reach_m
        self.assertEqual(reach, 20_000.0)
        for option in DeploymentOption:
            self.assertLess(serving_fraction(option, self.fleet, reach * (1 - 1e-9)).rho, 1e-7)

    def test_infeasible_cycle(self):
        with self.assertRaises(InfeasibleCycleError) as ctx:
            serving_fraction(LANDED, self.fleet, 25_000.0)
        self.assertIn("ℓ ≥ Tν/2", str(ctx.exception))
        self.assertEqual(ctx.exception.bound_m, 20_000.0)

    def test_longer_flight_time_serves_more(self):
        short = serving_fraction(AIRBORNE, self.fleet, 1000.0)
        long = serving_fraction(AIRBORNE, FleetModel(t_h=3.0), 1000.0)
        self.assertGreater(long.rho, short.rho)


class RhoRatioTest(SimpleTestCase):
    def test_landed_serves_50_to_400_percent_longer(self):
        # The reported range holds up to half the reach at T = 1 h.
        fleet = FleetModel()
        for ell in np.linspace(0.0, 10_000.0, 21):
            ratio = rho_ratio(fleet, ell)
            self.assertGreaterEqual(ratio, 1.5, f"ell={ell}")
            self.assertLessEqual(ratio, 5.0, f"ell={ell}")

    def test_ratio_grows_with_distance(self):
        fleet = FleetModel()
        ratios = [rho_ratio(fleet, ell) for ell in (0.0, 5000.0, 10_000.0)]
        self.assertEqual(ratios, sorted(ratios))


class ServingCountTest(SimpleTestCase):
    def test_floor(self):
        self.assertEqual(serving_count(4, 0.75), 3)
        self.assertEqual(serving_count(4, 0.75 - 1e-6), 2)
        self.assertEqual(serving_count(4, 0.2), 0)

    def test_exact_fraction_survives_rounding(self):
        for n in range(1, 13):
            for j in range(n + 1):
                self.assertEqual(serving_count(n, j / n), j, f"{j}/{n}")
