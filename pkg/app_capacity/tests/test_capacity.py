import math

import numpy as np
from django.test import SimpleTestCase

from app_capacity.capacity import (
    evaluate,
    mean_se,
    min_drones_for_target,
    network_capacity,
    optimize_height,
    poisson_weights,
    serving_stage,
    serving_stage_user_capacity,
    tradeoff_boundary,
    user_capacity,
)
from app_capacity.channel import BlockageGeometry, LinkBudget, branch_efficiencies
from app_capacity.exceptions import CapacityDomainError, InfeasibleCycleError, TargetUnreachableError
from app_capacity.geometry import DeploymentOption, link_distance_pdf
from app_capacity.scenario import ScenarioConfig, with_values

AIRBORNE = DeploymentOption.AIRBORNE
LANDED = DeploymentOption.LANDED
H_RANGE = (1.5, 60.0)


class MeanSeTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_constant_integrand_limit(self):
        config = with_values(self.config, {"radio.gamma": 0.0, "radio.blockage_loss_db": 0.0})
        budget = LinkBudget.from_radio(config.radio)
        snr = budget.eirp_linear * budget.a_n / budget.noise_linear
        for option in DeploymentOption:
            self.assertAlmostEqual(mean_se(option, 5, config, 12.0), math.log2(1 + snr), places=9)

    def test_quadrature_converged(self):
        coarse = mean_se(AIRBORNE, 5, self.config, 12.0, tolerance=1e-8)
        fine = mean_se(AIRBORNE, 5, self.config, 12.0, tolerance=5e-9)
        self.assertLess(abs(coarse - fine) / fine, 1e-6)

    def test_needs_a_serving_ap(self):
        with self.assertRaises(CapacityDomainError):
            mean_se(AIRBORNE, 0, self.config, 12.0)


class OptimizeHeightTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_interior_optimum_for_both_options(self):
        optima = {}
        for option in DeploymentOption:
            h_star, se_star = optimize_height(option, 5, self.config, H_RANGE)
            self.assertGreater(h_star, H_RANGE[0] + 0.5)
            self.assertLess(h_star, H_RANGE[1] - 0.5)
            for end in H_RANGE:
                self.assertLess(mean_se(option, 5, self.config, end), 0.95 * se_star, f"{option} h={end}")
            optima[option] = h_star
        self.assertGreater(abs(optima[AIRBORNE] - optima[LANDED]), 0.1)

    def test_pure_path_loss_prefers_lowest_height(self):
        config = with_values(self.config, {"area.density": 0.0, "radio.blockage_loss_db": 0.0})
        h_star, _ = optimize_height(AIRBORNE, 5, config, H_RANGE)
        self.assertEqual(h_star, H_RANGE[0])

    def test_stable_when_range_widened(self):
        narrow, _ = optimize_height(AIRBORNE, 5, self.config, (1.5, 40.0))
        wide, _ = optimize_height(AIRBORNE, 5, self.config, (1.5, 80.0))
        self.assertAlmostEqual(narrow, wide, delta=0.1)

    def test_range_below_ue_plane(self):
        with self.assertRaises(CapacityDomainError):
            optimize_height(AIRBORNE, 5, self.config, (0.5, 1.0))

    def test_airborne_at_least_as_efficient_for_every_m(self):
        for m in range(1, 7):
            _, se_airborne = optimize_height(AIRBORNE, m, self.config, H_RANGE)
            _, se_landed = optimize_height(LANDED, m, self.config, H_RANGE)
            self.assertGreaterEqual(se_airborne, se_landed, f"M={m}")
            self.assertLessEqual(se_airborne / se_landed, 1.3, f"M={m}")


class NetworkCapacityTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_report_composition(self):
        report = network_capacity(LANDED, self.config, "auto", H_RANGE)
        self.assertEqual(report.m_serving, 3)
        self.assertEqual(report.provenance, "analytic")
        self.assertAlmostEqual(report.network_capacity, 3 * 1e9 * report.mean_se)
        self.assertAlmostEqual(report.height_used, optimize_height(LANDED, 3, self.config, H_RANGE)[0])

    def test_configured_height(self):
        report = network_capacity(AIRBORNE, self.config, "config")
        self.assertEqual(report.height_used, self.config.fleet.h_a)

    def test_no_guaranteed_coverage(self):
        config = with_values(self.config, {"fleet.n": 1})
        report = network_capacity(AIRBORNE, config, 12.0)
        self.assertEqual(report.m_serving, 0)
        self.assertEqual(report.network_capacity, 0.0)
        self.assertEqual(report.note, "no guaranteed coverage")

    def test_linear_in_bandwidth_with_fixed_noise(self):
        wide = with_values(self.config, {"radio.bandwidth_hz": 2e9})
        single = network_capacity(LANDED, self.config, 15.0).network_capacity
        double = network_capacity(LANDED, wide, 15.0).network_capacity
        self.assertAlmostEqual(double / single, 2.0, places=12)

    def test_infeasible_cycle(self):
        config = with_values(self.config, {"area.ell": 25_000.0})
        with self.assertRaises(InfeasibleCycleError):
            network_capacity(LANDED, config)

    def test_landed_wins_short_flights(self):
        for n in (3, 4, 5):
            for ell in (500.0, 1000.0, 2000.0, 3500.0, 5000.0):
                config = with_values(self.config, {"fleet.n": n, "area.ell": ell})
                landed = network_capacity(LANDED, config, "auto", H_RANGE).network_capacity
                airborne = network_capacity(AIRBORNE, config, "auto", H_RANGE).network_capacity
                self.assertGreater(landed, airborne, f"N={n} ell={ell}")


class UserCapacityTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_poisson_truncation(self):
        for mean in (1e-6, 3.0, 785.4, 5000.0):
            ks, weights = poisson_weights(mean)
            self.assertEqual(ks[0], 1)
            self.assertGreaterEqual(weights.sum(), 1 - math.exp(-mean) - 1e-9)

    def test_large_population_shares_evenly(self):
        for mean in (100.0, 785.4):
            ks, weights = poisson_weights(mean)
            self.assertAlmostEqual(float(np.sum(weights / ks)) * mean, 1.0, delta=0.02)

    def test_nearly_empty_area(self):
        radius = self.config.area.radius
        density = 1e-6 / (math.pi * radius**2)
        config = with_values(self.config, {"area.density": density})
        h, m = 12.0, 3
        budget = LinkBudget.from_radio(config.radio)
        geom = BlockageGeometry.from_body(config.body, h)
        pdf = link_distance_pdf(AIRBORNE, m, radius)
        mean = 1e-6
        p1 = mean * math.exp(-mean)
        p2 = mean**2 / 2 * math.exp(-mean)

        def two_terms(x):
            se_b, se_n = branch_efficiencies(budget, geom, x)
            total = 0.0
            for k, weight in ((1, p1), (2, p2)):
                p_b = 1 - (1 - geom.self_block_probability) * math.exp(
                    -2 * geom.r_b * k / (math.pi * radius**2) * (x * geom.shadow_slope + geom.r_b)
                )
                total += weight * 1e9 * m / k * (p_b * se_b + (1 - p_b) * se_n)
            return total

        expected = pdf.integrate(two_terms)
        self.assertAlmostEqual(serving_stage_user_capacity(AIRBORNE, m, config, h) / expected, 1.0, delta=1e-6)

    def test_decreasing_in_density(self):
        values = [
            serving_stage_user_capacity(LANDED, 3, with_values(self.config, {"area.density": density}), 15.0)
            for density in (0.02, 0.05, 0.1, 0.2)
        ]
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertEqual(len(set(values)), 4)

    def test_empty_area_is_rejected(self):
        with self.assertRaises(CapacityDomainError):
            user_capacity(LANDED, with_values(self.config, {"area.density": 0.0}))

    def test_linear_in_bandwidth_with_fixed_noise(self):
        wide = with_values(self.config, {"radio.bandwidth_hz": 2e9})
        single = user_capacity(LANDED, self.config, 15.0)
        self.assertAlmostEqual(user_capacity(LANDED, wide, 15.0) / single, 2.0, places=9)

    def test_evaluate_fills_user_capacity(self):
        report = evaluate(LANDED, self.config, "auto", H_RANGE)
        self.assertIsNotNone(report.user_capacity)
        self.assertGreater(report.user_capacity, 0.0)
        self.assertIsNone(evaluate(LANDED, with_values(self.config, {"area.density": 0.0}), 15.0).user_capacity)


class MinDronesTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_tiny_target_needs_one_serving_drone(self):
        # At T = 1 h and ell = 1 km two landed drones keep one serving; airborne needs three.
        self.assertEqual(min_drones_for_target(self.config, 1.0, 1.0, LANDED), 2)
        self.assertEqual(min_drones_for_target(self.config, 1.0, 1.0, AIRBORNE), 3)

    def test_unreachable_target(self):
        with self.assertRaises(TargetUnreachableError) as ctx:
            min_drones_for_target(self.config, 1e12, 1.0, LANDED)
        self.assertGreater(ctx.exception.best_bps, 0.0)

    def test_non_positive_target(self):
        with self.assertRaises(CapacityDomainError):
            min_drones_for_target(self.config, 0.0, 1.0, LANDED)

    def test_nonincreasing_in_flight_time(self):
        target = user_capacity(AIRBORNE, with_values(self.config, {"fleet.n": 3}), "auto", H_RANGE)
        counts = [min_drones_for_target(self.config, target, t, AIRBORNE, "auto", H_RANGE) for t in (1.0, 2.0, 4.0, 8.0)]
        self.assertEqual(counts, sorted(counts, reverse=True))

    def test_airborne_needs_fewer_drones_with_long_flights(self):
        # At T = 8 h four drones of either kind leave three serving; the airborne ones serve better.
        t_h = 8.0
        long_flight = with_values(self.config, {"fleet.t_h": t_h, "fleet.n": 4})
        target = user_capacity(AIRBORNE, long_flight, "auto", H_RANGE)
        airborne = min_drones_for_target(self.config, target, t_h, AIRBORNE, "auto", H_RANGE)
        try:
            landed = min_drones_for_target(self.config, target, t_h, LANDED, "auto", H_RANGE)
        except TargetUnreachableError:
            landed = math.inf
        self.assertLessEqual(airborne, 4)
        self.assertLess(airborne, landed)


class TradeoffBoundaryTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_boundary_structure(self):
        points = tradeoff_boundary(self.config, [1.0, 3.0, 5.0, 8.0], (0.0, 20_000.0), 4, "auto", H_RANGE, samples=24)
        self.assertEqual([p.t_h for p in points], [1.0, 3.0, 5.0, 8.0])
        self.assertEqual(points[0].status, "landed_always")
        self.assertEqual(points[2].status, "crossing")
        self.assertEqual(points[3].status, "crossing")
        # Airborne keeps three of four drones serving up to rho_A = 3/4.
        self.assertAlmostEqual(points[2].ell_star, 5592.6, delta=2.0)
        self.assertAlmostEqual(points[3].ell_star, 18388.8, delta=2.0)
        self.assertLess(points[2].ell_star, points[3].ell_star)

    def test_range_beyond_reach(self):
        (point,) = tradeoff_boundary(self.config, [0.5], (15_000.0, 20_000.0), 4, 15.0)
        self.assertEqual(point.status, "infeasible")
        self.assertIsNone(point.ell_star)

    def test_airborne_side_at_short_distance(self):
        config = with_values(self.config, {"fleet.t_h": 5.0})
        airborne = network_capacity(AIRBORNE, config, "auto", H_RANGE)
        landed = network_capacity(LANDED, config, "auto", H_RANGE)
        self.assertEqual(airborne.m_serving, landed.m_serving)
        self.assertGreater(airborne.network_capacity, landed.network_capacity)

    def test_serving_stage_alone(self):
        report = serving_stage(AIRBORNE, 5, self.config, 12.0)
        self.assertIsNone(report.cycle)
        self.assertEqual(report.m_serving, 5)
        self.assertAlmostEqual(report.network_capacity, 5 * 1e9 * mean_se(AIRBORNE, 5, self.config, 12.0))
