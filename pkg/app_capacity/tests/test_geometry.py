import math

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from app_capacity.exceptions import GeometryError, UnsupportedCountError
from app_capacity.geometry import (
    DeploymentOption,
    SectorGeometry,
    link_distance_pdf,
    make_layout,
    nearest_ap,
    packing_radius,
    pdf_closed_form,
    pdf_numeric,
    sample_distance,
)
from app_capacity.scenario import ScenarioConfig
from app_capacity.simulate import nearest_ap_distances

AIRBORNE = DeploymentOption.AIRBORNE
LANDED = DeploymentOption.LANDED
R = 50.0


class PackingTest(SimpleTestCase):
    def test_five_circles(self):
        self.assertAlmostEqual(packing_radius(5, R), 18.5096, places=4)

    def test_known_ratios(self):
        self.assertAlmostEqual(packing_radius(1, R), R)
        self.assertAlmostEqual(packing_radius(2, R), R / 2)
        self.assertAlmostEqual(packing_radius(6, R), R / 3)

    def test_ring_circles_touch_their_neighbours(self):
        for m in range(2, 7):
            ring = R - packing_radius(m, R)
            self.assertAlmostEqual(ring * math.sin(math.pi / m), packing_radius(m, R), places=9, msg=f"M={m}")

    def test_unsupported_count(self):
        with self.assertRaises(UnsupportedCountError):
            packing_radius(7, R)


class LayoutTest(SimpleTestCase):
    def setUp(self):
        self.config = ScenarioConfig()

    def test_airborne_single_ap_at_center(self):
        layout = make_layout(AIRBORNE, 1, self.config, 12.0)
        np.testing.assert_allclose(layout.coordinates(), [[0.0, 0.0]])

    def test_landed_aps_on_perimeter(self):
        layout = make_layout(LANDED, 4, self.config, 20.0)
        np.testing.assert_allclose(np.hypot(*layout.coordinates().T), R)
        self.assertAlmostEqual(layout.r_pack, R * math.sin(math.pi / 4))

    def test_airborne_aps_inside_area(self):
        layout = make_layout(AIRBORNE, 5, self.config, 12.0)
        np.testing.assert_allclose(np.hypot(*layout.coordinates().T), R - packing_radius(5, R))

    def test_nearest_ap_tie_goes_to_lower_index(self):
        layout = make_layout(LANDED, 2, self.config, 20.0)
        index, dist = nearest_ap(np.array([[0.0, 0.0], [40.0, 1.0]]), layout)
        self.assertEqual(list(index), [0, 0])
        self.assertAlmostEqual(dist[0], R)

    def test_too_many_aps(self):
        with self.assertRaises(UnsupportedCountError):
            make_layout(LANDED, 7, self.config, 20.0)


class SectorTest(SimpleTestCase):
    def test_landed_corner_distance(self):
        sector = SectorGeometry.for_layout(LANDED, 4, R)
        self.assertAlmostEqual(sector.corner_distance, 38.2683, places=4)
        self.assertEqual(sector.x_max, R)

    def test_airborne_support_reaches_sector_corner(self):
        # For M = 2..4 the far corner of the sector lies beyond R - r_A.
        for m in (2, 3, 4):
            sector = SectorGeometry.for_layout(AIRBORNE, m, R)
            self.assertGreater(sector.x_max, R - packing_radius(m, R))

    def test_full_circle_near_the_ap(self):
        sector = SectorGeometry.for_layout(AIRBORNE, 5, R)
        self.assertAlmostEqual(sector.inside_angle(1.0), 2 * math.pi)

    def test_breakpoints_are_increasing(self):
        for option in DeploymentOption:
            for m in range(1, 7):
                points = SectorGeometry.for_layout(option, m, R).breakpoints()
                self.assertTrue(all(a < b for a, b in zip(points, points[1:])), f"{option} M={m}: {points}")


class PdfTest(SimpleTestCase):
    def test_every_layout_is_normalized(self):
        for option in DeploymentOption:
            for m in range(1, 7):
                pdf = link_distance_pdf(option, m, R)
                self.assertAlmostEqual(pdf.total_mass(), 1.0, delta=1e-6, msg=f"{option} M={m}")
                self.assertAlmostEqual(pdf.grid_cdf[-1], 1.0)

    def test_closed_form_matches_numeric(self):
        cases = [(AIRBORNE, 5)] + [(LANDED, m) for m in range(3, 7)]
        for option, m in cases:
            closed = pdf_closed_form(option, m, R)
            numeric = pdf_numeric(option, m, R)
            np.testing.assert_allclose(closed.breakpoints, numeric.breakpoints, atol=1e-9)
            xs = np.linspace(0.0, closed.x_max, 2001)
            gap = np.min(np.abs(xs[:, None] - np.array(closed.breakpoints)[None, :]), axis=1)
            xs = xs[gap > 1e-3]
            diff = np.abs(closed.density(xs) - numeric.density(xs))
            self.assertLess(diff.max(), 1e-6, f"{option} M={m}")

    def test_closed_form_only_for_known_layouts(self):
        with self.assertRaises(UnsupportedCountError):
            pdf_closed_form(AIRBORNE, 3, R)
        with self.assertRaises(UnsupportedCountError):
            pdf_closed_form(LANDED, 2, R)

    def test_degenerate_count(self):
        with self.assertRaises(GeometryError):
            pdf_numeric(LANDED, 0, R)

    def test_single_central_ap(self):
        # Uniform disc around its center: f(x) = 2x/R².
        pdf = link_distance_pdf(AIRBORNE, 1, R)
        for x in (5.0, 20.0, 49.0):
            self.assertAlmostEqual(pdf.density(x), 2 * x / R**2, places=12)
        self.assertAlmostEqual(pdf.mean(), 2 * R / 3, places=6)

    def test_density_vanishes_outside_support(self):
        pdf = link_distance_pdf(LANDED, 4, R)
        self.assertEqual(pdf.density(-1.0), 0.0)
        self.assertEqual(pdf.density(R + 1.0), 0.0)


class SamplingTest(SimpleTestCase):
    def test_inverse_cdf_samples_follow_the_table(self):
        pdf = link_distance_pdf(AIRBORNE, 5, R)
        rng = np.random.default_rng(7)
        result = stats.kstest(sample_distance(pdf, rng, 50_000), pdf.cdf)
        self.assertGreater(result.pvalue, 0.01)

    def test_dropped_ues_match_the_pdf(self):
        config = ScenarioConfig()
        rng = np.random.default_rng(20240611)
        for option in (AIRBORNE, LANDED):
            for m in range(1, 7):
                with self.subTest(option=option.value, m=m):
                    pdf = link_distance_pdf(option, m, R)
                    distances = np.concatenate([nearest_ap_distances(option, m, config, 250_000, rng) for _ in range(4)])
                    edges = np.interp(np.linspace(0.0, 1.0, 21), pdf.grid_cdf, pdf.grid_x)
                    observed, _ = np.histogram(distances, bins=edges)
                    expected = np.diff(pdf.cdf(edges)) * distances.size
                    result = stats.chisquare(observed, expected * observed.sum() / expected.sum())
                    self.assertGreater(result.pvalue, 0.01)
