from django.test import TestCase, override_settings
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APIClient


class HealthCheckViewTest(TestCase):
    def setUp(self):
        self.client = APIClient()

    def test_health_check(self):
        response = self.client.get(reverse("health-check"))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["status"], "ok")


class ScenarioDefaultsViewTest(TestCase):
    def setUp(self):
        self.client = APIClient()

    def test_defaults_by_section(self):
        response = self.client.get(reverse("scenario-defaults"))

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["area"]["radius"], 50.0)
        self.assertEqual(response.data["fleet"]["n"], 4)


@override_settings(UAVCAP={"DEFAULT_CONFIG": "", "HEIGHT_RANGE_M": (1.5, 60.0)})
class EvaluateViewTest(TestCase):
    def setUp(self):
        self.client = APIClient()
        self.evaluate_url = reverse("evaluate")

    def test_evaluate_landed(self):
        """
        Default scenario: three of four landed drones serve at 1 km
        """
        response = self.client.post(self.evaluate_url, {"option": "landed", "height": "20"}, format="json")

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 1)
        report = response.data[0]
        self.assertEqual(report["option"], "landed")
        self.assertEqual(report["m_serving"], 3)
        self.assertEqual(report["height_used"], 20.0)
        self.assertGreater(report["user_capacity"], 0.0)
        self.assertAlmostEqual(report["network_capacity"], 3 * 1e9 * report["mean_se"], delta=1.0)

    def test_evaluate_both_options_with_overrides(self):
        data = {"height": "config", "overrides": {"fleet.t_h": "3", "area.density": "0"}}

        response = self.client.post(self.evaluate_url, data, format="json")

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([r["option"] for r in response.data], ["airborne", "landed"])
        self.assertIsNone(response.data[0]["user_capacity"])

    def test_no_guaranteed_coverage(self):
        data = {"option": "airborne", "height": "12", "overrides": {"fleet.n": "1"}}

        response = self.client.post(self.evaluate_url, data, format="json")

        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data[0]["m_serving"], 0)
        self.assertEqual(response.data[0]["note"], "no guaranteed coverage")

    def test_infeasible_cycle(self):
        """
        The charging station is farther than half the flight range
        """
        response = self.client.post(self.evaluate_url, {"overrides": {"area.ell": "25000"}}, format="json")

        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertEqual(response.data["detail"], "infeasible scenario")

    def test_invalid_scenario(self):
        response = self.client.post(self.evaluate_url, {"overrides": {"body.h_b": "1.0"}}, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("body.h_b: h_B > h_U violated", response.data["violations"])

    def test_unknown_key(self):
        response = self.client.post(self.evaluate_url, {"overrides": {"radio.power": "3"}}, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_bad_option(self):
        response = self.client.post(self.evaluate_url, {"option": "tethered"}, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("option", response.data)

    def test_bad_height(self):
        response = self.client.post(self.evaluate_url, {"height": "high"}, format="json")

        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_get_not_allowed(self):
        response = self.client.get(self.evaluate_url)

        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)
