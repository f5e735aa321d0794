import math
import unittest

import numpy as np

from src.models.laws import GPD, Hall, LogGamma, LogPerturbedPareto, Pareto
from src.services.distributions import decomposition_check, theta_fit
from src.services.divergences import (chi2_excess_vs_pareto, g_func, kl_excess_vs_pareto, kl_pareto, kl_pareto_array,
                                      rho_star)
from src.services.errors import TailDomainError


class TestParetoDivergence(unittest.TestCase):
    def test_g_func(self):
        self.assertEqual(g_func(0.0), 0.0)
        self.assertAlmostEqual(g_func(1.0), 1.0 - math.log(2.0), places=14)
        x = 1e-5
        self.assertAlmostEqual(g_func(x) / (x * x / 2 - x ** 3 / 3), 1.0, places=9)
        self.assertEqual(g_func(-1.0), math.inf)

    def test_kl_pareto(self):
        self.assertEqual(kl_pareto(1.0, 1.0), 0.0)
        self.assertAlmostEqual(kl_pareto(2.0, 1.0), 1.0 - math.log(2.0), places=14)
        self.assertAlmostEqual(kl_pareto(1.0, 2.0), math.log(2.0) - 0.5, places=14)
        self.assertEqual(kl_pareto(0.0, 1.0), math.inf)
        self.assertEqual(kl_pareto(1.0, 0.0), math.inf)

    def test_kl_pareto_scale_free(self):
        self.assertAlmostEqual(kl_pareto(3.0, 1.5), kl_pareto(2.0, 1.0), places=14)

    def test_kl_pareto_negative(self):
        with self.assertRaises(TailDomainError):
            kl_pareto(-1.0, 1.0)
        with self.assertRaises(TailDomainError):
            kl_pareto(1.0, float("nan"))

    def test_kl_pareto_array(self):
        out = kl_pareto_array([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])
        self.assertEqual(out[0], math.inf)
        self.assertEqual(out[1], 0.0)
        self.assertAlmostEqual(out[2], 1.0 - math.log(2.0), places=14)

    def test_rho_star(self):
        self.assertAlmostEqual(rho_star(2.0, 1.0), math.log(2.0), places=14)
        self.assertAlmostEqual(rho_star(0.1, 0.2), 5.0, places=12)
        self.assertEqual(rho_star(1.5, 1.5), 0.0)
        with self.assertRaises(TailDomainError):
            rho_star(0.0, 1.0)


class TestParetoDivergenceBounds(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(17)
        self.pairs = np.exp(rng.uniform(-2.0, 2.0, size=(10_000, 2)))

    def test_log_square_bounds(self):
        for a, b in self.pairs:
            s, k = math.log(a / b), kl_pareto(a, b)
            if k <= 0.5:
                self.assertLessEqual(s * s / 3.0, k + 1e-14)
            if s * s <= 2.0 / 3.0:
                self.assertLessEqual(k, 0.75 * s * s + 1e-14)

    def test_quasi_symmetry(self):
        for a, b in self.pairs:
            forward, backward = kl_pareto(a, b), kl_pareto(b, a)
            if forward <= 0.5:
                self.assertLessEqual(forward, 2.25 * backward + 1e-14)

    def test_vectorized_matches_scalar(self):
        out = kl_pareto_array(self.pairs[:, 0], self.pairs[:, 1])
        expected = [kl_pareto(a, b) for a, b in self.pairs[:200]]
        np.testing.assert_allclose(out[:200], expected, rtol=1e-12, atol=1e-15)

    def test_chain_bound(self):
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(50):
            thetas = np.exp(np.cumsum(rng.uniform(-0.1, 0.1, size=6)))
            steps = sum(math.sqrt(kl_pareto(a, b)) for a, b in zip(thetas[:-1], thetas[1:]))
            if steps > 1.0 / 3.0:
                continue
            checked += 1
            self.assertLessEqual(math.sqrt(kl_pareto(thetas[0], thetas[-1])), 1.5 * steps + 1e-12)
        self.assertGreater(checked, 0)


class TestExcessDivergence(unittest.TestCase):
    def test_kl_of_pareto_excess(self):
        # excesses of a Pareto law over any threshold follow the same Pareto law
        value = kl_excess_vs_pareto(Pareto(theta=1.0), 5.0, 2.0)
        self.assertAlmostEqual(value, kl_pareto(1.0, 2.0), places=7)

    def test_kl_of_matching_pareto(self):
        self.assertAlmostEqual(kl_excess_vs_pareto(Pareto(theta=2.0), 3.0, 2.0), 0.0, places=8)

    def test_kl_bad_arguments(self):
        with self.assertRaises(TailDomainError):
            kl_excess_vs_pareto(Pareto(), 0.5, 1.0)
        with self.assertRaises(TailDomainError):
            kl_excess_vs_pareto(Pareto(), 2.0, 0.0)

    def test_chi2_of_matching_pareto(self):
        self.assertAlmostEqual(chi2_excess_vs_pareto(Pareto(theta=1.0), 2.0, 1.0), 0.0, places=6)

    def test_chi2_closed_form(self):
        # chi^2(P_1, P_theta) = theta / (2 - 1/theta) - 1 for theta > 1/2
        self.assertAlmostEqual(chi2_excess_vs_pareto(Pareto(theta=1.0), 1.0, 2.0), 1.0 / 3.0, places=6)

    def test_chi2_divergent(self):
        with self.assertLogs("src.services.divergences", level="WARNING"):
            value = chi2_excess_vs_pareto(Pareto(theta=1.0), 1.0, 0.4)
        self.assertEqual(value, math.inf)

    def test_decomposition(self):
        lhs, misfit, index_part = decomposition_check(Hall(), 10.0, 1.5)
        self.assertTrue(np.isclose(lhs, misfit + index_part, rtol=1e-5, atol=1e-8))
        self.assertGreaterEqual(misfit, 0.0)

    def test_theta_fit_minimizes_kl(self):
        for law, t in ((Hall(), 10.0), (LogGamma(), 5.0), (GPD(shape=1.0, scale=1.0), 3.0)):
            with self.subTest(law=law.name):
                best = theta_fit(law, t)
                at_best = kl_excess_vs_pareto(law, t, best)
                for factor in (0.8, 0.95, 1.05, 1.25):
                    self.assertGreater(kl_excess_vs_pareto(law, t, best * factor), at_best)

    def test_kl_below_log_chi2(self):
        for law, t in ((Hall(), 20.0), (GPD(shape=1.0, scale=1.0), 10.0), (LogPerturbedPareto(), math.e ** 2)):
            theta = theta_fit(law, t)
            kl = kl_excess_vs_pareto(law, t, theta)
            chi2 = chi2_excess_vs_pareto(law, t, theta)
            self.assertGreaterEqual(kl, -1e-8)
            self.assertLessEqual(kl, math.log1p(chi2) + 1e-7)


if __name__ == '__main__':
    unittest.main()
