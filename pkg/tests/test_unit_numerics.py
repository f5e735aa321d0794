import math
import unittest

import numpy as np

from src.services.errors import NumericError
from src.services.numerics import brentq_root, invert_decreasing, quad


class TestNumerics(unittest.TestCase):
    def test_quad(self):
        value, abserr = quad(lambda x: x * x, 0.0, 1.0)
        self.assertAlmostEqual(value, 1.0 / 3.0, places=12)
        self.assertLess(abserr, 1e-9)

    def test_quad_break_points(self):
        value, _ = quad(lambda x: abs(x - 0.3), 0.0, 1.0, points=[0.3, 2.0])
        self.assertAlmostEqual(value, 0.5 * 0.3 ** 2 + 0.5 * 0.7 ** 2, places=12)

    def test_quad_divergent(self):
        with self.assertRaises(NumericError) as ctx:
            quad(lambda x: 1.0 / (x * x) if x > 0 else math.inf, 0.0, 1.0)
        self.assertIn("quadrature on [0, 1] diverges", str(ctx.exception))

    def test_invert_decreasing(self):
        out = invert_decreasing(lambda x: x ** -2.0, np.array([0.25, 0.01, 1.0]), 1.0)
        np.testing.assert_allclose(out, [2.0, 10.0, 1.0], rtol=1e-10)

    def test_invert_decreasing_from_zero(self):
        out = invert_decreasing(lambda x: np.exp(-x), np.array([0.5, 1e-12]), 0.0, rtol=1e-13)
        np.testing.assert_allclose(out, [math.log(2.0), 12.0 * math.log(10.0)], rtol=1e-12)

    def test_invert_decreasing_iteration_cap(self):
        with self.assertRaises(NumericError) as ctx:
            invert_decreasing(lambda x: x ** -2.0, np.array([0.3]), 1.0, maxiter=5)
        self.assertIn("inverse did not converge", str(ctx.exception))

    def test_brentq_root(self):
        self.assertAlmostEqual(brentq_root(lambda x: x * x - 2.0, 0.0, 2.0), math.sqrt(2.0), places=12)

    def test_numeric_error_message(self):
        err = NumericError("did not converge", residual=0.5, detail="roundoff")
        self.assertEqual(str(err), "did not converge (residual=0.5, roundoff)")
        self.assertIsInstance(err, ArithmeticError)


if __name__ == '__main__':
    unittest.main()
