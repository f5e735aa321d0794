import unittest

import numpy as np

from src.models.sample import Sample
from src.services.errors import ArgumentError, TailDomainError


class TestSample(unittest.TestCase):
    def setUp(self):
        self.sample = Sample([3.0, 1.0, 2.0, 2.0])

    def test_descending_order(self):
        np.testing.assert_array_equal(self.sample.desc, [3.0, 2.0, 2.0, 1.0])
        np.testing.assert_array_equal(self.sample.order_desc, [0, 2, 3, 1])
        self.assertEqual(self.sample.n, 4)
        self.assertEqual(len(self.sample), 4)

    def test_order_statistic(self):
        self.assertEqual(self.sample.order_statistic(1), 3.0)
        self.assertEqual(self.sample.order_statistic(4), 1.0)
        with self.assertRaises(ArgumentError):
            self.sample.order_statistic(0)
        with self.assertRaises(ArgumentError):
            self.sample.order_statistic(5)

    def test_counts_are_strict(self):
        self.assertEqual(int(self.sample.counts_above(2.0)), 1)
        self.assertEqual(int(self.sample.counts_above(1.5)), 3)
        np.testing.assert_array_equal(self.sample.counts_above(np.array([0.5, 3.0])), [4, 0])

    def test_top_log_sum(self):
        self.assertAlmostEqual(float(self.sample.top_log_sum(2)), np.log(6.0), places=12)
        self.assertEqual(float(self.sample.top_log_sum(0)), 0.0)

    def test_empty(self):
        with self.assertRaises(ArgumentError):
            Sample([])

    def test_non_positive(self):
        with self.assertRaises(TailDomainError):
            Sample([1.0, -1.0])
        with self.assertRaises(TailDomainError):
            Sample([1.0, 0.0])
        with self.assertRaises(TailDomainError):
            Sample([1.0, float("nan")])
        with self.assertRaises(TailDomainError):
            Sample([1.0, float("inf")])

    def test_immutable(self):
        with self.assertRaises(AttributeError):
            self.sample._desc = np.zeros(4)
        with self.assertRaises(ValueError):
            self.sample.desc[0] = 10.0

    def test_power(self):
        np.testing.assert_allclose(self.sample.power(2.0).desc, [9.0, 4.0, 4.0, 1.0])
        with self.assertRaises(TailDomainError):
            self.sample.power(0.0)


if __name__ == '__main__':
    unittest.main()
