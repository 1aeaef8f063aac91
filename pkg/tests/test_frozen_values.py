import math

import numpy as np

from . import frozen_values as fv
from . import oracles


def test_datta_values_match_log2_oracle():
    for kappa, expected in fv.DATTA_SINGLE_DOUBLE.items():
        assert oracles.datta_log2(24, 53, kappa) == expected
    assert oracles.datta_log2(53, 53, 10.0) == fv.DATTA_DOUBLE_DOUBLE_K10
    assert oracles.datta_log2(24, 53, 1e8) == math.inf


def test_pi_rounding_oracle():
    assert oracles.round_to_float32(math.pi) == fv.PI_FLOAT32
    assert abs(fv.PI_FLOAT32 - math.pi) <= 2.0**-24 * math.pi


def test_rounding_oracle_agrees_with_hardware_on_samples():
    rng = np.random.default_rng(1)
    for x in rng.standard_normal(200) * 10.0 ** rng.integers(-20, 20, 200):
        assert oracles.round_to_float32(float(x)) == float(np.float32(x))


def test_cramer_examples():
    assert oracles.cramer_solve([[4, 2], [2, 5]], [8, 9]) == list(map(float, fv.CHOLESKY_EXAMPLE_X))
    assert oracles.cramer_solve([[4, 3], [6, 3]], [10, 12]) == list(map(float, fv.LU_EXAMPLE_X))
    assert oracles.cramer_solve([[1, 2], [2, 4]], [1, 1]) is None


def test_jacobi_svd_oracle_against_diagonal():
    a = np.diag([3.0, 1.0, 7.0])
    np.testing.assert_allclose(oracles.jacobi_svd_values(a), [7, 3, 1])
