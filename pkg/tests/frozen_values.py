"""Reference values computed once from tests/oracles.py and frozen here.

test_frozen_values.py recomputes them from the oracles so a silent edit to
either side is caught.
"""

# predicted refinement steps, float32 factorization / float64 residual
DATTA_SINGLE_DOUBLE = {1e1: 3, 1e2: 4, 1e3: 4, 1e4: 5, 1e5: 8, 1e6: 14}
# fixed double precision, kappa = 10
DATTA_DOUBLE_DOUBLE_K10 = 2

# nearest float32 to the float64 value of pi
PI_FLOAT32 = 3.1415927410125732

# [[4,2],[2,5]] x = [8,9]
CHOLESKY_EXAMPLE_X = (1.375, 1.25)
# [[4,3],[6,3]] x = [10,12]
LU_EXAMPLE_X = (1.0, 2.0)

# restart triples (m_in, m_out, m) of the sparse test set
RESTARTS = {
    1: (30, 20, 150),
    2: (20, 10, 40),
    3: (100, 9, 300),
    4: (10, 4, 18),
    5: (20, 20, 300),
    6: (20, 10, 50),
}
