"""Independent reference computations used by the tests.

None of these touch the package under test: they use exact rational
arithmetic, textbook algorithms, or closed forms.
"""
import math
from fractions import Fraction

import numpy as np


def datta_log2(t_low, t_high, kappa):
    """Refinement step count in base-2 form: ceil(t_high / (t_low - log2 kappa))."""
    denom = t_low - math.log2(kappa)
    if denom <= 0:
        return math.inf
    return math.ceil(t_high / denom)


def round_to_float32(x):
    """Round-to-nearest-even of a float to 24 significant bits, via exact rationals."""
    q = Fraction(x)
    if q == 0:
        return 0.0
    sign = -1 if q < 0 else 1
    q = abs(q)
    e = math.floor(math.log2(q))
    while Fraction(2) ** e > q:
        e -= 1
    while Fraction(2) ** (e + 1) <= q:
        e += 1
    # below the normal range the spacing is fixed at the smallest subnormal
    ulp = Fraction(2) ** max(e - 23, -149)
    m = q / ulp
    lo = math.floor(m)
    rem = m - lo
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and lo % 2 == 1):
        lo += 1
    return sign * float(lo * ulp)


def norm2_two_pass(x):
    """Scale by the largest magnitude first, then sum squares."""
    x = [float(v) for v in x]
    big = max((abs(v) for v in x), default=0.0)
    if big == 0.0:
        return 0.0
    return big * math.sqrt(math.fsum((v / big) ** 2 for v in x))


def jacobi_svd_values(a, sweeps=60, tol=1e-15):
    """Singular values by one-sided Jacobi rotations (Hestenes)."""
    u = np.array(a, dtype=float, copy=True)
    n = u.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if gamma == 0.0 or alpha == 0.0 or beta == 0.0:
                    continue
                off = max(off, abs(gamma) / (math.sqrt(alpha) * math.sqrt(beta)))
                zeta = (beta - alpha) / (2 * gamma)
                if abs(zeta) > 1e150:
                    t = 1 / (2 * zeta)
                else:
                    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1 + zeta * zeta))
                c = 1 / math.sqrt(1 + t * t)
                s = c * t
                up = u[:, p].copy()
                u[:, p] = c * up - s * u[:, q]
                u[:, q] = s * up + c * u[:, q]
        if off < tol:
            break
    return np.sort(np.linalg.norm(u, axis=0))[::-1]


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n)
    )


def cramer_solve(a, b):
    """Exact solution of a small integer system by Cramer's rule; None when singular."""
    m = [[Fraction(int(v)) for v in row] for row in a]
    d = _det(m)
    if d == 0:
        return None
    x = []
    for j in range(len(m)):
        mj = [row[:j] + [Fraction(int(b[i]))] + row[j + 1:] for i, row in enumerate(m)]
        x.append(_det(mj) / d)
    return x


def lsq_normal_equations(h, beta):
    """min ||beta e1 - H y|| via (H^T H) y = beta H^T e1."""
    h = np.asarray(h, dtype=float)
    rhs = beta * h[0, :]
    return np.linalg.solve(h.T @ h, rhs)
