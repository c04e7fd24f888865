"""Independent reference computations used to freeze expected values.

Nothing here imports the package's numerical code paths; each function
recomputes a quantity from first principles.
"""

import math
from fractions import Fraction

import numpy as np
from scipy import integrate


def j0_series(x, terms=120):
    """J0 from its power series, summed in exact rational arithmetic."""
    q = Fraction(x) ** 2 / 4
    total, term = Fraction(0), Fraction(1)
    for k in range(terms):
        if k > 0:
            term *= -q / (k * k)
        total += term
    return float(total)


def q_tail(x):
    """Gaussian upper tail by adaptive integration of the density."""
    val, _ = integrate.quad(lambda u: math.exp(-u * u / 2) / math.sqrt(2 * math.pi), x, math.inf,
                            epsabs=0, epsrel=1e-13)
    return val


def q_inverse_bisect(p, lo=-40.0, hi=40.0):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * math.erfc(mid / math.sqrt(2)) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def inv2x2(m):
    """Cofactor inverse and determinant of a 2x2 matrix."""
    (a, b), (c, d) = m
    det = a * d - b * c
    return np.array([[d, -b], [-c, a]]) / det, det


def gauss_mi_bits(cov, a, b):
    """I(A;B) for a complex Gaussian by direct determinants (no reductions)."""
    cov = np.asarray(cov)
    ab = list(a) + list(b)
    d = lambda idx: np.linalg.det(cov[np.ix_(idx, idx)]).real
    return math.log2(d(a) * d(b) / d(ab))


def kl_direct_bits(p, q):
    p, q = np.asarray(p), np.asarray(q)
    k = p.shape[0]
    qi = np.linalg.inv(q)
    return (np.trace(qi @ p).real - k - math.log(np.linalg.det(p).real / np.linalg.det(q).real)) / math.log(2)


def pla_direct_bits(joint, i_xl, i_x1, obs):
    """PLA rate from the attack covariance written down directly.

    Under attack x(2t+1) has variance var_x and E[x_att x1^*] = r_l^H Rz^+ r_1.
    """
    joint = np.asarray(joint)
    rz = joint[np.ix_(obs, obs)]
    r_l = joint[obs, i_xl]
    r_1 = joint[obs, i_x1]
    c = np.conj(r_l) @ np.linalg.pinv(rz) @ r_1
    legit = joint[np.ix_([i_xl, i_x1], [i_xl, i_x1])]
    attack = legit.copy()
    attack[0, 1] = c
    attack[1, 0] = np.conj(c)
    return kl_direct_bits(legit, attack)


def _cell_probs(mean, sd, thresholds):
    edges = np.concatenate([[-np.inf], thresholds, [np.inf]])
    cdf = np.array([0.5 * math.erfc(-(e - mean) / (sd * math.sqrt(2))) if np.isfinite(e)
                    else (0.0 if e < 0 else 1.0) for e in edges])
    return np.diff(cdf)


def quantized_entropy_1d(sd, thresholds):
    p = _cell_probs(0.0, sd, thresholds)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def acbca_closed_inner(sz2, sy2, thresholds):
    """2 H(<Re y> | Re z_hat) with the inner Gaussian integral done analytically.

    Re y | b ~ N(b / (1 + sz2), sz2 / (2 (1 + sz2)) + sy2 / 2); the outer
    integral over b ~ N(0, (1 + sz2)/2) uses adaptive quadrature.
    """
    var_b = (1 + sz2) / 2
    sd_c = math.sqrt(sz2 / (2 * (1 + sz2)) + sy2 / 2)

    def f(b):
        p = _cell_probs(b / (1 + sz2), sd_c, thresholds)
        p = p[p > 1e-300]
        h = -(p * np.log2(p)).sum()
        return h * math.exp(-b * b / (2 * var_b)) / math.sqrt(2 * math.pi * var_b)

    lim = 12 * math.sqrt(var_b)
    val, _ = integrate.quad(f, -lim, lim, limit=400, epsabs=1e-12, epsrel=1e-11)
    return 2 * val


def unit_gain_bruteforce(alpha_a, alpha_b, grid=20001):
    """Residual q coefficients minimizing c_A^2 g_A^2 + c_B^2 g_B^2 with c . alpha = 1."""
    ga2, gb2 = 1 - alpha_a ** 2, 1 - alpha_b ** 2
    # parametrize c_A, solve c_B from the constraint (alpha_b > 0 assumed)
    best = None
    for lo, hi in [(-3.0, 3.0)]:
        for _ in range(6):
            ca = np.linspace(lo, hi, grid)
            cb = (1 - alpha_a * ca) / alpha_b
            cost = ca ** 2 * ga2 + cb ** 2 * gb2
            k = int(np.argmin(cost))
            best = (ca[k], cb[k])
            step = (hi - lo) / (grid - 1)
            lo, hi = ca[k] - 2 * step, ca[k] + 2 * step
    ca, cb = best
    return ca * math.sqrt(ga2), cb * math.sqrt(gb2)
