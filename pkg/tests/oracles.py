"""Independent reference implementations used to pin expected values.

Everything here is written the slow, obvious way on purpose: digit
expansions by repeated multiplication, double sums, brute matrix powers,
adaptive quadrature, high-precision special functions.  Tests compare the
package against these, never the other way round.
"""

from fractions import Fraction
from math import exp

import mpmath
from scipy.integrate import quad


def digit_expansion(y, base, n):
    """Integer part and first n fractional digits of y >= 0."""
    y = Fraction(y)
    whole = int(y)
    frac = y - whole
    digits = []
    for _ in range(n):
        frac *= base
        d = int(frac)
        digits.append(d)
        frac -= d
    return whole, digits


def dist_to_int_frac(y) -> Fraction:
    y = Fraction(y)
    lo = y - int(y) if y >= 0 else y - (int(y) - 1)
    return min(lo, 1 - lo)


def psi_direct(base, k, y) -> Fraction:
    scale = Fraction(base) ** (k - 1)
    return dist_to_int_frac(Fraction(y) * scale) / scale


def psi_plus_direct(base, k, y) -> int:
    scale = Fraction(base) ** (k - 1)
    arg = Fraction(y) * scale
    frac = arg - int(arg)
    return 1 if frac < Fraction(1, 2) else -1


def f_partial_direct(base, y, terms) -> Fraction:
    return sum(psi_direct(base, k, y) for k in range(1, terms + 1))


def agreement_depth(base, y1, y2, kmax) -> int:
    """Largest k <= kmax with the first k digits equal, -1 on integer-part
    mismatch, 0 when only the integer parts agree."""
    w1, d1 = digit_expansion(y1, base, kmax)
    w2, d2 = digit_expansion(y2, base, kmax)
    if w1 != w2:
        return -1
    k = 0
    while k < kmax and d1[k] == d2[k]:
        k += 1
    return k


def matrix_power_brute(p, m):
    q = [[p, 1.0 - p], [1.0 - p, p]]
    out = [[1.0, 0.0], [0.0, 1.0]]
    for _ in range(m):
        out = [[sum(out[i][t] * q[t][j] for t in range(2)) for j in range(2)]
               for i in range(2)]
    return out


def second_moment_double_sum(p, terms, m, n) -> float:
    """Brute double sum over m < k, l <= n; terms is a callable k -> a_k."""
    alpha = 2.0 * p - 1.0
    total = 0.0
    for k in range(m + 1, n + 1):
        ak = float(terms(k))
        for l in range(m + 1, n + 1):
            al = float(terms(l))
            j = abs(k - l)
            corr = 1.0 if j == 0 else alpha ** j
            total += ak * al * corr
    return total


def spectral_integral(p, j) -> float:
    """Adaptive quadrature of the covariance integral, order j."""
    alpha = 2.0 * p - 1.0

    def density(lam):
        from math import cos, pi
        return (1.0 - alpha * alpha) / (
            2.0 * pi * (1.0 - 2.0 * alpha * cos(lam) + alpha * alpha))

    from math import cos, pi
    val, err = quad(lambda lam: 2.0 * cos(j * lam) * density(lam), 0.0, pi,
                    limit=200)
    assert err < 1e-8  # quad's estimate is conservative near alpha = -1/2
    return val


def normal_cdf_mp(y) -> float:
    with mpmath.workdps(40):
        return float(mpmath.ncdf(y))


def kolmogorov_sf(z: float, terms: int = 100) -> float:
    """P(sup|B| > z) for the Kolmogorov distribution, by its series."""
    if z <= 0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        total += (-1) ** (k - 1) * exp(-2.0 * k * k * z * z)
    return 2.0 * total


def kolmogorov_quantile(confidence: float) -> float:
    """z with P(sup <= z) = confidence, by bisection."""
    lo, hi = 0.01, 4.0
    target = 1.0 - confidence
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
