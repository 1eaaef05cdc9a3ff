"""Independent reference values: explicit power series with exact rational coefficients."""

import math
from fractions import Fraction


def hermite_terms(n, x):
    """Terms of H_n(x) = n! sum_m (-1)^m (2x)^(n-2m) / (m! (n-2m)!)."""
    out = []
    for m in range(n // 2 + 1):
        c = Fraction((-1) ** m * math.factorial(n), math.factorial(m) * math.factorial(n - 2 * m))
        out.append(float(c) * (2.0 * x) ** (n - 2 * m))
    return out


def laguerre_terms(p, alpha, x):
    """Terms of L_p^alpha(x) = sum_i (-1)^i C(p + alpha, p - i) x^i / i!."""
    out = []
    for i in range(p + 1):
        c = Fraction((-1) ** i * math.comb(p + alpha, p - i), math.factorial(i))
        out.append(float(c) * x**i)
    return out


def series(terms):
    """Value and the scale (sum of |terms|) that bounds its rounding error."""
    return math.fsum(terms), math.fsum(abs(t) for t in terms)
