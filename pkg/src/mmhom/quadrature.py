"""Gauss-Legendre rules and the radial Hankel transform built on them."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import jv

from .errors import NumericalError

MAX_NODES = 8192


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a, b):
    """Nodes and weights of the ``n``-point rule on ``[a, b]``."""
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def gauss_legendre_2d(n, half_width):
    """Tensor rule on the square ``[-half_width, half_width]^2``.

    Returns meshgrid-ed ``X, Y`` (indexing ``ij``) and the weight matrix.
    """
    x, w = gauss_legendre(n, -half_width, half_width)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return X, Y, np.outer(w, w)


def hankel(f, order, k, r_max, nodes=128, rtol=1e-10, atol=0.0):
    """Order-``order`` Hankel transform ``int_0^r_max f(r) J_order(k r) r dr``.

    ``f`` is a vectorised callable. The node count doubles until two
    successive estimates agree to ``rtol`` (relative to the largest
    magnitude); failure past ``MAX_NODES`` raises :class:`NumericalError`.
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.float64))
    order = abs(int(order))

    def estimate(n):
        r, w = gauss_legendre(n, 0.0, r_max)
        kernel = jv(order, np.outer(k, r))
        return kernel @ (w * r * f(r))

    n = int(nodes)
    prev = estimate(n)
    while True:
        n *= 2
        cur = estimate(n)
        scale = max(np.max(np.abs(cur)), 1e-300)
        err = np.max(np.abs(cur - prev))
        if err <= rtol * scale + atol:
            return cur
        if n >= MAX_NODES:
            raise NumericalError(
                "Hankel quadrature did not converge",
                {"nodes": n, "order": order, "r_max": r_max, "max_change": float(err), "scale": float(scale)},
            )
        prev = cur
