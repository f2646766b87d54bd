"""Normalization constants of the fundamental solutions.

For the gauge rho_a = (|z|^(2(a+1)) + 4(a+1)^2|t|^2)^(1/(2(a+1))) on
R^m x R^k the fundamental solution with pole at the origin is
Gamma = C * rho_a^(2-Q), Q = m + (a+1)k, where

    C^-1 = (m+a-1)(Q-2) * int_{R^N} |z|^(a-1)
           / [ (|z|^(a+1)+1)^2 + 4(a+1)^2|t|^2 ]^((Q+2a)/(2(a+1))) dz dt.

A group of Heisenberg type is the case a = 1, where the gauge becomes
(|z|^4 + 16|t|^2)^(1/4).  This module evaluates the defining integral
two independent ways: a deterministic product quadrature and an
importance-sampled Monte-Carlo estimator with a reported standard error.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import InsufficientSamples


def sphere_area(d):
    """Surface measure of the unit sphere S^(d-1) in R^d (2 for d=1)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _radial_integrand(a_r, b_r, m, k, alpha):
    """Integrand of the defining integral reduced to radial variables.

    a_r = |z|, b_r = |t|; the angular factors are handled by the caller.
    """
    q = m + (alpha + 1.0) * k
    power = (q + 2.0 * alpha) / (2.0 * (alpha + 1.0))
    base = (a_r ** (alpha + 1.0) + 1.0) ** 2 + 4.0 * (alpha + 1.0) ** 2 * b_r ** 2
    return a_r ** (m + alpha - 2.0) * b_r ** (k - 1.0) / base ** power


def _defining_integral_quadrature(m, k, alpha, n=240):
    """Deterministic value of the full R^N integral (angular part included)."""
    x, w = roots_legendre(n)
    # map (-1,1) -> (0,1) -> (0,inf) via u/(1-u)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    r = u / (1.0 - u)
    jac = 1.0 / (1.0 - u) ** 2
    a_r = r[:, None]
    b_r = r[None, :]
    vals = _radial_integrand(a_r, b_r, m, k, alpha)
    vals = vals * (wu * jac)[:, None] * (wu * jac)[None, :]
    return sphere_area(m) * sphere_area(k) * float(vals.sum())


def _defining_integral_mc(m, k, alpha, samples, seed):
    """Importance-sampled MC value of the same integral, with stderr.

    Radial variables are drawn from independent half-Cauchy distributions,
    which have the right algebraic tails for this integrand.
    """
    if samples < 1000:
        raise InsufficientSamples(f"need >= 1000 samples, got {samples}")
    rng = np.random.Generator(np.random.Philox(seed))
    u1 = rng.random(samples)
    u2 = rng.random(samples)
    a_r = np.tan(0.5 * math.pi * u1)
    b_r = np.tan(0.5 * math.pi * u2)
    pdf = (2.0 / math.pi / (1.0 + a_r ** 2)) * (2.0 / math.pi / (1.0 + b_r ** 2))
    vals = _radial_integrand(a_r, b_r, m, k, alpha) / pdf
    vals *= sphere_area(m) * sphere_area(k)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples))
    return mean, stderr


@lru_cache(maxsize=None)
def gauge_constant(m, k, alpha=1.0):
    """The constant C in Gamma = C * rho_a^(2-Q) (deterministic quadrature)."""
    q = m + (alpha + 1.0) * k
    integral = _defining_integral_quadrature(m, k, alpha)
    return 1.0 / ((m + alpha - 1.0) * (q - 2.0) * integral)


def gauge_constant_mc(m, k, alpha=1.0, samples=200_000, seed=0):
    """MC estimate of the same constant; returns (value, stderr)."""
    q = m + (alpha + 1.0) * k
    integral, ierr = _defining_integral_mc(m, k, alpha, samples, seed)
    factor = (m + alpha - 1.0) * (q - 2.0)
    value = 1.0 / (factor * integral)
    # first-order error propagation through the reciprocal
    stderr = ierr / (factor * integral ** 2)
    return value, stderr
