"""Named test functions used by the verification battery and the tests."""

from fractions import Fraction

from .groups import heisenberg
from .polynomials import Polynomial, sublaplacian


def h1():
    return heisenberg(1)


def poly_x(G):
    return Polynomial.z_var(G.m, G.k, 0)


def poly_y(G):
    return Polynomial.z_var(G.m, G.k, 1)


def poly_t(G):
    return Polynomial.t_var(G.m, G.k, 0)


def poly_x2_minus_y2(G):
    x = poly_x(G)
    y = poly_y(G)
    return x * x - y * y


def quartic_cylindrical(G):
    """|z|^4 + c t^2 with c derived so the polynomial is harmonic.

    Cylindrically symmetric, hence has vanishing discrepancy."""
    zn = Polynomial.z_norm_sq(G.m, G.k)
    tn = Polynomial.t_norm_sq(G.m, G.k)
    img_z = sublaplacian(G, zn * zn)
    img_t = sublaplacian(G, tn)
    ratios = {key: c / img_t.terms[key] for key, c in img_z.terms.items()}
    vals = set(ratios.values())
    assert len(vals) == 1
    c = -vals.pop()
    p = zn * zn + tn * c
    assert sublaplacian(G, p).is_zero()
    return p


def one_plus_t(G):
    return Polynomial.constant(G.m, G.k, 1) + poly_t(G)


def mixed_cylindrical(G, c=Fraction(1, 10)):
    """t + c * (quartic cylindrical harmonic): non-homogeneous, harmonic,
    vanishing discrepancy."""
    return poly_t(G) + quartic_cylindrical(G) * c


def random_polynomial(rng, m, k, tweight=2, max_degree=5, n_terms=6):
    """Random sparse polynomial with small integer coefficients."""
    terms = {}
    for _ in range(n_terms):
        a = tuple(int(rng.integers(0, max_degree + 1)) for _ in range(m))
        b = tuple(int(rng.integers(0, max_degree // tweight + 1)) for _ in range(k))
        coeff = int(rng.integers(-9, 10))
        if coeff:
            terms[(a, b)] = terms.get((a, b), 0) + coeff
    return Polynomial(m, k, tweight, terms)


def harmonic_with_discrepancy(G):
    """x + y t - x |z|^2 / 8 on H^1: harmonic, nonzero discrepancy, and the
    discrepancy surface term in the first variation does not integrate to
    zero (unlike for the bare coordinate function x)."""
    x = poly_x(G)
    y = poly_y(G)
    t = poly_t(G)
    zn = Polynomial.z_norm_sq(G.m, G.k)
    u = x + y * t - x * zn * Fraction(1, 8)
    assert sublaplacian(G, u).is_zero()
    return u
