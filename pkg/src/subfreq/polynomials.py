"""Exact rational polynomial calculus in exponential coordinates (z, t).

Monomials are indexed by multi-indices (a, b) with a over the z variables
and b over the t variables.  The stratified degree of a monomial is
|a| + w|b| where the layer weight w is 2 for step-2 groups and alpha+1 for
the symbolic (integer-alpha) Baouendi calculus.
"""

import json
from fractions import Fraction

import numpy as np

from . import exactla
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NonIntegerAlpha,
    ParseError,
)


class Polynomial:
    """Immutable polynomial with exact rational coefficients."""

    __slots__ = ("m", "k", "tweight", "terms")

    def __init__(self, m, k, tweight, terms=None):
        self.m = m
        self.k = k
        self.tweight = tweight
        clean = {}
        for key, coeff in (terms or {}).items():
            coeff = exactla.to_fraction(coeff)
            if coeff != 0:
                a, b = key
                clean[(tuple(a), tuple(b))] = coeff
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, m, k, tweight=2):
        return cls(m, k, tweight, {})

    @classmethod
    def constant(cls, m, k, c, tweight=2):
        return cls(m, k, tweight, {((0,) * m, (0,) * k): c})

    @classmethod
    def monomial(cls, m, k, a, b, coeff=1, tweight=2):
        return cls(m, k, tweight, {(tuple(a), tuple(b)): coeff})

    @classmethod
    def z_var(cls, m, k, i, tweight=2):
        a = [0] * m
        a[i] = 1
        return cls.monomial(m, k, a, (0,) * k, 1, tweight)

    @classmethod
    def t_var(cls, m, k, ell, tweight=2):
        b = [0] * k
        b[ell] = 1
        return cls.monomial(m, k, (0,) * m, b, 1, tweight)

    @classmethod
    def z_norm_sq(cls, m, k, tweight=2):
        terms = {}
        for i in range(m):
            a = [0] * m
            a[i] = 2
            terms[(tuple(a), (0,) * k)] = Fraction(1)
        return cls(m, k, tweight, terms)

    @classmethod
    def t_norm_sq(cls, m, k, tweight=2):
        terms = {}
        for ell in range(k):
            b = [0] * k
            b[ell] = 2
            terms[((0,) * m, tuple(b))] = Fraction(1)
        return cls(m, k, tweight, terms)

    # -- basic algebra -----------------------------------------------------

    def _like(self, terms):
        return Polynomial(self.m, self.k, self.tweight, terms)

    def _check(self, other):
        if (self.m, self.k, self.tweight) != (other.m, other.k, other.tweight):
            raise DimensionMismatch("polynomial contexts differ")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.m, self.k, other, self.tweight)
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = exactla.to_fraction(other)
            return self._like({key: c * other for key, c in self.terms.items()})
        self._check(other)
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return self._like(terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.m, self.k, 1, self.tweight)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return ((self.m, self.k, self.tweight) == (other.m, other.k, other.tweight)
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.m, self.k, self.tweight, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    # -- calculus ----------------------------------------------------------

    def diff_z(self, i):
        if not 0 <= i < self.m:
            raise IndexOutOfRange(f"z index {i} outside 0..{self.m - 1}")
        terms = {}
        for (a, b), c in self.terms.items():
            if a[i] > 0:
                na = list(a)
                na[i] -= 1
                key = (tuple(na), b)
                terms[key] = terms.get(key, Fraction(0)) + c * a[i]
        return self._like(terms)

    def diff_t(self, ell):
        if not 0 <= ell < self.k:
            raise IndexOutOfRange(f"t index {ell} outside 0..{self.k - 1}")
        terms = {}
        for (a, b), c in self.terms.items():
            if b[ell] > 0:
                nb = list(b)
                nb[ell] -= 1
                key = (a, tuple(nb))
                terms[key] = terms.get(key, Fraction(0)) + c * b[ell]
        return self._like(terms)

    # -- degree structure --------------------------------------------------

    def stratified_degree(self, key):
        a, b = key
        return sum(a) + self.tweight * sum(b)

    def degree(self):
        if not self.terms:
            return -1
        return max(self.stratified_degree(key) for key in self.terms)

    def is_homogeneous(self, kappa=None):
        degs = {self.stratified_degree(key) for key in self.terms}
        if kappa is None:
            return len(degs) <= 1
        return degs <= {kappa}

    def homogeneous_part(self, kappa):
        return self._like({key: c for key, c in self.terms.items()
                           if self.stratified_degree(key) == kappa})

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, z, t):
        """Evaluate at points; z has shape (..., m), t shape (..., k)."""
        z = np.asarray(z, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.zeros(z.shape[:-1], dtype=float)
        for (a, b), c in self.terms.items():
            term = np.full(z.shape[:-1], float(c))
            for i, p in enumerate(a):
                if p:
                    term = term * z[..., i] ** p
            for ell, p in enumerate(b):
                if p:
                    term = term * t[..., ell] ** p
            out += term
        return out

    def substitute(self, z_subs, t_subs):
        """Substitute polynomials for each variable."""
        result = Polynomial.zero(self.m, self.k, self.tweight)
        one = Polynomial.constant(self.m, self.k, 1, self.tweight)
        for (a, b), c in self.terms.items():
            prod = one * c
            for i, p in enumerate(a):
                if p:
                    prod = prod * (z_subs[i] ** p)
            for ell, p in enumerate(b):
                if p:
                    prod = prod * (t_subs[ell] ** p)
            result = result + prod
        return result

    def compose_dilation(self, lam):
        """p(delta_lam .) with exact rational lam."""
        lam = exactla.to_fraction(lam)
        terms = {}
        for (a, b), c in self.terms.items():
            terms[(a, b)] = c * lam ** self.stratified_degree((a, b))
        return self._like(terms)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        items = sorted(self.terms.items())
        return [{"coeff": str(c), "z": list(a), "t": list(b)}
                for (a, b), c in items]

    @classmethod
    def from_json(cls, data, m=None, k=None, tweight=2):
        try:
            if isinstance(data, str):
                data = json.loads(data)
            terms = {}
            for item in data:
                a = tuple(int(x) for x in item["z"])
                b = tuple(int(x) for x in item["t"])
                if m is None:
                    m, k = len(a), len(b)
                if len(a) != m or len(b) != k:
                    raise DimensionMismatch("inconsistent multi-index lengths")
                key = (a, b)
                terms[key] = terms.get(key, Fraction(0)) + Fraction(item["coeff"])
            if m is None:
                raise ParseError("empty polynomial file needs explicit dimensions")
            return cls(m, k, tweight, terms)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DimensionMismatch):
                raise
            raise ParseError(f"bad polynomial data: {exc}") from exc

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            vars_ = "".join(f"z{i + 1}^{p}" if p != 1 else f"z{i + 1}"
                            for i, p in enumerate(a) if p)
            vars_ += "".join(f"t{l + 1}^{p}" if p != 1 else f"t{l + 1}"
                             for l, p in enumerate(b) if p)
            bits.append(f"{c}{'*' if vars_ else ''}{vars_}")
        return "Polynomial(" + " + ".join(bits) + ")"


# -- group vector fields ---------------------------------------------------


def _check_group_poly(G, p):
    if p.m != G.m or p.k != G.k or p.tweight != 2:
        raise DimensionMismatch("polynomial does not match the group")


def _jz_component(G, ell, i):
    """<J_l z, e_i> as a polynomial (degree 1 in z)."""
    terms = {}
    for j in range(G.m):
        c = G.J[ell][i][j]
        if c != 0:
            a = [0] * G.m
            a[j] = 1
            terms[(tuple(a), (0,) * G.k)] = c
    return Polynomial(G.m, G.k, 2, terms)


def apply_X(G, i, p):
    """X_i = d_{z_i} + (1/2) sum_l <J_l z, e_i> d_{t_l}."""
    _check_group_poly(G, p)
    if not 0 <= i < G.m:
        raise IndexOutOfRange(f"field index {i} outside 0..{G.m - 1}")
    result = p.diff_z(i)
    for ell in range(G.k):
        result = result + _jz_component(G, ell, i) * p.diff_t(ell) * Fraction(1, 2)
    return result


def apply_theta(G, ell, p):
    """Theta_l = sum_i <J_l z, e_i> d_{z_i}."""
    _check_group_poly(G, p)
    if not 0 <= ell < G.k:
        raise IndexOutOfRange(f"layer index {ell} outside 0..{G.k - 1}")
    result = Polynomial.zero(G.m, G.k, 2)
    for i in range(G.m):
        result = result + _jz_component(G, ell, i) * p.diff_z(i)
    return result


def sublaplacian(G, p):
    """Delta_H = Delta_z + (1/4) sum <J_l z, J_l' z> d_{t_l} d_{t_l'}
    + sum d_{t_l} Theta_l."""
    _check_group_poly(G, p)
    result = Polynomial.zero(G.m, G.k, 2)
    for i in range(G.m):
        result = result + p.diff_z(i).diff_z(i)
    for l1 in range(G.k):
        for l2 in range(G.k):
            inner = Polynomial.zero(G.m, G.k, 2)
            for i in range(G.m):
                inner = inner + _jz_component(G, l1, i) * _jz_component(G, l2, i)
            result = result + inner * p.diff_t(l1).diff_t(l2) * Fraction(1, 4)
    for ell in range(G.k):
        result = result + apply_theta(G, ell, p.diff_t(ell))
    return result


def euler_Z(G, p):
    """Z = sum z_i d_{z_i} + 2 sum t_l d_{t_l}."""
    _check_group_poly(G, p)
    return euler(p)


def euler(p):
    """The Euler field of the dilation structure encoded in tweight."""
    result = Polynomial.zero(p.m, p.k, p.tweight)
    for i in range(p.m):
        result = result + Polynomial.z_var(p.m, p.k, i, p.tweight) * p.diff_z(i)
    for ell in range(p.k):
        result = result + (Polynomial.t_var(p.m, p.k, ell, p.tweight)
                           * p.diff_t(ell) * p.tweight)
    return result


def discrepancy_poly(G, p):
    """Numerator sum_l t_l Theta_l(p) of the discrepancy (H-type only).

    The discrepancy itself is this polynomial times 4 / rho^3.
    """
    G.require_htype("discrepancy_poly")
    _check_group_poly(G, p)
    result = Polynomial.zero(G.m, G.k, 2)
    for ell in range(G.k):
        result = result + Polynomial.t_var(G.m, G.k, ell) * apply_theta(G, ell, p)
    return result


def left_translate(G, p, g0):
    """p composed with the left translation h -> g0 * h, exactly.

    g0 must have rational (or integer) coordinates.
    """
    _check_group_poly(G, p)
    z0 = [exactla.to_fraction(x) for x in g0.z]
    t0 = [exactla.to_fraction(x) for x in g0.t]
    z_subs = [Polynomial.constant(G.m, G.k, z0[i]) + Polynomial.z_var(G.m, G.k, i)
              for i in range(G.m)]
    t_subs = []
    for ell in range(G.k):
        sub = Polynomial.constant(G.m, G.k, t0[ell]) + Polynomial.t_var(G.m, G.k, ell)
        for i in range(G.m):
            coeff = sum(G.J[ell][i][j] * z0[j] for j in range(G.m))
            if coeff != 0:
                sub = sub + Polynomial.z_var(G.m, G.k, i) * (coeff / 2)
        t_subs.append(sub)
    return p.substitute(z_subs, t_subs)


# -- Baouendi operator (symbolic, integer alpha) ---------------------------


def baouendi_apply(spec, p):
    """B_alpha p = Delta_z p + (|z|^(2 alpha) / 4) Delta_t p, exact.

    Requires a positive integer alpha so that |z|^(2 alpha) is polynomial.
    """
    alpha = spec.alpha
    if not (isinstance(alpha, int) or (isinstance(alpha, Fraction) and alpha.denominator == 1)
            or (isinstance(alpha, float) and alpha.is_integer())):
        raise NonIntegerAlpha(f"symbolic B_alpha needs integer alpha, got {alpha}")
    alpha = int(alpha)
    if alpha < 1:
        raise NonIntegerAlpha("alpha must be a positive integer")
    if p.m != spec.m or p.k != spec.k or p.tweight != alpha + 1:
        raise DimensionMismatch("polynomial does not match the Baouendi spec")
    result = Polynomial.zero(p.m, p.k, p.tweight)
    for i in range(p.m):
        result = result + p.diff_z(i).diff_z(i)
    lap_t = Polynomial.zero(p.m, p.k, p.tweight)
    for ell in range(p.k):
        lap_t = lap_t + p.diff_t(ell).diff_t(ell)
    if not lap_t.is_zero():
        weight = Polynomial.z_norm_sq(p.m, p.k, p.tweight) ** alpha
        result = result + weight * lap_t * Fraction(1, 4)
    return result


# -- solid harmonic bases --------------------------------------------------


def _monomials_of_degree(m, k, tweight, kappa):
    """All multi-indices (a, b) with |a| + tweight*|b| = kappa, lex sorted."""

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    result = []
    for tdeg in range(kappa // tweight + 1):
        zdeg = kappa - tweight * tdeg
        if zdeg < 0:
            continue
        for a in compositions(zdeg, m):
            for b in compositions(tdeg, k):
                result.append((a, b))
    return sorted(result)


def harmonic_basis(G, kappa):
    """Exact basis of delta-homogeneous degree-kappa polynomials with
    Delta_H p = 0, via rational kernel computation.

    Basis vectors have integer-cleared coefficients and a deterministic
    order (one vector per free column of the reduced operator matrix).
    """
    if kappa < 0:
        raise DimensionMismatch("kappa must be >= 0")
    source = _monomials_of_degree(G.m, G.k, 2, kappa)
    if kappa < 2:
        return [Polynomial.monomial(G.m, G.k, a, b) for a, b in source]
    target = _monomials_of_degree(G.m, G.k, 2, kappa - 2)
    index = {key: r for r, key in enumerate(target)}
    rows = [[Fraction(0)] * len(source) for _ in target]
    for col, (a, b) in enumerate(source):
        image = sublaplacian(G, Polynomial.monomial(G.m, G.k, a, b))
        for key, c in image.terms.items():
            rows[index[key]][col] = c
    kernel = exactla.kernel_basis(rows, len(source))
    basis = []
    for vec in kernel:
        terms = {source[i]: c for i, c in enumerate(vec) if c != 0}
        basis.append(Polynomial(G.m, G.k, 2, terms))
    return basis


def in_span(p, basis):
    """Exact membership of p in the rational span of the basis."""
    keys = sorted({key for q in basis for key in q.terms} | set(p.terms))
    index = {key: i for i, key in enumerate(keys)}
    rows = []
    for q in basis:
        row = [Fraction(0)] * len(keys)
        for key, c in q.terms.items():
            row[index[key]] = c
        rows.append(row)
    base_rank = exactla.rank(rows)
    row = [Fraction(0)] * len(keys)
    for key, c in p.terms.items():
        row[index[key]] = c
    return exactla.rank(rows + [row]) == base_rank
