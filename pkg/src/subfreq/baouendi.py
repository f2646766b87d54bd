"""The degenerate operators B_a = Delta_z + (|z|^(2a)/4) Delta_t.

Gauge, weight and Euler operator; quadratic solid harmonics with the
symbolically derived constant; Almgren/Weiss/Monneau functionals (shared
with the frequency module, since the geometry coincides with the group
case at alpha = 1); and a finite-difference Dirichlet solver that
produces honest non-polynomial solutions at desk scale.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from . import constants
from .errors import (
    BadGrid,
    DimensionMismatch,
    NoConvergence,
    NonIntegerAlpha,
    OriginSingularity,
    ParseError,
)
from .frequency import (
    FunctionHandle,
    check_monneau_derivative,
    check_weiss_derivative,
    frequency,
    monneau,
    weiss,
)
from .polynomials import Polynomial, baouendi_apply, euler


@dataclass(frozen=True)
class BaouendiSpec:
    """(m, k, alpha) with homogeneous dimension Q = m + (alpha+1) k."""

    m: int
    k: int
    alpha: float
    N: int = field(init=False)
    Q: float = field(init=False)

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise DimensionMismatch("m and k must be positive")
        if not self.alpha > 0:
            raise DimensionMismatch("alpha must be > 0")
        object.__setattr__(self, "N", self.m + self.k)
        object.__setattr__(self, "Q", self.m + (self.alpha + 1.0) * self.k)

    def integer_alpha(self):
        a = self.alpha
        if isinstance(a, int):
            return a
        if isinstance(a, float) and a.is_integer():
            return int(a)
        raise NonIntegerAlpha(f"operation needs integer alpha, got {a}")


def rho_alpha(spec, z, t):
    """Gauge (|z|^(2(a+1)) + 4(a+1)^2 |t|^2)^(1/(2(a+1))), vectorized."""
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    a1 = spec.alpha + 1.0
    return (np.sum(z ** 2, axis=-1) ** a1
            + 4.0 * a1 ** 2 * np.sum(t ** 2, axis=-1)) ** (1.0 / (2.0 * a1))


def psi_alpha(spec, z, t):
    """Weight |grad_a rho_a|^2 = |z|^(2a) / rho_a^(2a)."""
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    rho = rho_alpha(spec, z, t)
    if np.any(rho == 0.0):
        raise OriginSingularity("psi_alpha is undefined at the origin")
    return np.sum(z ** 2, axis=-1) ** spec.alpha / rho ** (2.0 * spec.alpha)


def dilate_alpha(spec, lam, z, t):
    """(z, t) -> (lam z, lam^(a+1) t)."""
    return lam * np.asarray(z, float), lam ** (spec.alpha + 1.0) * np.asarray(t, float)


def z_alpha_apply(spec, u):
    """Euler operator Z_a = sum z_i d_{z_i} + (a+1) sum t_j d_{t_j}.

    Exact on polynomials with matching layer weight; on anything carrying a
    .zu evaluator (FunctionHandle / GridSolution handles) delegates to it.
    """
    if isinstance(u, Polynomial):
        a = spec.integer_alpha()
        if u.tweight != a + 1:
            raise DimensionMismatch("polynomial layer weight does not match alpha+1")
        return euler(u)
    if isinstance(u, FunctionHandle):
        return u.zu
    raise TypeError("expected a Polynomial or FunctionHandle")


def solid_harmonic_quadratic(spec):
    """P = |z|^(2(a+1)) - A |t|^2 with A derived from B_a P = 0.

    The constant is not hard-coded: it is the exact ratio of the two
    symbolic images B_a(|z|^(2(a+1))) and B_a(|t|^2), and the result is
    verified to be annihilated exactly.
    """
    a = spec.integer_alpha()
    tweight = a + 1
    znorm = Polynomial.z_norm_sq(spec.m, spec.k, tweight)
    tnorm = Polynomial.t_norm_sq(spec.m, spec.k, tweight)
    lead = znorm ** (a + 1)
    img_lead = baouendi_apply(spec, lead)      # c * |z|^(2a)
    img_tn = baouendi_apply(spec, tnorm)       # (k/2) * |z|^(2a)
    ratio = None
    for key, c in img_lead.terms.items():
        other = img_tn.terms.get(key)
        if other is None:
            raise ArithmeticError("unexpected monomial structure in B_a images")
        if ratio is None:
            ratio = c / other
        elif ratio != c / other:
            raise ArithmeticError("B_a images are not proportional")
    big_a = ratio
    p = lead - tnorm * big_a
    assert baouendi_apply(spec, p).is_zero()
    return p


def derived_quadratic_constant(spec):
    """The exact A of solid_harmonic_quadratic, as a Fraction."""
    p = solid_harmonic_quadratic(spec)
    tn_key = next(iter(Polynomial.t_norm_sq(spec.m, spec.k,
                                            spec.integer_alpha() + 1).terms))
    return -p.terms[tn_key]


def orthogonality_check(spec, p, p_prime, r, rule):
    """Surface inner product int_{S_r} P P' psi_a dH/|grad rho_a|.

    Vanishes for solid harmonics of distinct homogeneity degrees."""
    from .quadrature import surface_integral

    hp = p if isinstance(p, FunctionHandle) else FunctionHandle.from_polynomial(spec, p)
    hq = (p_prime if isinstance(p_prime, FunctionHandle)
          else FunctionHandle.from_polynomial(spec, p_prime))
    return surface_integral(lambda z, t: hp.value(z, t) * hq.value(z, t),
                            r, rule, weighted=True)


def normalization_constant(spec, samples=200_000, seed=0):
    """The constant C_a of Gamma = C_a rho_a^(2-Q), by two estimators.

    Returns {"value": deterministic quadrature, "mc": MC value,
    "mc_stderr": its standard error}."""
    det = constants.gauge_constant(spec.m, spec.k, float(spec.alpha))
    mc, err = constants.gauge_constant_mc(spec.m, spec.k, float(spec.alpha),
                                          samples=samples, seed=seed)
    return {"value": det, "mc": mc, "mc_stderr": err}


# -- finite-difference Dirichlet solver ------------------------------------


@dataclass
class GridSolution:
    """Nodal solution of B_a u = 0 on a tensor grid over (z, t)."""

    spec: BaouendiSpec
    box: tuple          # ((lo, hi), ...) per axis, z axes first
    axes: tuple         # per-axis node arrays
    values: np.ndarray  # full grid including boundary
    residual: float

    def as_handle(self):
        """FunctionHandle evaluating by multilinear interpolation.

        Derivative evaluators come from second-order central differences on
        the grid, interpolated the same way."""
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator(self.axes, self.values, method="linear",
                                         bounds_error=True)
        grads = np.gradient(self.values, *self.axes, edge_order=2)
        if self.values.ndim == 1:
            grads = [grads]
        ginterp = [RegularGridInterpolator(self.axes, g, method="linear",
                                           bounds_error=True) for g in grads]
        m, k = self.spec.m, self.spec.k
        alpha = float(self.spec.alpha)

        def pts(z, t):
            return np.concatenate([z, t], axis=1)

        value = lambda z, t: interp(pts(z, t))

        def grad_sq(z, t):
            p = pts(z, t)
            total = np.zeros(len(p))
            for i in range(m):
                total += ginterp[i](p) ** 2
            coeff = np.sum(z ** 2, axis=1) ** alpha / 4.0
            for j in range(k):
                total += coeff * ginterp[m + j](p) ** 2
            return total

        def zu(z, t):
            p = pts(z, t)
            out = np.zeros(len(p))
            for i in range(m):
                out += z[:, i] * ginterp[i](p)
            for j in range(k):
                out += (alpha + 1.0) * t[:, j] * ginterp[m + j](p)
            return out

        return FunctionHandle(self.spec, value, grad_sq, zu, label="fd-solution")


def _second_difference(n, h):
    """Sparse 1-D second difference on n interior nodes, Dirichlet ends."""
    main = np.full(n, -2.0 / h ** 2)
    off = np.full(n - 1, 1.0 / h ** 2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def fd_solve(spec, box, grid_sizes, boundary_fn, tol=1e-10):
    """Solve B_a u = 0 with Dirichlet data, by conjugate gradients.

    Second-order centered stencil; the degenerate coefficient |z|^(2a)/4
    multiplies only t-differences between nodes sharing their z-slot, so
    the (negated) system is symmetric positive definite.  Supports
    N = m + k in {2, 3} with at most 257 nodes per axis."""
    m, k = spec.m, spec.k
    ndim = m + k
    if ndim not in (2, 3) or k != 1:
        raise BadGrid("solver supports m in {1, 2} with k = 1")
    if len(box) != ndim or len(grid_sizes) != ndim:
        raise BadGrid("box/grid must have one entry per axis")
    if any(n < 5 or n > 257 for n in grid_sizes):
        raise BadGrid("grid sizes must be in [5, 257]")

    axes = tuple(np.linspace(lo, hi, n) for (lo, hi), n in zip(box, grid_sizes))
    steps = [ax[1] - ax[0] for ax in axes]
    shape = tuple(grid_sizes)

    full = np.zeros(shape)
    mesh = np.meshgrid(*axes, indexing="ij")
    pts_z = np.stack([mesh[i].ravel() for i in range(m)], axis=1)
    pts_t = np.stack([mesh[m + j].ravel() for j in range(k)], axis=1)
    bvals = boundary_fn(pts_z, pts_t).reshape(shape)
    mask = np.zeros(shape, dtype=bool)
    for axis in range(ndim):
        sl = [slice(None)] * ndim
        sl[axis] = 0
        mask[tuple(sl)] = True
        sl[axis] = -1
        mask[tuple(sl)] = True
    full[mask] = bvals[mask]

    interior_axes = [ax[1:-1] for ax in axes]
    ni = [len(ax) for ax in interior_axes]
    coeff = None
    if m == 1:
        coeff = interior_axes[0] ** (2.0 * spec.alpha) / 4.0
    else:
        zz1, zz2 = np.meshgrid(interior_axes[0], interior_axes[1], indexing="ij")
        coeff = (zz1 ** 2 + zz2 ** 2) ** spec.alpha / 4.0

    d2 = [_second_difference(n, h) for n, h in zip(ni, steps)]
    eye = [sp.identity(n, format="csr") for n in ni]

    if ndim == 2:
        lap_z = sp.kron(d2[0], eye[1], format="csr")
        lap_t = sp.kron(eye[0], d2[1], format="csr")
        cdiag = sp.diags(np.repeat(coeff, ni[1]))
    else:
        lap_z = (sp.kron(sp.kron(d2[0], eye[1]), eye[2])
                 + sp.kron(sp.kron(eye[0], d2[1]), eye[2])).tocsr()
        lap_t = sp.kron(sp.kron(eye[0], eye[1]), d2[2], format="csr")
        cdiag = sp.diags(np.repeat(coeff.ravel(), ni[2]))
    op = (lap_z + cdiag @ lap_t).tocsr()

    # right-hand side from boundary values entering the stencil
    padded = full.copy()
    rhs = np.zeros(ni)
    interior = tuple(slice(1, -1) for _ in range(ndim))
    for axis in range(ndim):
        h2 = steps[axis] ** 2
        lo = [slice(1, -1)] * ndim
        hi = [slice(1, -1)] * ndim
        lo[axis] = 0
        hi[axis] = -1
        tgt_lo = [slice(None)] * ndim
        tgt_hi = [slice(None)] * ndim
        tgt_lo[axis] = 0
        tgt_hi[axis] = -1
        contrib_lo = padded[tuple(lo)] / h2
        contrib_hi = padded[tuple(hi)] / h2
        if axis >= m:
            contrib_lo = contrib_lo * coeff
            contrib_hi = contrib_hi * coeff
        rhs[tuple(tgt_lo)] -= contrib_lo
        rhs[tuple(tgt_hi)] -= contrib_hi

    b = -rhs.ravel()
    a_mat = -op  # SPD
    x0 = np.zeros(a_mat.shape[0])
    sol, info = cg(a_mat, b, x0=x0, rtol=1e-12, atol=0.0, maxiter=20000)
    if info != 0:
        raise NoConvergence(f"CG did not converge (info={info})")
    resid = float(np.linalg.norm(a_mat @ sol - b))
    scale = float(np.linalg.norm(b)) or 1.0
    if resid / scale > tol:
        raise NoConvergence(f"residual {resid / scale} above tolerance {tol}")

    full[interior] = sol.reshape(ni)
    return GridSolution(spec=spec, box=tuple(tuple(b_) for b_ in box),
                        axes=axes, values=full, residual=resid / scale)


# -- functional wrappers (shared machinery, Baouendi geometry) -------------


def frequency_baouendi(spec, u, r, rule, radial_steps=32):
    return frequency(_as_handle(spec, u), r, rule, radial_steps)


def weiss_baouendi(spec, u, kappa, r, rule, radial_steps=32):
    return weiss(_as_handle(spec, u), kappa, r, rule, radial_steps)


def monneau_baouendi(spec, u, p, kappa, r, rule):
    return monneau(_as_handle(spec, u), _as_handle(spec, p), kappa, r, rule)


def weiss_derivative_check(spec, u, kappa, radii, rule):
    return check_weiss_derivative(_as_handle(spec, u), kappa, radii, rule)


def monneau_derivative_check(spec, u, p, kappa, radii, rule):
    return check_monneau_derivative(_as_handle(spec, u), _as_handle(spec, p),
                                    kappa, radii, rule)


def _as_handle(spec, u):
    if isinstance(u, FunctionHandle):
        return u
    if isinstance(u, Polynomial):
        return FunctionHandle.from_polynomial(spec, u)
    if isinstance(u, GridSolution):
        return u.as_handle()
    raise TypeError(f"cannot interpret {type(u).__name__} as a function")


# -- problem files ---------------------------------------------------------


def problem_from_json(data, poly_loader=None):
    """Parse a solver problem description.

    Format: {"m":1,"k":1,"alpha":2,"box":[[-1,1],[-1,1]],"grid":[129,129],
    "boundary":"poly:<polynomial-file>"}."""
    try:
        if isinstance(data, str):
            data = json.loads(data)
        spec = BaouendiSpec(int(data["m"]), int(data["k"]), data["alpha"])
        box = [tuple(float(x) for x in pair) for pair in data["box"]]
        grid = [int(n) for n in data["grid"]]
        boundary = data["boundary"]
        if not (isinstance(boundary, str) and boundary.startswith("poly:")):
            raise ParseError("boundary must be 'poly:<polynomial-file>'")
        path = boundary[len("poly:"):]
        loader = poly_loader or _load_poly_file
        a = spec.integer_alpha()
        poly = loader(path, spec.m, spec.k, a + 1)
        return spec, box, grid, poly
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, DimensionMismatch, NonIntegerAlpha)):
            raise
        raise ParseError(f"bad problem file: {exc}") from exc


def _load_poly_file(path, m, k, tweight):
    with open(path, encoding="utf-8") as fh:
        return Polynomial.from_json(fh.read(), m=m, k=k, tweight=tweight)
