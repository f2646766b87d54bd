"""Self-contained verification battery behind `subfreq verify`.

Each check returns (passed, detail); the battery is deterministic for a
fixed seed and resolution.
"""

import dataclasses
import math

import numpy as np

from . import fixtures
from .baouendi import BaouendiSpec, solid_harmonic_quadratic
from .frequency import (
    FunctionHandle,
    check_D_variation,
    check_H_identity,
    check_monneau_derivative,
    check_weiss_derivative,
    frequency_radial_exponential,
    geometric_radii,
)
from .groups import example_group_6d, example_group_metivier, heisenberg
from .polynomials import (
    Polynomial,
    apply_X,
    apply_theta,
    euler_Z,
    sublaplacian,
)
from .quadrature import build_sphere_rule, mean_value


def _flip_psi(rule):
    """Negative-control hook: inject a sign error into the psi weight."""
    return dataclasses.replace(rule, psi=-rule.psi)


def run_battery(resolution=32, seed=12345, n_random=25, flip_psi=False):
    """Run all checks; returns a list of {name, passed, detail} dicts."""
    g1 = heisenberg(1)
    rule = build_sphere_rule(g1, resolution)
    if flip_psi:
        rule = _flip_psi(rule)
    results = []

    def record(name, passed, detail):
        results.append({"name": name, "passed": bool(passed), "detail": detail})

    # symbolic Euler-operator identities on random polynomials
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(n_random):
        p = fixtures.random_polynomial(rng, g1.m, g1.k)
        for i in range(g1.m):
            lhs = apply_X(g1, i, euler_Z(g1, p)) - euler_Z(g1, apply_X(g1, i, p))
            if lhs != apply_X(g1, i, p):
                ok = False
        lhs = sublaplacian(g1, euler_Z(g1, p))
        rhs = euler_Z(g1, sublaplacian(g1, p)) + sublaplacian(g1, p) * 2
        if lhs != rhs:
            ok = False
    record("euler-commutator-identities", ok, f"{n_random} random polynomials")

    # mean-value calibration
    const = FunctionHandle.from_polynomial(g1, Polynomial.constant(g1.m, g1.k, 1))
    errs = [abs(mean_value(g1, const.value, g1.identity(), r, rule) - 1.0)
            for r in (0.5, 1.0, 2.0)]
    record("mean-value-calibration", max(errs) <= 1e-4, f"max err {max(errs):.2e}")

    # H' identity and full first variation
    radii = geometric_radii(0.5, 1.5, 16)
    polys = {"x": fixtures.poly_x(g1), "t": fixtures.poly_t(g1),
             "x2-y2": fixtures.poly_x2_minus_y2(g1)}
    worst_h = worst_d = 0.0
    for p in polys.values():
        u = FunctionHandle.from_polynomial(g1, p)
        worst_h = max(worst_h, float(np.max(check_H_identity(u, radii, rule)["residuals"])))
        worst_d = max(worst_d, float(np.max(check_D_variation(u, radii, rule)["residuals"])))
    record("H-prime-identity", worst_h <= 1e-2, f"max residual {worst_h:.2e}")
    record("first-variation-full", worst_d <= 1e-2, f"max residual {worst_d:.2e}")

    # Weiss derivative identity on vanishing-discrepancy fixtures
    worst_w = 0.0
    for p, kappa in ((fixtures.one_plus_t(g1), 0), (fixtures.mixed_cylindrical(g1), 2)):
        u = FunctionHandle.from_polynomial(g1, p)
        res = check_weiss_derivative(u, kappa, geometric_radii(0.4, 1.2, 16), rule)
        worst_w = max(worst_w, float(np.max(res["residuals"])))
    record("weiss-derivative", worst_w <= 1e-2, f"max residual {worst_w:.2e}")

    # Monneau: derivative identity and monotonicity
    u = FunctionHandle.from_polynomial(g1, fixtures.mixed_cylindrical(g1), label="t+cP4")
    pref = FunctionHandle.from_polynomial(g1, fixtures.poly_t(g1), label="t")
    res = check_monneau_derivative(u, pref, 2, geometric_radii(0.4, 1.2, 16), rule)
    mono = bool(np.all(np.diff(res["M"]) >= -1e-5))
    worst_m = float(np.max(res["residuals"]))
    record("monneau", worst_m <= 1e-2 and mono,
           f"max residual {worst_m:.2e}, nondecreasing={mono}")

    # Baouendi orthogonality (alpha=1, m=2, k=1)
    spec = BaouendiSpec(2, 1, 1)
    brule = build_sphere_rule(spec, resolution)
    if flip_psi:
        brule = _flip_psi(brule)
    from .baouendi import orthogonality_check

    p1 = Polynomial.z_var(2, 1, 0, tweight=2)
    pq = solid_harmonic_quadratic(spec)
    inner = orthogonality_check(spec, p1, pq, 1.0, brule)
    n1 = math.sqrt(abs(orthogonality_check(spec, p1, p1, 1.0, brule)))
    n2 = math.sqrt(abs(orthogonality_check(spec, pq, pq, 1.0, brule)))
    rel = abs(inner) / (n1 * n2)
    record("baouendi-orthogonality", rel <= 1e-6, f"relative inner product {rel:.2e}")

    # six-dimensional example group: exact discrepancy fixture
    g6 = example_group_6d()
    x1sq_x3sq = (Polynomial.z_var(4, 2, 0) ** 2 + Polynomial.z_var(4, 2, 2) ** 2)
    disc = Polynomial.zero(4, 2, 2)
    for ell in range(2):
        disc = disc + Polynomial.t_var(4, 2, ell) * apply_theta(g6, ell, x1sq_x3sq)
    expected = (Polynomial.t_var(4, 2, 0)
                * (Polynomial.z_var(4, 2, 0) * Polynomial.z_var(4, 2, 1)
                   + Polynomial.z_var(4, 2, 2) * Polynomial.z_var(4, 2, 3)) * (-2))
    record("six-dim-discrepancy-fixture", disc == expected, "exact")

    # radial exponential fixture: N = eps / r^eps
    eps = 0.5
    worst_e = max(abs(frequency_radial_exponential(eps, r, rule) - eps / r ** eps)
                  / (eps / r ** eps) for r in (0.5, 1.0, 1.5))
    record("radial-exponential-frequency", worst_e <= 1e-3, f"max rel err {worst_e:.2e}")

    # the Metivier example group is not of Heisenberg type
    cls = example_group_metivier().classification
    record("metivier-example-classification",
           cls["is_metivier"] and not cls["is_htype"], str(cls))

    return results
