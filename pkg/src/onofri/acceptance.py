"""Desk-scale acceptance battery.

Thirteen numbered checks cover the spectral core, the constrained minima of
the sphere functional, the unboundedness threshold, the stereographic mass
identities, radial shooting and its uniqueness windows, the eigenvalue/mass
audits, nodal-domain accounting, the second-variation threshold, the
axisymmetric inequality, and bit-for-bit determinism.  Each check returns
rows shaped for the JSON report; the same rows back the pytest suite and the
`verify` subcommand.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import axisym, conformal, eigen, functional, planar, shooting, sphere

DEFAULT_SEED = 20260808
FOUR_PI = 4.0 * math.pi


def _row(criterion, check, claim, value, tolerance, passed, **extra):
    row = {
        "criterion": int(criterion),
        "check": str(check),
        "claim": str(claim),
        "value": float(value),
        "tolerance": float(tolerance),
        "passed": bool(passed),
    }
    row.update(extra)
    return row


# -- 1: spectral core -------------------------------------------------------


def criterion_1(seed, grids):
    g = grids["g32"]
    rows = []
    moment = sphere.integrate(sphere.field_of(g, lambda a, b, c: c**2))
    rows.append(_row(1, "moment_x3_sq", "integral of x3^2 equals 1/3",
                     abs(moment - 1.0 / 3.0), 1e-12, abs(moment - 1.0 / 3.0) <= 1e-12))
    x3 = sphere.field_of(g, lambda a, b, c: c)
    e1 = float(np.max(np.abs(sphere.laplacian(x3).values + 2.0 * x3.values)))
    rows.append(_row(1, "laplacian_degree1", "degree-1 eigenvalue 2", e1, 1e-10, e1 <= 1e-10))
    p2 = sphere.field_of(g, lambda a, b, c: 3.0 * c**2 - 1.0)
    e2 = float(np.max(np.abs(sphere.laplacian(p2).values + 6.0 * p2.values)))
    rows.append(_row(1, "laplacian_degree2", "degree-2 eigenvalue 6", e2, 1e-10, e2 <= 1e-10))
    return rows


# -- 2: unconstrained-infimum evidence at alpha = 1 -------------------------


def criterion_2(seed, grids):
    g = grids["g16"]
    rows = []
    for k in range(20):
        res = functional.minimize(1.0, functional.random_start(g, (seed, 2, k)))
        h1 = sphere.h1_norm(res.u)
        ok = (-1e-6 <= res.j_value <= 1e-3) and h1 <= 1e-3 and res.converged
        rows.append(_row(2, f"start_{k:02d}", "alpha=1 minimum in [-1e-6, 1e-3], H1 <= 1e-3",
                         res.j_value, 1e-3, ok, h1_norm=float(h1), iterations=res.iterations))
    return rows


# -- 3: zero infimum for alpha >= 2/3 ---------------------------------------


def criterion_3(seed, grids):
    g = grids["g16"]
    rows = []
    for ia, alpha in enumerate((2.0 / 3.0, 0.70, 0.75, 0.80, 0.90)):
        min_j = math.inf
        worst_el = 0.0
        all_conv = True
        for k in range(10):
            res = functional.minimize(alpha, functional.random_start(g, (seed, 3, ia, k)))
            min_j = min(min_j, res.j_value)
            worst_el = max(worst_el, functional.el_residual(res.u, 1.0 / alpha))
            all_conv = all_conv and res.converged
        ok = min_j >= -1e-6 and worst_el <= 1e-5 and all_conv
        rows.append(_row(3, f"alpha_{alpha:.4f}", "constrained minimum zero, stationary points solve the field equation",
                         min_j, 1e-6, ok, worst_el_residual=float(worst_el), alpha=float(alpha)))
    return rows


# -- 4: unboundedness below alpha = 1/2 --------------------------------------


def criterion_4(seed, grids):
    rows = []
    s_hit, trace = conformal.probe_two_bubble(0.45, floor=-10.0)
    j_hit = trace[-1][1]
    rows.append(_row(4, "two_bubble_sphere", "concentrating family drives the functional below -10",
                     j_hit, -10.0, s_hit is not None and j_hit < -10.0,
                     concentration_log=float(trace[-1][0])))
    s1, trace1 = axisym.probe_two_bubble_1d(0.45, floor=-10.0)
    i_hit = trace1[-1][1]
    rows.append(_row(4, "two_bubble_axisym", "axisymmetric family drives the functional below -10",
                     i_hit, -10.0, s1 is not None and i_hit < -10.0,
                     concentration_log=float(trace1[-1][0])))
    return rows


# -- 5: bridge identities ----------------------------------------------------


def criterion_5(seed, grids):
    rows = []
    for l in (0.5, 1.0, 1.5):
        rho = 1.0 + l / 2.0
        beta = planar.beta_l(planar.v_star_field(rho))
        err = abs(beta - (4.0 + 2.0 * l))
        rows.append(_row(5, f"beta_vstar_l_{l}", "axial profile mass equals 4 + 2l",
                         err, 1e-8, err <= 1e-8, l=float(l)))
    vs = planar.v_star_field(1.5)
    radii = np.linspace(0.0, 20.0, 401)
    pts = np.stack([radii, np.zeros_like(radii)], axis=-1)
    res = float(np.max(np.abs(planar.planar_residual(vs, pts))))
    rows.append(_row(5, "vstar_residual", "axial profile solves the planar equation pointwise",
                     res, 1e-10, res <= 1e-10))

    g = grids["g32"]
    x3 = sphere.field_of(g, lambda a, b, c: c)
    x1x2 = sphere.field_of(g, lambda a, b, c: a * b)
    pts3 = np.stack(g.points(), axis=-1)
    fields = [
        ("mixed_modes", functional.shift_to_unit_mass(0.3 * x3 + (0.2 * x1x2).values), 1.25),
        ("conformal_factor", sphere.SphereField(
            g, conformal.log_conformal_factor(pts3, np.array([0.0, 0.1, 0.38]))), 1.4),
        ("random_degree6", functional.shift_to_unit_mass(
            functional.random_start(g, (seed, 5, 0), degree=6)), 1.5),
    ]
    for name, u, rho in fields:
        v = planar.to_planar(u, rho)
        mass = 2.0 * math.pi * planar.beta_l(v)
        err = abs(mass - 8.0 * math.pi * rho)
        rows.append(_row(5, f"mass_transfer_{name}", "plane mass equals 8 pi rho times unit sphere mass",
                         err, 1e-7, err <= 1e-7, rho=float(rho)))
    return rows


# -- 6: flat mass curve at l = 0 ---------------------------------------------


def criterion_6(seed, grids):
    rows = []
    for s in np.linspace(-4.0, 4.0, 17):
        sol = shooting.shoot(0.0, float(s))
        dev = abs(sol.beta_mass - 4.0)
        agree = abs(sol.beta_mass - sol.beta_slope)
        ok = dev <= 1e-6 and agree <= 1e-6 and sol.verdict == "converged"
        rows.append(_row(6, f"s_{s:+.2f}", "l=0 mass is 4 for every start; dual estimators agree",
                         dev, 1e-6, ok, estimator_gap=float(agree)))
    return rows


# -- 7: Pohozaev window -------------------------------------------------------


def criterion_7(seed, grids):
    rows = []
    for l in (0.5, 1.0, 1.5, 2.0):
        s_anchor = math.log(8.0 * (1.0 + l / 2.0))
        for s in (-3.0, -1.0, 0.0, 1.0, 3.0, s_anchor):
            sol = shooting.shoot(l, float(s))
            if sol.verdict != "converged":
                rows.append(_row(7, f"l_{l}_s_{s:+.2f}", "finite-mass window", 0.0, 0.0, False,
                                 verdict=sol.verdict))
                continue
            lo, hi = 4.0 + 1e-6, 4.0 * (1.0 + l) - 1e-6
            ok = lo < sol.beta_mass < hi
            rows.append(_row(7, f"l_{l}_s_{s:+.2f}", "mass strictly inside (4, 4(1+l))",
                             sol.beta_mass, 1e-6, ok, l=float(l), window_low=lo, window_high=hi))
    return rows


# -- 8: uniqueness windows ----------------------------------------------------


def criterion_8(seed, grids):
    rows = []
    bracket = (-6.0, 10.0)
    for l, targets in ((0.5, (4.5, 5.0, 5.5, 6.0, 6.5)),
                       (1.0, (4.5, 5.0, 5.5, 6.0, 6.5)),
                       (2.0, (5.0, 6.0, 7.0))):
        for target in targets:
            roots = shooting.solutions_at_beta(l, target, bracket)
            rows.append(_row(8, f"l_{l}_beta_{target}", "at most one radial profile per admissible mass",
                             len(roots), 1.0, len(roots) <= 1,
                             roots=[float(r) for r in roots], l=float(l)))
    for l, target, s_star in ((0.5, 5.0, math.log(10.0)), (1.0, 6.0, math.log(12.0))):
        roots = shooting.solutions_at_beta(l, target, bracket)
        err = abs(roots[0] - s_star) if roots else math.inf
        rows.append(_row(8, f"anchor_l_{l}", "axial profile recovered as the unique root",
                         err, 1e-6, len(roots) == 1 and err <= 1e-6, l=float(l)))
    sol = shooting.shoot(2.0, math.log(16.0))
    err = abs(sol.beta_mass - 8.0)
    rows.append(_row(8, "anchor_l_2.0", "axial profile mass at l=2", err, 1e-6, err <= 1e-6))
    return rows


# -- 9: eigenvalue/mass oracles and audits ------------------------------------


def _liouville_g(y):
    return np.log(8.0) - 2.0 * np.log1p(np.sum(np.asarray(y, dtype=float) ** 2, axis=-1))


def _liouville_lap(y):
    return -8.0 / (1.0 + np.sum(np.asarray(y, dtype=float) ** 2, axis=-1)) ** 2


def criterion_9(seed, grids):
    rows = []
    j01sq = 5.783185962946785
    lam = eigen.first_eigenvalue_extrapolated(None, eigen.Disk(1.0), 0.04)
    rows.append(_row(9, "dirichlet_disk", "unit-disk Dirichlet ground energy",
                     abs(lam - j01sq), 1e-3, abs(lam - j01sq) <= 1e-3))
    lam0 = eigen.first_eigenvalue_extrapolated(_liouville_g, eigen.Disk(1.0), 0.04)
    rows.append(_row(9, "liouville_lambda1", "unit disk is neutral for the bubble profile",
                     abs(lam0), 1e-3, abs(lam0) <= 1e-3))
    mass = eigen.domain_mass(_liouville_g, eigen.Disk(1.0))
    rows.append(_row(9, "liouville_mass", "unit-disk bubble mass is 4 pi",
                     abs(mass - FOUR_PI), 1e-6, abs(mass - FOUR_PI) <= 1e-6))

    eps = 0.05

    def g_eps(y):
        return _liouville_g(y) + eps * np.sum(np.asarray(y, dtype=float) ** 2, axis=-1)

    def g_eps_lap(y):
        return _liouville_lap(y) + 4.0 * eps

    audits = eigen.bol_audit(g_eps, eigen.Disk(3.0),
                             [eigen.Disk(2.0), eigen.Disk(1.0), eigen.Disk(0.5)],
                             glap_fn=g_eps_lap)
    audits += eigen.bol_audit(_liouville_g, eigen.Disk(3.0), [eigen.Disk(1.0)],
                              glap_fn=_liouville_lap)
    for a in audits:
        rows.append(_row(9, f"audit_{a.domain}", "eigenvalue hypothesis forces mass over 4 pi",
                         a.mass, FOUR_PI, a.verdict != "violated",
                         lambda1=a.lambda1, verdict=a.verdict,
                         margin=a.supersolution_margin))
    r_star = eigen.zero_eigenvalue_radius(g_eps, (0.7, 1.1))
    m_star = eigen.domain_mass(g_eps, eigen.Disk(r_star + 2e-3))
    rows.append(_row(9, "continuation_radius", "neutral radius carries mass over 4 pi",
                     m_star - FOUR_PI, 0.0, m_star > FOUR_PI, r_star=float(r_star)))
    return rows


# -- 10: nodal-domain accounting ----------------------------------------------


def criterion_10(seed, grids):
    rows = []
    xs = np.linspace(-3.0, 3.0, 241)
    ys = np.linspace(-3.0, 3.0, 241)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    quad = (X**2 - Y**2) * np.exp(-(X**2 + Y**2))

    def density(y):
        y = np.asarray(y, dtype=float)
        r2 = np.sum(y * y, axis=-1)
        return (1.0 + r2) * np.exp(planar.v_star(y, 1.5))

    rep = planar.nodal_domains(quad, xs, ys, disk_radius=3.0, mass_density=density, rho=1.5)
    rows.append(_row(10, "quadrant_count", "degree-2 sign pattern has four domains",
                     rep.m, 4.0, rep.m == 4))
    gap = abs(sum(rep.masses) - rep.total)
    rows.append(_row(10, "partition_mass", "per-domain masses sum to the total",
                     gap, 1e-8, gap <= 1e-8))
    led3 = planar.nodal_ledger(3, 1.5)
    rows.append(_row(10, "ledger_m3", "three domains above 4 pi beat the budget 12 pi",
                     led3["total_budget"], led3["total_exceeds"], led3["contradiction"]))
    led4 = planar.nodal_ledger(4, 2.0)
    rows.append(_row(10, "ledger_m4", "four domains above 4 pi beat the budget 16 pi",
                     led4["total_budget"], led4["total_exceeds"], led4["contradiction"]))
    led_ctrl = planar.nodal_ledger(4, 2.2)
    rows.append(_row(10, "ledger_control", "no contradiction above the mass threshold",
                     led_ctrl["total_budget"], led_ctrl["total_exceeds"],
                     not led_ctrl["contradiction"]))
    return rows


# -- 11: second-variation thresholds -------------------------------------------


def criterion_11(seed, grids):
    g = grids["g16"]
    rows = []
    v2 = sphere.field_of(g, lambda a, b, c: a * b)
    rep2 = functional.second_variation_threshold(v2, "degree-2", (0.25, 0.45))
    err2 = abs(rep2.threshold_estimate - 1.0 / 3.0)
    rows.append(_row(11, "degree2_threshold", "quadratic coefficient changes sign at alpha = 1/3",
                     rep2.threshold_estimate, 1e-3, err2 <= 1e-3))
    v1 = sphere.field_of(g, lambda a, b, c: c)
    rep1 = functional.second_variation_threshold(v1, "degree-1", (0.9, 1.1))
    err1 = abs(rep1.threshold_estimate - 1.0)
    rows.append(_row(11, "degree1_threshold", "coordinate modes change sign at alpha = 1",
                     rep1.threshold_estimate, 1e-3, err1 <= 1e-3))
    return rows


# -- 12: axisymmetric evidence --------------------------------------------------


def criterion_12(seed, grids):
    rows = []
    for ia, alpha in enumerate((0.5, 0.55, 0.6)):
        worst = -math.inf
        all_conv = True
        for k in range(20):
            res = axisym.minimize_axisym(alpha, axisym.random_start_1d((seed, 12, ia, k)))
            worst = max(worst, res.value)
            all_conv = all_conv and res.status == "converged"
        rows.append(_row(12, f"alpha_{alpha}", "axisymmetric constrained minimum is zero",
                         worst, 1e-6, worst >= -1e-6 and all_conv, alpha=float(alpha)))
    g1d = axisym.random_start_1d((seed, 12, 99), degree=6)
    u = axisym.lift(g1d, grids["g32"])
    gap = abs(2.0 * functional.j_alpha(u, 0.77) - axisym.i_functional(g1d, 0.77))
    rows.append(_row(12, "lift_identity", "doubled sphere value matches the 1-D functional",
                     gap, 1e-10, gap <= 1e-10))
    return rows


CRITERIA = {
    1: ("spectral core", criterion_1),
    2: ("minimum at alpha = 1", criterion_2),
    3: ("zero infimum down to 2/3", criterion_3),
    4: ("unboundedness below 1/2", criterion_4),
    5: ("stereographic bridge", criterion_5),
    6: ("flat mass curve at l = 0", criterion_6),
    7: ("Pohozaev window", criterion_7),
    8: ("uniqueness windows", criterion_8),
    9: ("eigenvalue and mass audits", criterion_9),
    10: ("nodal accounting", criterion_10),
    11: ("second-variation threshold", criterion_11),
    12: ("axisymmetric inequality", criterion_12),
}


def battery_grids():
    return {"g16": sphere.build_grid(16), "g32": sphere.build_grid(32)}


def run_battery(seed: int = DEFAULT_SEED, criteria=None, grids=None) -> list[dict]:
    """Rows for criteria 1..12 (or a subset), deterministic given the seed."""
    grids = grids or battery_grids()
    rows = []
    for cid in sorted(criteria or CRITERIA):
        rows.extend(CRITERIA[cid][1](seed, grids))
    return rows


def determinism_row(seed: int = DEFAULT_SEED, criteria=None) -> dict:
    """Criterion 13: two full batteries with one seed serialise identically."""
    from .report import to_builtin

    first = json.dumps(to_builtin(run_battery(seed, criteria)), sort_keys=True)
    second = json.dumps(to_builtin(run_battery(seed, criteria)), sort_keys=True)
    same = first == second
    return _row(13, "rerun_bytes", "identical seed reproduces result rows byte for byte",
                0.0 if same else 1.0, 0.0, same)


def run_verify(seed: int = DEFAULT_SEED, determinism: bool = True) -> list[dict]:
    rows = run_battery(seed)
    if determinism:
        rows.append(determinism_row(seed))
    return rows


def summarize(rows: list[dict]) -> dict:
    """Per-criterion pass/fail map."""
    out = {}
    for row in rows:
        cid = row["criterion"]
        out.setdefault(cid, True)
        out[cid] = out[cid] and bool(row["passed"])
    return out
