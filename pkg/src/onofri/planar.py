"""Stereographic transfer between the sphere and the plane.

For a solution of  lap(u) + 2 rho (e^u - 1) = 0  with unit exp-mass, the field

    v(y) = u(lift(y)) - 2 rho log(1+|y|^2) + log(8 rho)

satisfies  lap(v) + (1+|y|^2)^l e^v = 0  with l = 2(rho-1); the additive
constant log(8 rho) is pinned by substituting the axial profile
v*(y) = -2 rho log(1+|y|^2) + log(8 rho) into the planar equation
(lap of -2 rho log(1+r^2) is exactly -8 rho (1+r^2)^{-2}), and makes the
normalised mass of v* equal 4 rho.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .errors import DivergentMassError, GaugeError, InvalidFieldError, PoleError


# ---------------------------------------------------------------------------
# stereographic projection from the north pole
# ---------------------------------------------------------------------------


def stereo_map(x: np.ndarray) -> np.ndarray:
    """Project unit vectors (..., 3) to the plane, y = (x1, x2)/(1 - x3)."""
    x = np.asarray(x, dtype=float)
    denom = 1.0 - x[..., 2]
    if np.any(denom <= 1e-15):
        raise PoleError("stereographic map is singular at the north pole")
    return np.stack([x[..., 0] / denom, x[..., 1] / denom], axis=-1)


def stereo_lift(y: np.ndarray) -> np.ndarray:
    """Inverse of stereo_map; (..., 2) -> unit vectors (..., 3)."""
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    denom = 1.0 + r2
    return np.stack([2.0 * y[..., 0] / denom,
                     2.0 * y[..., 1] / denom,
                     (r2 - 1.0) / denom], axis=-1)


def stereo_jacobian(y: np.ndarray) -> np.ndarray:
    """Areal Jacobian of the lift, (2/(1+|y|^2))^2; integrates to 4 pi."""
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    return (2.0 / (1.0 + r2)) ** 2


# ---------------------------------------------------------------------------
# planar fields
# ---------------------------------------------------------------------------


@dataclass
class PlanarField:
    """Scalar field on the plane given by a vectorised evaluator y -> value.

    lap_evaluator, when present, is an exact Laplacian (closed form or via the
    conformal identity); it spares finite differences in residual checks.
    """

    evaluator: callable
    l: float
    tag: str = ""
    lap_evaluator: callable | None = None

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.evaluator(np.asarray(y, dtype=float))


def v_star(y: np.ndarray, rho: float) -> np.ndarray:
    """The explicit axial solution, -2 rho log(1+|y|^2) + log(8 rho)."""
    y = np.asarray(y, dtype=float)
    r2 = np.sum(y * y, axis=-1)
    return -2.0 * rho * np.log1p(r2) + math.log(8.0 * rho)


def v_star_field(rho: float) -> PlanarField:
    def lap(y):
        r2 = np.sum(np.asarray(y, dtype=float) ** 2, axis=-1)
        return -8.0 * rho / (1.0 + r2) ** 2

    return PlanarField(lambda y: v_star(y, rho), l=2.0 * (rho - 1.0),
                       tag=f"v_star(rho={rho})", lap_evaluator=lap)


def liouville_bubble_field(a: float = 1.0, center=(0.0, 0.0)) -> PlanarField:
    """l = 0 solution  v = log(8 a^2 / (1 + a^2 |y - y0|^2)^2), mass 8 pi."""
    y0 = np.asarray(center, dtype=float)

    def ev(y):
        d2 = np.sum((np.asarray(y, dtype=float) - y0) ** 2, axis=-1)
        return np.log(8.0 * a * a) - 2.0 * np.log1p(a * a * d2)

    def lap(y):
        d2 = np.sum((np.asarray(y, dtype=float) - y0) ** 2, axis=-1)
        return -8.0 * a * a / (1.0 + a * a * d2) ** 2

    return PlanarField(ev, l=0.0, tag=f"bubble(a={a})", lap_evaluator=lap)


def to_planar(u: sphere.SphereField, rho: float, gauge_tol: float = 1e-8) -> PlanarField:
    """Transfer a unit-exp-mass sphere field to the plane.

    The evaluator goes through u's harmonic expansion, so the planar Laplacian
    is available exactly via the conformal identity
    lap(v)(y) = J(y) (lap_sphere(u) - 2 rho)(lift y).
    """
    mass_defect = abs(math.exp(sphere.log_exp_mass(u)) - 1.0)
    if mass_defect > gauge_tol:
        raise GaugeError(f"to_planar needs int e^u dw = 1; defect {mass_defect:.2e}")
    spec = sphere.analyze(u)
    lap_spec = spec.copy()
    ldeg = np.arange(spec.lmax + 1, dtype=float)
    lap_spec.coeffs *= -(ldeg * (ldeg + 1.0))[:, None]
    const = math.log(8.0 * rho)

    def ev(y):
        y = np.asarray(y, dtype=float)
        r2 = np.sum(y * y, axis=-1)
        return sphere.evaluate_xyz(spec, stereo_lift(y)) - 2.0 * rho * np.log1p(r2) + const

    def lap(y):
        y = np.asarray(y, dtype=float)
        return stereo_jacobian(y) * (sphere.evaluate_xyz(lap_spec, stereo_lift(y)) - 2.0 * rho)

    return PlanarField(ev, l=2.0 * (rho - 1.0), tag="pulled-back sphere field",
                       lap_evaluator=lap)


def planar_residual(v: PlanarField, y: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Residual lap(v) + (1+|y|^2)^l e^v, exact Laplacian when available."""
    y = np.asarray(y, dtype=float)
    lap = v.lap_evaluator(y) if v.lap_evaluator is not None else fd_laplacian(v, y, h)
    r2 = np.sum(y * y, axis=-1)
    return lap + (1.0 + r2) ** v.l * np.exp(v(y))


def fd_laplacian(f, y: np.ndarray, h: float) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    e1 = np.array([h, 0.0])
    e2 = np.array([0.0, h])
    return (f(y + e1) + f(y - e1) + f(y + e2) + f(y - e2) - 4.0 * f(y)) / h**2


# ---------------------------------------------------------------------------
# normalised mass and the Pohozaev window
# ---------------------------------------------------------------------------


def _disk_quadrature(r_hi: float, n_gauss: int = 24, n_theta: int = 64):
    """Polar nodes/weights on the disk of radius r_hi: GL panels x uniform angles."""
    edges = [0.0, min(1.0, r_hi)]
    while edges[-1] < r_hi:
        edges.append(min(2.0 * edges[-1], r_hi))
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    rs, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rs.append(0.5 * (b - a) * xg + 0.5 * (a + b))
        wr.append(0.5 * (b - a) * wg)
    r = np.concatenate(rs)
    wr = np.concatenate(wr)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    return r, wr, theta


def _angular_mean_exp(v: PlanarField, radii: np.ndarray, n_theta: int = 64) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    pts = np.stack([radii[:, None] * np.cos(theta), radii[:, None] * np.sin(theta)], axis=-1)
    return np.mean(np.exp(v(pts.reshape(-1, 2))).reshape(len(radii), n_theta), axis=1)


def _beta_one_cut(v: PlanarField, r_cut: float, n_theta: int = 64):
    """(1/2pi) mass integral split at r_cut plus a fitted analytic tail."""
    r, wr, theta = _disk_quadrature(r_cut, n_theta=n_theta)
    pts = np.stack([r[:, None] * np.cos(theta), r[:, None] * np.sin(theta)], axis=-1)
    vals = np.exp(v(pts.reshape(-1, 2))).reshape(len(r), n_theta)
    dens = (1.0 + r**2) ** v.l * np.mean(vals, axis=1) * r
    inner = float(np.dot(wr, dens))

    # fit log(mean_theta e^v) = c - beta log r + d / r^2 on [r_cut/2, r_cut]
    rf = np.geomspace(r_cut / 2.0, r_cut, 17)
    m = _angular_mean_exp(v, rf, n_theta)
    if np.any(m <= 0.0) or not np.all(np.isfinite(m)):
        raise DivergentMassError("tail fit: non-finite angular means")
    basis = np.stack([np.ones_like(rf), -np.log(rf), rf**-2.0], axis=1)
    coef, *_ = np.linalg.lstsq(basis, np.log(m), rcond=None)
    c_fit, beta_fit, d_fit = (float(t) for t in coef)
    gamma = 2.0 * v.l - beta_fit + 2.0
    if gamma >= -1e-6:
        raise DivergentMassError(
            f"fitted decay beta = {beta_fit:.6f} <= 2l+2 = {2*v.l+2:.6f}: mass diverges")
    a1 = d_fit + v.l
    a2 = 0.5 * d_fit**2 + d_fit * v.l + 0.5 * v.l * (v.l - 1.0)
    tail = math.exp(c_fit) * (r_cut**gamma / (-gamma)
                              + a1 * r_cut ** (gamma - 2.0) / (2.0 - gamma)
                              + a2 * r_cut ** (gamma - 4.0) / (4.0 - gamma))
    return inner + tail, beta_fit, c_fit


def beta_l(v: PlanarField, r_cut: float = 100.0, n_theta: int = 64) -> float:
    """Normalised mass (1/2pi) int (1+|y|^2)^l e^v dy.

    Quadrature to r_cut plus the analytic tail of the fitted asymptote
    v ~ -beta log r + c; evaluated at r_cut and 2 r_cut, keeping the latter.
    """
    b2, _, _ = _beta_one_cut(v, 2.0 * r_cut, n_theta)
    return float(b2)


def beta_l_report(v: PlanarField, r_cut: float = 100.0, n_theta: int = 64) -> dict:
    b1, fit_beta, fit_c = _beta_one_cut(v, r_cut, n_theta)
    b2, fit_beta2, fit_c2 = _beta_one_cut(v, 2.0 * r_cut, n_theta)
    return {
        "beta": float(b2),
        "fit_beta": float(fit_beta2),
        "fit_c": float(fit_c2),
        "richardson_delta": float(b2 - b1),
        "r_cut": float(2.0 * r_cut),
    }


@dataclass
class PohozaevReport:
    l: float
    beta: float
    lower: float
    upper: float
    inside: bool


def pohozaev_check(v: PlanarField, r_cut: float = 100.0) -> PohozaevReport:
    """Necessary mass window 4 < beta < 4(1+l) for finite-mass solutions."""
    b = beta_l(v, r_cut=r_cut)
    lower, upper = 4.0, 4.0 * (1.0 + v.l)
    return PohozaevReport(l=v.l, beta=b, lower=lower, upper=upper,
                          inside=bool(lower < b < upper))


# ---------------------------------------------------------------------------
# angular derivative and nodal domains
# ---------------------------------------------------------------------------


def angular_derivative(v: PlanarField, h: float = 1e-4) -> PlanarField:
    """phi = y2 d1(v) - y1 d2(v), by a central difference of step h.

    The difference is taken along the rotation orbit (phi is minus the
    rotation generator applied to v), which makes phi vanish identically on
    radial fields instead of leaving an O(h^2) residue.  At a solution of the
    planar equation phi solves the linearised equation, which is what the
    nodal-domain audits exploit.
    """
    c, s = math.cos(h), math.sin(h)

    def ev(y):
        y = np.asarray(y, dtype=float)
        y_plus = np.stack([c * y[..., 0] - s * y[..., 1],
                           s * y[..., 0] + c * y[..., 1]], axis=-1)
        y_minus = np.stack([c * y[..., 0] + s * y[..., 1],
                            -s * y[..., 0] + c * y[..., 1]], axis=-1)
        return (v(y_minus) - v(y_plus)) / (2.0 * h)

    return PlanarField(ev, l=v.l, tag=f"angular derivative of {v.tag}")


def planar_gradient(v: PlanarField, y: np.ndarray, h: float = 1e-5) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    e1 = np.array([h, 0.0])
    e2 = np.array([0.0, h])
    return np.stack([(v(y + e1) - v(y - e1)) / (2.0 * h),
                     (v(y + e2) - v(y - e2)) / (2.0 * h)], axis=-1)


def field_to_rows(v: PlanarField, radius: float = 5.0, n: int = 41) -> list[dict]:
    """Sample a planar field on a Cartesian grid as (y1, y2, value) rows."""
    xs = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([X, Y], axis=-1).reshape(-1, 2)
    vals = v(pts)
    return [{"y1": float(p[0]), "y2": float(p[1]), "value": float(val)}
            for p, val in zip(pts, vals)]


@dataclass
class NodalReport:
    m: int
    masses: list
    total: float
    ledger_verdict: str
    labels: np.ndarray = field(repr=False, default=None)
    zero_tol: float = 0.0


def _flood_fill_labels(signs: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected components of the nonzero sign classes, row-major seeds."""
    ni, nj = signs.shape
    labels = np.zeros((ni, nj), dtype=int)
    current = 0
    for i0 in range(ni):
        for j0 in range(nj):
            if signs[i0, j0] == 0 or labels[i0, j0] != 0:
                continue
            current += 1
            want = signs[i0, j0]
            queue = deque([(i0, j0)])
            labels[i0, j0] = current
            while queue:
                i, j = queue.popleft()
                for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    a, b = i + di, j + dj
                    if 0 <= a < ni and 0 <= b < nj and labels[a, b] == 0 and signs[a, b] == want:
                        labels[a, b] = current
                        queue.append((a, b))
    return labels, current


def nodal_ledger(m: int, rho: float):
    """The mass-count arithmetic: m domains above 4 pi against a budget 8 pi rho.

    With every domain mass strictly above 4 pi the total exceeds 4 pi m, so a
    budget 8 pi rho <= 4 pi m (i.e. 2 rho <= m) is contradictory.
    """
    return {
        "per_domain_lower": 4.0 * math.pi,
        "total_exceeds": 4.0 * math.pi * m,
        "total_budget": 8.0 * math.pi * rho,
        "contradiction": bool(2.0 * rho <= m),
    }


def nodal_domains(f_values: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                  zero_tol: float | None = None, disk_radius: float | None = None,
                  mass_density=None, rho: float | None = None) -> NodalReport:
    """Count sign domains of a gridded field on a disk by 4-connected flood fill.

    f_values is indexed [i, j] ~ (xs[i], ys[j]).  When mass_density (a planar
    callable such as (1+|y|^2)^l e^v) is given, per-domain masses are cell sums;
    `total` is the mass over the classified cells, so the partition identity is
    structural.  With rho given, the ledger states whether m domains of mass
    above 4 pi contradict the budget 8 pi rho.
    """
    f_values = np.asarray(f_values, dtype=float)
    if f_values.size == 0:
        raise InvalidFieldError("nodal_domains: empty grid")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if zero_tol is None:
        zero_tol = 1e-8 * float(np.max(np.abs(f_values)))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = np.ones_like(f_values, dtype=bool)
    if disk_radius is not None:
        inside = X**2 + Y**2 <= disk_radius**2
    signs = np.zeros(f_values.shape, dtype=int)
    signs[(f_values > zero_tol) & inside] = 1
    signs[(f_values < -zero_tol) & inside] = -1
    labels, m = _flood_fill_labels(signs)

    masses = []
    total = 0.0
    if mass_density is not None:
        cell = (xs[1] - xs[0]) * (ys[1] - ys[0]) if xs.size > 1 and ys.size > 1 else 1.0
        dens = np.asarray(mass_density(np.stack([X, Y], axis=-1).reshape(-1, 2))).reshape(f_values.shape)
        for k in range(1, m + 1):
            mk = float(np.sum(dens[labels == k]) * cell)
            masses.append(mk)
        total = float(sum(masses))

    if rho is None:
        verdict = "not-evaluated"
    else:
        verdict = "contradiction" if nodal_ledger(m, rho)["contradiction"] else "consistent"
    return NodalReport(m=m, masses=masses, total=total, ledger_verdict=verdict,
                       labels=labels, zero_tol=float(zero_tol))
