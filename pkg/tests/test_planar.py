"""Stereographic bridge, planar masses, angular derivative, nodal domains."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from onofri import functional as fn, planar as pl, sphere
from onofri.errors import DivergentMassError, GaugeError, InvalidFieldError, PoleError


# ---------------------------------------------------------------------------
# stereographic projection
# ---------------------------------------------------------------------------


def test_south_pole_and_equator():
    assert np.allclose(pl.stereo_map(np.array([0.0, 0.0, -1.0])), [0.0, 0.0])
    assert pl.stereo_jacobian(np.zeros(2)) == pytest.approx(4.0)
    assert np.allclose(pl.stereo_map(np.array([1.0, 0.0, 0.0])), [1.0, 0.0])
    assert pl.stereo_jacobian(np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_pole_raises():
    with pytest.raises(PoleError):
        pl.stereo_map(np.array([0.0, 0.0, 1.0]))


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_lift_map_round_trip(seed):
    rng = np.random.default_rng(seed)
    y = 5.0 * rng.normal(size=(20, 2))
    x = pl.stereo_lift(y)
    assert np.max(np.abs(np.linalg.norm(x, axis=-1) - 1.0)) <= 1e-14
    assert np.max(np.abs(pl.stereo_map(x) - y)) <= 1e-12 * (1.0 + np.max(np.abs(y)))
    assert np.max(np.abs(pl.stereo_lift(pl.stereo_map(x)) - x)) <= 1e-14


def test_jacobian_total_area():
    """Radial quadrature oracle: integral of (2/(1+r^2))^2 over the plane is 4 pi."""
    xg, wg = np.polynomial.legendre.leggauss(200)
    R = 1e4
    # substitution r = tan(q), dr = sec^2 q dq maps [0, pi/2) smoothly
    q = 0.25 * np.pi * (xg + 1.0)
    wq = 0.25 * np.pi * wg
    r = np.tan(q)
    integrand = (2.0 / (1.0 + r**2)) ** 2 * 2.0 * np.pi * r / np.cos(q) ** 2
    total = float(np.dot(wq, integrand))
    assert total == pytest.approx(4.0 * np.pi, abs=1e-8)


# ---------------------------------------------------------------------------
# v* and the forced constant
# ---------------------------------------------------------------------------


def test_vstar_residual_pins_constant():
    """Hand-differentiated radial Laplacian of -2 rho log(1+r^2) forces the
    additive constant log(8 rho) in the planar equation."""
    rho = 1.5
    l = 2.0 * (rho - 1.0)
    r = np.linspace(1e-3, 30.0, 500)
    lap = -8.0 * rho / (1.0 + r**2) ** 2          # v'' + v'/r in closed form
    source = (1.0 + r**2) ** l * np.exp(pl.v_star(np.stack([r, 0 * r], axis=-1), rho))
    assert np.max(np.abs(lap + source)) <= 1e-12


def test_vstar_center_value():
    assert pl.v_star(np.zeros(2), 1.5) == pytest.approx(math.log(12.0), abs=1e-15)
    assert math.log(12.0) == pytest.approx(2.4849, abs=1e-4)


def test_vstar_structure():
    rho = 1.2
    y = np.random.default_rng(0).normal(size=(40, 2)) * 3
    r2 = np.sum(y * y, axis=-1)
    vals = pl.v_star(y, rho) + 2.0 * rho * np.log1p(r2)
    assert np.max(np.abs(vals - vals[0])) <= 1e-12


# ---------------------------------------------------------------------------
# to_planar
# ---------------------------------------------------------------------------


def test_to_planar_of_zero_is_vstar(grid16):
    rho = 1.5
    v = pl.to_planar(sphere.constant_field(grid16, 0.0), rho)
    y = np.random.default_rng(1).normal(size=(50, 2)) * 2
    assert np.max(np.abs(v(y) - pl.v_star(y, rho))) <= 1e-12
    assert v.l == pytest.approx(2.0 * (rho - 1.0))


def test_to_planar_mass_identity(grid16):
    rho = 1.5
    v = pl.to_planar(sphere.constant_field(grid16, 0.0), rho)
    mass = 2.0 * math.pi * pl.beta_l(v)
    assert mass == pytest.approx(8.0 * math.pi * rho, abs=1e-8)


def test_to_planar_rejects_bad_gauge(grid16):
    with pytest.raises(GaugeError):
        pl.to_planar(sphere.constant_field(grid16, 0.5), 1.5)


def test_planar_residual_bounded_by_spherical(grid16):
    """The planar residual is J(y) times the spherical one, so the transfer
    of a minimiser keeps it within 10x the spherical sup residual."""
    alpha = 0.7
    res = fn.minimize(alpha, fn.random_start(grid16, (3, 1, 4)))
    u = fn.shift_to_unit_mass(res.u)
    rho = 1.0 / alpha
    lap = sphere.laplacian(u)
    sphere_res = np.abs(lap.values + 2.0 * rho * (np.exp(u.values) - 1.0))
    v = pl.to_planar(u, rho)
    rng = np.random.default_rng(2)
    y = rng.uniform(-10, 10, size=(400, 2))
    y = y[np.linalg.norm(y, axis=1) <= 10.0]
    assert np.max(np.abs(pl.planar_residual(v, y))) <= 10.0 * np.max(sphere_res)


# ---------------------------------------------------------------------------
# beta and the Pohozaev window
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("l", [0.5, 1.0, 1.5])
def test_beta_of_vstar(l):
    rho = 1.0 + l / 2.0
    assert pl.beta_l(pl.v_star_field(rho)) == pytest.approx(4.0 + 2.0 * l, abs=1e-8)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_beta_of_liouville_bubble(a):
    assert pl.beta_l(pl.liouville_bubble_field(a)) == pytest.approx(4.0, abs=1e-8)


def test_pohozaev_reports():
    rep = pl.pohozaev_check(pl.v_star_field(1.5))
    assert rep.inside and rep.lower == 4.0 and rep.upper == 8.0
    assert rep.beta == pytest.approx(6.0, abs=1e-8)
    rep2 = pl.pohozaev_check(pl.v_star_field(1.25))
    assert rep2.inside and rep2.upper == pytest.approx(6.0)
    assert rep2.beta == pytest.approx(5.0, abs=1e-8)


def test_pohozaev_flags_outside():
    """Slowly-decaying synthetic field: fitted slope 3.5 misses the window."""
    slow = pl.PlanarField(lambda y: -1.75 * np.log1p(np.sum(np.asarray(y) ** 2, axis=-1)),
                          l=0.25, tag="synthetic slope 3.5")
    rep = pl.pohozaev_check(slow)
    assert not rep.inside
    assert rep.beta < 4.0


def test_beta_divergent_mass_error():
    slow = pl.PlanarField(lambda y: -1.1 * np.log1p(np.sum(np.asarray(y) ** 2, axis=-1)),
                          l=0.25, tag="non-integrable")
    with pytest.raises(DivergentMassError):
        pl.beta_l(slow)


# ---------------------------------------------------------------------------
# angular derivative
# ---------------------------------------------------------------------------


def test_angular_derivative_radial_vanishes():
    phi = pl.angular_derivative(pl.v_star_field(1.5), h=1e-4)
    y = np.random.default_rng(3).normal(size=(60, 2)) * 2
    assert np.max(np.abs(phi(y))) <= 1e-10


def test_angular_derivative_linear_field():
    v = pl.PlanarField(lambda y: np.asarray(y)[..., 0], l=0.0, tag="y1")
    h = 1e-3
    phi = pl.angular_derivative(v, h=h)
    y = np.random.default_rng(4).normal(size=(60, 2)) * 3
    err = np.abs(phi(y) - y[..., 1])
    assert np.max(err) <= np.max(np.abs(y)) * h**2 / 6.0 + 1e-12


def test_angular_derivative_norm_rotation_invariant():
    """|phi| patterns rotate with the field, so its sup over a disk is stable."""
    v0 = pl.liouville_bubble_field(1.0, center=(0.8, 0.0))
    v1 = pl.liouville_bubble_field(1.0, center=(0.0, 0.8))
    theta = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    ring = np.stack([1.7 * np.cos(theta), 1.7 * np.sin(theta)], axis=-1)
    s0 = np.max(np.abs(pl.angular_derivative(v0, 1e-4)(ring)))
    s1 = np.max(np.abs(pl.angular_derivative(v1, 1e-4)(ring)))
    assert s0 == pytest.approx(s1, rel=1e-6)


def test_linearised_equation_at_translated_bubble():
    """phi solves the linearised equation at an exact solution; the residual
    is pure finite-difference error and shrinks at second order."""
    v = pl.liouville_bubble_field(1.0, center=(0.7, -0.3))
    assert np.max(np.abs(pl.planar_gradient(v, np.array([0.7, -0.3])))) <= 1e-9
    y = np.random.default_rng(5).normal(size=(80, 2)) * 2
    y = y[np.linalg.norm(y, axis=1) <= 5.0]
    phi = pl.angular_derivative(v, h=1e-4)
    res = {}
    for h in (2e-2, 1e-2):
        res[h] = np.max(np.abs(pl.fd_laplacian(phi, y, h) + np.exp(v(y)) * phi(y)))
    assert res[1e-2] <= 1e-3
    assert res[1e-2] <= res[2e-2] / 3.0          # second-order decay


def test_minimizer_pullback_is_near_radial(grid16):
    """Transfer of a converged minimiser: gradient vanishes at the origin and
    the linearised residual is tiny because phi itself is."""
    alpha = 0.7
    out = fn.minimize(alpha, fn.random_start(grid16, (9, 0, 0)))
    u = fn.shift_to_unit_mass(out.u)
    v = pl.to_planar(u, 1.0 / alpha)
    assert np.max(np.abs(pl.planar_gradient(v, np.zeros(2), h=1e-4))) <= 1e-5
    y = np.random.default_rng(6).normal(size=(50, 2))
    y = y[np.linalg.norm(y, axis=1) <= 5.0]
    phi = pl.angular_derivative(v, h=1e-4)
    lin_res = pl.fd_laplacian(phi, y, 1e-2) + (1.0 + np.sum(y**2, axis=-1)) ** v.l * np.exp(v(y)) * phi(y)
    assert np.max(np.abs(lin_res)) <= 1e-4


# ---------------------------------------------------------------------------
# nodal domains
# ---------------------------------------------------------------------------


def _grid_xy(n=201, span=3.0):
    xs = np.linspace(-span, span, n)
    ys = np.linspace(-span, span, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return xs, ys, X, Y


def test_quadrant_pattern_has_four_domains():
    xs, ys, X, Y = _grid_xy()
    f = (X**2 - Y**2) * np.exp(-(X**2 + Y**2))
    rep = pl.nodal_domains(f, xs, ys, disk_radius=3.0)
    assert rep.m == 4


def test_linear_field_has_two_domains():
    xs, ys, X, Y = _grid_xy()
    rep = pl.nodal_domains(X.copy(), xs, ys, disk_radius=3.0)
    assert rep.m == 2


def test_empty_grid_rejected():
    with pytest.raises(InvalidFieldError):
        pl.nodal_domains(np.zeros((0, 0)), np.zeros(0), np.zeros(0))


def test_partition_masses():
    xs, ys, X, Y = _grid_xy(n=241)
    f = (X**2 - Y**2) * np.exp(-(X**2 + Y**2))

    def density(y):
        r2 = np.sum(np.asarray(y) ** 2, axis=-1)
        return (1.0 + r2) * np.exp(pl.v_star(np.asarray(y), 1.5))

    rep = pl.nodal_domains(f, xs, ys, disk_radius=3.0, mass_density=density, rho=1.5)
    assert rep.m == 4
    assert all(m >= 0.0 for m in rep.masses)
    assert abs(sum(rep.masses) - rep.total) <= 1e-8


def test_ledger_arithmetic():
    led3 = pl.nodal_ledger(3, 1.5)
    assert led3["contradiction"]
    assert led3["total_budget"] == pytest.approx(12.0 * math.pi)
    led4 = pl.nodal_ledger(4, 2.0)
    assert led4["contradiction"]
    assert led4["total_exceeds"] == pytest.approx(16.0 * math.pi)
    assert not pl.nodal_ledger(4, 2.2)["contradiction"]
    assert not pl.nodal_ledger(2, 1.5)["contradiction"]
