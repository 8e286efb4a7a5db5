"""Quadrature, transforms, and spectral operators on the sphere."""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from onofri import sphere
from onofri.errors import GridConfigError, InvalidFieldError


def random_band_limited(grid, seed, lmax=None, amplitude=1.0):
    rng = np.random.default_rng(seed)
    L = grid.lmax if lmax is None else min(lmax, grid.lmax)
    spec = sphere.zero_spectrum(grid.lmax)
    for l in range(L + 1):
        ms = np.arange(-l, l + 1)
        spec.coeffs[l, grid.lmax + ms] = amplitude * rng.normal(size=ms.size) / (1.0 + l)
    return sphere.synthesize(spec, grid), spec


# ---------------------------------------------------------------------------
# grid invariants
# ---------------------------------------------------------------------------


def test_weights_sum_to_two(grid16):
    assert abs(np.sum(grid16.w_mu) - 2.0) <= 1e-14


def test_quadrature_exactness(grid8):
    """Gauss-Legendre with n nodes integrates mu-polynomials of degree 2n-1."""
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=2 * grid8.n_mu)           # degree 2 n_mu - 1
    exact = np.polynomial.polynomial.polyint(coeffs)
    exact_val = np.polynomial.polynomial.polyval(1.0, exact) - np.polynomial.polynomial.polyval(-1.0, exact)
    quad = float(np.dot(grid8.w_mu, np.polynomial.polynomial.polyval(grid8.mu, coeffs)))
    assert quad == pytest.approx(exact_val, abs=1e-12)


def test_grid_rejects_aliasing():
    with pytest.raises(GridConfigError):
        sphere.build_grid(-1)
    g = sphere.build_grid(8, n_mu=9, n_phi=17)          # the hard floor is fine
    assert g.n_mu == 9 and g.n_phi == 17


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------


def test_integrate_constant(grid16):
    assert sphere.integrate(sphere.constant_field(grid16, 1.0)) == pytest.approx(1.0, abs=1e-15)


def test_integrate_odd_coordinate(grid16):
    x3 = sphere.field_of(grid16, lambda a, b, c: c)
    assert abs(sphere.integrate(x3)) <= 1e-14


def test_integrate_second_moment(grid16):
    """Closed-form moment of x3^2 against the probability measure is 1/3."""
    f = sphere.field_of(grid16, lambda a, b, c: c**2)
    assert sphere.integrate(f) == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_integrate_rejects_nonfinite(grid8):
    bad = sphere.constant_field(grid8, 1.0)
    bad.values[0, 0] = np.inf
    with pytest.raises(InvalidFieldError):
        sphere.integrate(bad)


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_integrate_linear_and_positive(seed):
    g = sphere.build_grid(8)
    f, _ = random_band_limited(g, seed)
    h, _ = random_band_limited(g, seed + 1)
    lhs = sphere.integrate(sphere.SphereField(g, 2.0 * f.values - 3.0 * h.values))
    rhs = 2.0 * sphere.integrate(f) - 3.0 * sphere.integrate(h)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    assert sphere.integrate(sphere.SphereField(g, f.values**2)) >= 0.0


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def test_constant_mode(grid16):
    spec = sphere.analyze(sphere.constant_field(grid16, 1.0))
    assert spec[0, 0] == pytest.approx(1.0, abs=1e-13)
    rest = spec.coeffs.copy()
    rest[0, grid16.lmax] = 0.0
    assert np.max(np.abs(rest)) <= 1e-13


def test_coordinate_coefficient_matches_quadrature_oracle(grid16):
    """Project x3 on the normalised degree-one zonal basis function by direct
    quadrature; the transform must reproduce that number (it is 1/sqrt(3))."""
    x3 = sphere.field_of(grid16, lambda a, b, c: c)
    e10 = sphere.field_of(grid16, lambda a, b, c: np.sqrt(3.0) * c)
    oracle = sphere.integrate(sphere.SphereField(grid16, x3.values * e10.values))
    spec = sphere.analyze(x3)
    assert spec[1, 0] == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-12)
    off = spec.coeffs.copy()
    off[1, grid16.lmax] = 0.0
    assert np.max(np.abs(off)) <= 1e-13


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_round_trip_identity(seed):
    g = sphere.build_grid(12)
    f, spec = random_band_limited(g, seed)
    back = sphere.analyze(f)
    assert np.max(np.abs(back.coeffs - spec.coeffs)) <= 1e-12
    again = sphere.synthesize(back, g)
    assert np.max(np.abs(again.values - f.values)) <= 1e-12


def test_synthesize_rejects_oversized_spectrum(grid8):
    spec = sphere.zero_spectrum(20)
    with pytest.raises(GridConfigError):
        sphere.synthesize(spec, grid8)


def test_evaluate_matches_grid_samples(grid8):
    f, spec = random_band_limited(grid8, 7)
    mu = np.repeat(grid8.mu[:, None], grid8.n_phi, axis=1)
    phi = np.repeat(grid8.phi[None, :], grid8.n_mu, axis=0)
    vals = sphere.evaluate(spec, mu, phi)
    assert np.max(np.abs(vals - f.values)) <= 1e-12


# ---------------------------------------------------------------------------
# Dirichlet energy and Laplacian
# ---------------------------------------------------------------------------


def test_energy_constant_is_zero(grid16):
    assert sphere.dirichlet_energy(sphere.constant_field(grid16, 3.7)) <= 1e-14


def test_energy_coordinate(grid16):
    """Surface gradient of x3 has |grad|^2 = 1 - x3^2; integrate it directly."""
    oracle = sphere.integrate(sphere.field_of(grid16, lambda a, b, c: 1.0 - c**2))
    f = sphere.field_of(grid16, lambda a, b, c: c)
    assert sphere.dirichlet_energy(f) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_energy_degree_two(grid16):
    """|grad(x1 x2)|^2 = x1^2 + x2^2 - 4 x1^2 x2^2 on the sphere."""
    oracle = sphere.integrate(sphere.field_of(
        grid16, lambda a, b, c: a**2 + b**2 - 4.0 * a**2 * b**2))
    f = sphere.field_of(grid16, lambda a, b, c: a * b)
    assert sphere.dirichlet_energy(f) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(0.4, abs=1e-12)


def test_laplacian_eigenvalues(grid16):
    x3 = sphere.field_of(grid16, lambda a, b, c: c)
    assert np.max(np.abs(sphere.laplacian(x3).values + 2.0 * x3.values)) <= 1e-12
    p2 = sphere.field_of(grid16, lambda a, b, c: 3.0 * c**2 - 1.0)
    assert np.max(np.abs(sphere.laplacian(p2).values + 6.0 * p2.values)) <= 1e-12


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_laplacian_integrates_to_zero(seed):
    g = sphere.build_grid(10)
    f, _ = random_band_limited(g, seed)
    assert abs(sphere.integrate(sphere.laplacian(f))) <= 1e-12


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_spectral_gap_two(seed):
    g = sphere.build_grid(10)
    f, _ = random_band_limited(g, seed)
    var = sphere.integrate(sphere.SphereField(g, f.values**2)) - sphere.integrate(f) ** 2
    assert sphere.dirichlet_energy(f) >= 2.0 * var - 1e-10


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_spectral_gap_six_above_degree_one(seed):
    g = sphere.build_grid(10)
    _, spec = random_band_limited(g, seed)
    high = spec.drop_degrees([0, 1])
    v = sphere.synthesize(high, g)
    norm2 = sphere.integrate(sphere.SphereField(g, v.values**2))
    assert sphere.dirichlet_energy(v) >= 6.0 * norm2 - 1e-10
