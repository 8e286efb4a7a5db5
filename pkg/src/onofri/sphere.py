"""Discrete fields on the unit sphere.

Conventions used throughout the package:

* the surface measure ``dw`` is normalised to total mass one, so
  ``integrate(1) == 1`` and the moment ``integrate(x3**2) == 1/3``;
* the grid is Gauss-Legendre in ``mu = cos(theta)`` crossed with a uniform
  azimuthal grid, which integrates band-limited fields exactly;
* real spherical harmonics are orthonormal with respect to ``dw``
  (not the area measure), e.g. the degree-one zonal basis function is
  ``sqrt(3) * x3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridConfigError, InvalidFieldError

DEFAULT_LMAX = 32


def _alf_rows(lmax: int, mu: np.ndarray) -> list[np.ndarray]:
    """Associated Legendre functions, orthonormal on L2(d mu), by order m.

    Returns a list indexed by m; entry m has shape (lmax + 1 - m, len(mu))
    with rows l = m .. lmax.  Uses the standard stable three-term recurrence
    (no Condon-Shortley phase).
    """
    mu = np.asarray(mu, dtype=float)
    sin_t = np.sqrt(np.clip(1.0 - mu * mu, 0.0, None))
    rows = []
    pmm = np.full_like(mu, 1.0 / np.sqrt(2.0))
    for m in range(lmax + 1):
        block = np.empty((lmax + 1 - m, mu.size))
        block[0] = pmm
        if m + 1 <= lmax:
            block[1] = np.sqrt(2.0 * m + 3.0) * mu * pmm
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            block[l - m] = a * (mu * block[l - m - 1] - b * block[l - m - 2])
        rows.append(block)
        if m < lmax:
            pmm = sin_t * np.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * pmm
    return rows


def _basis_rows(lmax: int, mu: np.ndarray) -> list[np.ndarray]:
    """Latitude factors of the dw-orthonormal real basis, by order m.

    Basis: e_{l,0} = p_{l,0}(mu);  e_{l,m} = p_{l,m}(mu) cos(m phi) and
    e_{l,-m} = p_{l,m}(mu) sin(m phi) for m >= 1.
    """
    rows = _alf_rows(lmax, mu)
    out = [np.sqrt(2.0) * rows[0]]
    out.extend(2.0 * rows[m] for m in range(1, lmax + 1))
    return out


def _orthonormalized_rows(lmax: int, mu: np.ndarray, w_mu: np.ndarray) -> list[np.ndarray]:
    """Basis tables polished so discrete quadrature orthonormality is exact.

    The recurrence leaves O(l*eps) noise in the tables, which the Laplacian
    amplifies by l(l+1); a thin QR against the quadrature inner product
    restores orthonormality to machine precision without changing the span.
    """
    rows = _basis_rows(lmax, mu)
    out = []
    for m, block in enumerate(rows):
        scale = np.sqrt(w_mu / 2.0) if m == 0 else np.sqrt(w_mu) / 2.0
        q, r = np.linalg.qr(block.T * scale[:, None])
        q *= np.sign(np.diag(r))
        out.append((q / scale[:, None]).T)
    return out


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre x uniform-azimuth quadrature grid."""

    lmax: int
    n_mu: int
    n_phi: int
    mu: np.ndarray = field(repr=False)
    w_mu: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    basis_mu: list = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_mu, self.n_phi)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights of the probability measure dw, shape (n_mu, n_phi)."""
        return np.repeat(self.w_mu[:, None] / (2.0 * self.n_phi), self.n_phi, axis=1)

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cartesian coordinates of all nodes, each of shape (n_mu, n_phi)."""
        sin_t = np.sqrt(1.0 - self.mu**2)
        x1 = sin_t[:, None] * np.cos(self.phi)[None, :]
        x2 = sin_t[:, None] * np.sin(self.phi)[None, :]
        x3 = np.repeat(self.mu[:, None], self.n_phi, axis=1)
        return x1, x2, x3


def build_grid(lmax: int = DEFAULT_LMAX, n_mu: int | None = None, n_phi: int | None = None) -> SphereGrid:
    """Construct a grid able to hold degree-2*lmax products without aliasing.

    Defaults n_mu = 2*lmax and n_phi = 4*lmax; the hard floor is
    n_mu >= lmax + 1 and n_phi >= 2*lmax + 1.
    """
    if lmax < 0:
        raise GridConfigError("band limit must be nonnegative")
    n_mu = 2 * lmax if n_mu is None else n_mu
    n_phi = 4 * lmax if n_phi is None else n_phi
    n_mu = max(n_mu, lmax + 1)
    n_phi = max(n_phi, 2 * lmax + 1)
    if n_mu < lmax + 1 or n_phi < 2 * lmax + 1:
        raise GridConfigError(f"grid {n_mu}x{n_phi} cannot hold degree {lmax}")
    mu, w = np.polynomial.legendre.leggauss(n_mu)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return SphereGrid(lmax, n_mu, n_phi, mu, w, phi, _orthonormalized_rows(lmax, mu, w))


@dataclass
class SphereField:
    """Real scalar field sampled on a SphereGrid."""

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise InvalidFieldError(
                f"values shape {self.values.shape} != grid shape {self.grid.shape}"
            )

    def with_values(self, values: np.ndarray) -> "SphereField":
        return SphereField(self.grid, values)

    def __add__(self, other):
        if isinstance(other, SphereField):
            return SphereField(self.grid, self.values + other.values)
        return SphereField(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, SphereField):
            return SphereField(self.grid, self.values - other.values)
        return SphereField(self.grid, self.values - other)

    def __rmul__(self, scalar):
        return SphereField(self.grid, scalar * self.values)

    def copy(self) -> "SphereField":
        return SphereField(self.grid, self.values.copy())


@dataclass
class HarmonicSpectrum:
    """Real spherical-harmonic coefficients, dense (l, m) storage.

    coeffs[l, lmax + m] is the coefficient of the dw-orthonormal basis
    function of degree l and order m (cosine branch m > 0, sine branch m < 0).
    """

    lmax: int
    coeffs: np.ndarray

    def __getitem__(self, lm: tuple[int, int]) -> float:
        l, m = lm
        return float(self.coeffs[l, self.lmax + m])

    def __setitem__(self, lm: tuple[int, int], value: float) -> None:
        l, m = lm
        self.coeffs[l, self.lmax + m] = value

    def copy(self) -> "HarmonicSpectrum":
        return HarmonicSpectrum(self.lmax, self.coeffs.copy())

    def drop_degrees(self, degrees) -> "HarmonicSpectrum":
        """Return a copy with the listed degrees zeroed (used for gap checks)."""
        out = self.copy()
        for l in degrees:
            out.coeffs[l, :] = 0.0
        return out


def zero_spectrum(lmax: int) -> HarmonicSpectrum:
    return HarmonicSpectrum(lmax, np.zeros((lmax + 1, 2 * lmax + 1)))


def field_of(grid: SphereGrid, fn) -> SphereField:
    """Sample fn(x1, x2, x3) on the grid nodes."""
    x1, x2, x3 = grid.points()
    return SphereField(grid, np.broadcast_to(np.asarray(fn(x1, x2, x3), dtype=float), grid.shape).copy())


def constant_field(grid: SphereGrid, c: float = 0.0) -> SphereField:
    return SphereField(grid, np.full(grid.shape, float(c)))


def integrate(f: SphereField) -> float:
    """Integral of f against the probability measure dw."""
    if not np.all(np.isfinite(f.values)):
        raise InvalidFieldError("integrate: field has non-finite values")
    return float(np.sum(f.grid.w_mu @ f.values) / (2.0 * f.grid.n_phi))


def integrate_values(grid: SphereGrid, values: np.ndarray) -> float:
    return float(np.sum(grid.w_mu @ values) / (2.0 * grid.n_phi))


def analyze(f: SphereField) -> HarmonicSpectrum:
    """Forward transform onto the dw-orthonormal real basis."""
    grid = f.grid
    L = grid.lmax
    spec = zero_spectrum(L)
    fhat = np.fft.rfft(f.values, axis=1)
    # c_{l,m} = 1/2 sum_i w_i p_{l,m}(mu_i) A_m(i) with A_m the azimuthal averages
    for m in range(L + 1):
        if m >= fhat.shape[1]:
            break
        am = fhat[:, m].real / grid.n_phi
        bm = -fhat[:, m].imag / grid.n_phi
        block = grid.basis_mu[m]          # (L+1-m, n_mu)
        wa = 0.5 * grid.w_mu * am
        spec.coeffs[m:, L + m] = block @ wa
        if m > 0:
            wb = 0.5 * grid.w_mu * bm
            spec.coeffs[m:, L - m] = block @ wb
    return spec


def synthesize(spec: HarmonicSpectrum, grid: SphereGrid) -> SphereField:
    """Inverse transform of a spectrum onto a grid."""
    L = spec.lmax
    if L > grid.lmax:
        raise GridConfigError(f"spectrum degree {L} exceeds grid band limit {grid.lmax}")
    fhat = np.zeros((grid.n_mu, grid.n_phi // 2 + 1), dtype=complex)
    for m in range(L + 1):
        block = grid.basis_mu[m][: L + 1 - m]
        cm = block.T @ spec.coeffs[m:, L + m]
        if m == 0:
            fhat[:, 0] = grid.n_phi * cm
        else:
            sm = block.T @ spec.coeffs[m:, L - m]
            fhat[:, m] = 0.5 * grid.n_phi * (cm - 1j * sm)
    return SphereField(grid, np.fft.irfft(fhat, n=grid.n_phi, axis=1))


def evaluate(spec: HarmonicSpectrum, mu: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Evaluate a spectrum at arbitrary points (mu, phi); shapes must match."""
    mu = np.asarray(mu, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = mu.shape
    mu = mu.ravel()
    phi = phi.ravel()
    L = spec.lmax
    rows = _basis_rows(L, mu)
    out = rows[0].T @ spec.coeffs[:, L]
    for m in range(1, L + 1):
        cm = rows[m].T @ spec.coeffs[m:, L + m]
        sm = rows[m].T @ spec.coeffs[m:, L - m]
        out += cm * np.cos(m * phi) + sm * np.sin(m * phi)
    return out.reshape(shape)


def evaluate_xyz(spec: HarmonicSpectrum, points: np.ndarray) -> np.ndarray:
    """Evaluate a spectrum at unit vectors given as an (..., 3) array."""
    points = np.asarray(points, dtype=float)
    mu = np.clip(points[..., 2], -1.0, 1.0)
    phi = np.arctan2(points[..., 1], points[..., 0])
    return evaluate(spec, mu, phi)


def dirichlet_energy(f: SphereField) -> float:
    """Integral of |grad f|^2 dw, computed spectrally as sum l(l+1) c^2."""
    spec = analyze(f)
    l = np.arange(spec.lmax + 1, dtype=float)
    return float(np.sum(l * (l + 1.0) * np.sum(spec.coeffs**2, axis=1)))


def laplacian(f: SphereField) -> SphereField:
    """Laplace-Beltrami operator: multiplication by -l(l+1) per degree."""
    spec = analyze(f)
    l = np.arange(spec.lmax + 1, dtype=float)
    spec.coeffs *= -(l * (l + 1.0))[:, None]
    return synthesize(spec, f.grid)


def l2_norm(f: SphereField) -> float:
    return float(np.sqrt(max(integrate(f.with_values(f.values**2)), 0.0)))


def h1_norm(f: SphereField) -> float:
    return float(np.sqrt(max(integrate(f.with_values(f.values**2)) + dirichlet_energy(f), 0.0)))


def log_exp_mass(f: SphereField) -> float:
    """log of integral of exp(f) dw, with max-shift stabilisation."""
    m = float(np.max(f.values))
    return m + np.log(integrate_values(f.grid, np.exp(f.values - m)))


def exp_weights(f: SphereField) -> np.ndarray:
    """Probability weights of the measure e^f dw / (integral e^f dw) on the nodes."""
    m = float(np.max(f.values))
    w = np.exp(f.values - m) * f.grid.weights
    return w / np.sum(w)


def truncation_diagnostic(f: SphereField, band: float = 0.9) -> float:
    """Fraction of spectral power above degree band*lmax (aliasing indicator)."""
    spec = analyze(f)
    power = np.sum(spec.coeffs**2, axis=1)
    total = float(np.sum(power[1:]))
    if total == 0.0:
        return 0.0
    cut = int(np.floor(band * spec.lmax))
    return float(np.sum(power[cut:]) / total)
