"""The Moser-Trudinger-Onofri functional on the sphere.

    J_alpha(u) = (alpha/4) int |grad u|^2 dw + int u dw - log int e^u dw

with dw the probability measure.  Minimisation runs on the submanifold where
the center of mass of e^u dw vanishes, enforced by exact conformal
recentering after every step, with the gauge int e^u dw = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conformal, sphere
from .errors import NonConvergenceError
from .sphere import HarmonicSpectrum, SphereField, SphereGrid


def j_alpha(u: SphereField, alpha: float) -> float:
    """Value of the functional; stable under large field values via max shift."""
    energy = sphere.dirichlet_energy(u)
    mean = sphere.integrate(u)
    return float(alpha / 4.0 * energy + mean - sphere.log_exp_mass(u))


def gradient_j(u: SphereField, alpha: float) -> SphereField:
    """First variation: g = -(alpha/2) lap(u) + 1 - e^u / int e^u."""
    lap = sphere.laplacian(u)
    m = float(np.max(u.values))
    e = np.exp(u.values - m)
    e /= sphere.integrate_values(u.grid, e)
    return SphereField(u.grid, -(alpha / 2.0) * lap.values + 1.0 - e)


def center_of_mass(u: SphereField) -> np.ndarray:
    """Center of mass of the measure e^u dw (a vector in the open unit ball)."""
    w = sphere.exp_weights(u)
    x1, x2, x3 = u.grid.points()
    return np.array([np.sum(w * x1), np.sum(w * x2), np.sum(w * x3)])


def shift_to_unit_mass(u: SphereField) -> SphereField:
    """Additive shift making int e^u dw = 1 (the working gauge)."""
    return u - sphere.log_exp_mass(u)


def _solve_recenter_parameter(u: SphereField, tol: float, max_iter: int = 60) -> np.ndarray:
    """Ball parameter a with com(u o phi_a + log det) = 0, by damped Newton.

    Change of variables collapses the pulled-back center of mass to
    F(a) = sum_i rho_i phi_{-a}(x_i) with rho the e^u dw node weights, so each
    Newton step costs one closed-form map sweep; no field is materialised.
    """
    w = sphere.exp_weights(u)
    x1, x2, x3 = u.grid.points()
    pts = np.stack([x1, x2, x3], axis=-1)

    def com_of(a):
        mapped = conformal.apply_mobius(pts, -a)
        return np.einsum("ij,ijk->k", w, mapped)

    a = np.zeros(3)
    f = com_of(a)
    for _ in range(max_iter):
        if np.linalg.norm(f) <= tol:
            return a
        h = 1e-7
        jac = np.empty((3, 3))
        for k in range(3):
            da = np.zeros(3)
            da[k] = h
            jac[:, k] = (com_of(conformal.clip_to_ball(a + da)) - f) / h
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            raise NonConvergenceError("recenter: singular Newton system", best=a)
        scale = 1.0
        for _ in range(30):
            cand = conformal.clip_to_ball(a + scale * step)
            fc = com_of(cand)
            if np.linalg.norm(fc) < np.linalg.norm(f):
                a, f = cand, fc
                break
            scale *= 0.5
        else:
            raise NonConvergenceError("recenter: line search stalled",
                                      best=a, residual=float(np.linalg.norm(f)))
    raise NonConvergenceError("recenter: Newton did not reach tolerance",
                              best=a, residual=float(np.linalg.norm(f)))


def recenter(u: SphereField, tol: float = 1e-10) -> SphereField:
    """Compose u with the Mobius map (plus log-Jacobian) killing its center of mass."""
    a = _solve_recenter_parameter(u, tol)
    return pullback(u, a)


def pullback(u: SphereField, a: np.ndarray) -> SphereField:
    """u o phi_a + log det(d phi_a), sampled on u's grid.

    The composition is evaluated through u's harmonic expansion, so it is
    exact for band-limited u; resampling reprojects onto the grid's band.
    """
    if np.linalg.norm(a) < 1e-15:
        return u.copy()
    spec = sphere.analyze(u)
    x1, x2, x3 = u.grid.points()
    pts = np.stack([x1, x2, x3], axis=-1)
    mapped = conformal.apply_mobius(pts, a)
    vals = sphere.evaluate_xyz(spec, mapped) + conformal.log_conformal_factor(pts, a)
    return SphereField(u.grid, vals)


def el_residual(u: SphereField, rho: float) -> float:
    """L2(dw) norm of lap(u) + 2 rho (e^u - 1) after the unit-mass shift."""
    u = shift_to_unit_mass(u)
    lap = sphere.laplacian(u)
    res = lap.values + 2.0 * rho * (np.exp(u.values) - 1.0)
    return float(np.sqrt(max(sphere.integrate_values(u.grid, res**2), 0.0)))


def quadratic_form(v: HarmonicSpectrum, alpha: float) -> float:
    """Second-order coefficient of J_alpha at zero along v.

    Exactly (alpha/4) int |grad v|^2 - (1/2) int v^2 + (1/2) (int v)^2,
    i.e. spectrally (alpha/4) sum l(l+1) c^2 - (1/2) sum_{l>=1} c^2.
    """
    l = np.arange(v.lmax + 1, dtype=float)
    power = np.sum(v.coeffs**2, axis=1)
    return float(alpha / 4.0 * np.sum(l * (l + 1.0) * power) - 0.5 * np.sum(power[1:]))


# ---------------------------------------------------------------------------
# minimisation
# ---------------------------------------------------------------------------


@dataclass
class MinimizeOptions:
    stat_tol: float = 1e-8
    com_tol: float = 1e-10
    max_iter: int = 800
    blowup_floor: float = -25.0
    armijo: float = 1e-4
    step0: float = 1.0
    recenter_skip_factor: float = 0.2   # skip the pullback when |com| is this far under com_tol


@dataclass
class MinimizeResult:
    u: SphereField
    j_value: float
    grad_norm: float
    com_norm: float
    exp_mass: float
    iterations: int
    trace: list = field(repr=False, default_factory=list)
    status: str = "converged"

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _coeff_gradient(u: SphereField, alpha: float) -> HarmonicSpectrum:
    return sphere.analyze(gradient_j(u, alpha))


def _precondition(gspec: HarmonicSpectrum, alpha: float) -> np.ndarray:
    l = np.arange(gspec.lmax + 1, dtype=float)
    scale = 1.0 + alpha / 2.0 * l * (l + 1.0)
    return -gspec.coeffs / scale[:, None]


def _recenter_band_limited(u: SphereField, tol: float, rounds: int = 3) -> SphereField:
    """Recenter while keeping the iterate exactly band-limited.

    The pullback of a rough field carries content above the grid band; left in
    the iterate it poisons the next line search (the implicit reprojection can
    cost more than the Armijo decrease), so project after each recentering and
    re-solve until the projected center of mass is under tolerance.
    """
    for _ in range(rounds):
        if np.linalg.norm(center_of_mass(u)) <= tol:
            return u
        a = _solve_recenter_parameter(u, tol)
        u = sphere.synthesize(sphere.analyze(pullback(u, a)), u.grid)
    return u


def minimize(alpha: float, u0: SphereField, opts: MinimizeOptions | None = None) -> MinimizeResult:
    """Projected descent for J_alpha on the center-of-mass constraint.

    Each iteration: preconditioned gradient step with Armijo backtracking,
    conformal recentering, then the unit exp-mass shift.  Descent past
    opts.blowup_floor returns an unbounded-descent verdict instead of a
    minimiser (the expected outcome of probes below alpha = 1/2).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    opts = opts or MinimizeOptions()
    grid = u0.grid
    u = sphere.synthesize(sphere.analyze(u0), grid)   # the discrete state is band-limited
    u = shift_to_unit_mass(_recenter_band_limited(shift_to_unit_mass(u), opts.com_tol))
    exp_mass_raw = 1.0
    trace = []
    status = "max-iter"
    it = 0
    j = j_alpha(u, alpha)
    gspec = _coeff_gradient(u, alpha)
    gnorm = float(np.linalg.norm(gspec.coeffs))
    for it in range(1, opts.max_iter + 1):
        trace.append((it - 1, j))
        if gnorm <= opts.stat_tol:
            status = "converged"
            break
        if j < opts.blowup_floor:
            status = "unbounded-descent"
            break
        direction = _precondition(gspec, alpha)
        slope = float(np.sum(gspec.coeffs * direction))
        noise = 1e-14 * (1.0 + abs(j))
        step = opts.step0
        uspec = sphere.analyze(u)
        accepted = False
        for _ in range(40):
            cand_spec = HarmonicSpectrum(uspec.lmax, uspec.coeffs + step * direction)
            cand = sphere.synthesize(cand_spec, grid)
            exp_mass_raw = float(np.exp(sphere.log_exp_mass(cand)))
            cand = shift_to_unit_mass(cand)
            jc = j_alpha(cand, alpha)
            if jc <= j + opts.armijo * step * slope + noise:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "stalled"
            break
        u, j = cand, jc
        if np.linalg.norm(center_of_mass(u)) > opts.recenter_skip_factor * opts.com_tol:
            u = shift_to_unit_mass(_recenter_band_limited(u, opts.com_tol))
            j = j_alpha(u, alpha)
        gspec = _coeff_gradient(u, alpha)
        gnorm = float(np.linalg.norm(gspec.coeffs))
    trace.append((it, j))
    return MinimizeResult(
        u=u,
        j_value=float(j),
        grad_norm=gnorm,
        com_norm=float(np.linalg.norm(center_of_mass(u))),
        exp_mass=exp_mass_raw,
        iterations=it,
        trace=trace,
        status=status,
    )


# ---------------------------------------------------------------------------
# seeded starts and scans
# ---------------------------------------------------------------------------


def random_start(grid: SphereGrid, stream_key, degree: int = 8, amplitude: float = 0.4) -> SphereField:
    """Deterministic random band-limited start derived from a counter-based stream."""
    rng = np.random.Generator(np.random.Philox(key=_philox_key(stream_key)))
    degree = min(degree, grid.lmax)
    spec = sphere.zero_spectrum(grid.lmax)
    for l in range(1, degree + 1):
        sigma = amplitude / (1.0 + l) ** 1.5
        ms = np.arange(-l, l + 1)
        spec.coeffs[l, grid.lmax + ms] = sigma * rng.normal(size=ms.size)
    return sphere.synthesize(spec, grid)


def _philox_key(stream_key) -> int:
    parts = np.atleast_1d(np.asarray(stream_key, dtype=np.int64))
    key = 0x9E3779B97F4A7C15
    for p in parts:
        key = ((key ^ int(p)) * 0xBF58476D1CE4E5B9) % (1 << 64)
    return key


def two_bubble_field(grid: SphereGrid, s: float) -> SphereField:
    """Grid samples of the balanced two-bubble family (resolvable for small s)."""
    x3 = grid.points()[2]
    t = np.arctanh(np.clip(x3, -1 + 1e-15, 1 - 1e-15))
    wa = conformal.bubble_log_factor(t, s)
    wb = conformal.bubble_log_factor(t, -s)
    return SphereField(grid, np.logaddexp(wa, wb) - np.log(2.0))


def alpha_scan(alpha_list, trials: int, seed: int, grid: SphereGrid | None = None,
               opts: MinimizeOptions | None = None):
    """Multi-start minimisation summary per alpha.

    Returns rows (alpha, min_j, mean_iterations, n_failed); random streams are
    keyed by (seed, alpha index, trial index) so any execution order gives the
    same table.
    """
    grid = grid or sphere.build_grid(16)
    rows = []
    for ia, alpha in enumerate(alpha_list):
        best = np.inf
        iters = []
        failed = 0
        for trial in range(trials):
            u0 = random_start(grid, (seed, ia, trial))
            try:
                res = minimize(float(alpha), u0, opts)
            except NonConvergenceError:
                failed += 1
                continue
            best = min(best, res.j_value)
            iters.append(res.iterations)
        rows.append({
            "alpha": float(alpha),
            "min_j": float(best),
            "mean_iterations": float(np.mean(iters)) if iters else float("nan"),
            "n_failed": failed,
        })
    return rows


# ---------------------------------------------------------------------------
# second variation
# ---------------------------------------------------------------------------


@dataclass
class SecondVariationReport:
    alpha: float
    mode: str
    quadratic_coefficient: float
    threshold_estimate: float


def empirical_quadratic_coefficient(v: SphereField, alpha: float, t: float = 1e-2) -> float:
    """j_alpha(t v)/t^2 with one Richardson sweep to strip the O(t^2) tail."""
    q1 = j_alpha(t * v, alpha) / t**2
    q2 = j_alpha((t / 2.0) * v, alpha) / (t / 2.0) ** 2
    return float((4.0 * q2 - q1) / 3.0)


def second_variation_threshold(v: SphereField, mode: str,
                               bracket: tuple[float, float]) -> SecondVariationReport:
    """Zero crossing in alpha of the measured quadratic coefficient along v.

    The coefficient is affine in alpha, so two evaluations determine the root.
    """
    a0, a1 = bracket
    q0 = empirical_quadratic_coefficient(v, a0)
    q1 = empirical_quadratic_coefficient(v, a1)
    root = a0 - q0 * (a1 - a0) / (q1 - q0)
    mid = 0.5 * (a0 + a1)
    return SecondVariationReport(
        alpha=mid,
        mode=mode,
        quadratic_coefficient=empirical_quadratic_coefficient(v, mid),
        threshold_estimate=float(root),
    )
