"""Reservoir spectral density J(omega) and the two memory kernels.

The coupling density combines the dipole moment with the scattered Green
function,

    J(w) = 32 g^2 w0 z0^3 w^2 Im g_zz(z0, w)      [normalized units],

equivalent to (1/hbar pi eps0)(w^2/c^2)|gamma|^2 Im G_zz in SI. The memory
kernels of the two initial-value problems are

    K_e(tau) = -int_0^inf J(w) e^{-i(w - w0) tau} dw     (excited),
    K_g(tau) = -int_0^inf J(w) e^{-i(w + w0) tau} dw     (ground),

identical up to w0 -> -w0. J is sampled once on a refinement grid and
interpolated piecewise-linearly; kernel evaluation integrates the linear
interpolant against the oscillatory phase exactly per segment (the converged
limit of subdividing the trapezoid rule to any oscillation budget
delta_w <= pi / (5 tau)), so no time scale re-quadratures the Green function.

Note Im g_zz of the scattered field alone dips below zero in interference
windows above the SPP band (the total field with the vacuum part stays
positive); J keeps that sign. Only sub-noise negatives (|J| < 1e-14 * max J)
are clipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Scenario
from .errors import ConfigError, QuadratureError
from .greens import gzz_fresnel, gzz_gyro, gzz_quasistatic

_CLIP_REL = 1e-14


@dataclass(frozen=True)
class SpectralDensity:
    """Sampled J(omega) with linear interpolation between nodes."""

    omega: np.ndarray
    values: np.ndarray
    backend: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.omega) <= 0):
            raise ValueError("omega grid must be strictly increasing")
        if self.omega.shape != self.values.shape:
            raise ValueError("omega and values must have matching shapes")

    def __call__(self, w):
        return np.interp(w, self.omega, self.values, left=0.0, right=0.0)

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    def total_weight(self) -> float:
        return float(np.trapezoid(self.values, self.omega))

    def moment(self, f) -> float:
        """Trapezoid integral of J(w) f(w) over the grid."""
        return float(np.trapezoid(self.values * f(self.omega), self.omega))

    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.values))
        return float(self.omega[i]), float(self.values[i])

    def fwhm_samples(self) -> int:
        """Number of grid samples inside the FWHM of the main peak."""
        i = int(np.argmax(self.values))
        half = self.values[i] / 2
        j_lo = i
        while j_lo > 0 and self.values[j_lo] > half:
            j_lo -= 1
        j_hi = i
        while j_hi < len(self.values) - 1 and self.values[j_hi] > half:
            j_hi += 1
        return j_hi - j_lo - 1


@dataclass(frozen=True)
class MemoryKernel:
    """Uniformly sampled K(i h), i = 0..n, for one initial-value problem."""

    state: str
    h: float
    samples: np.ndarray
    omega_max: float
    omega0: float

    @property
    def n(self) -> int:
        return len(self.samples) - 1


def lorentzian_spectral_density(
    g_rabi: float,
    lambda_width: float,
    omega_center: float,
    omega_max: float | None = None,
    n_points: int = 4001,
) -> SpectralDensity:
    """Analytic single-pole reservoir J(w) = (g^2/pi) L / ((w - wc)^2 + L^2).

    Oracle backend: the excited-state kernel with omega_center = omega0 is
    exactly -g^2 e^{-lambda tau} (plus an exponentially small clip at w = 0
    when omega_center >> lambda).
    """
    if g_rabi <= 0 or lambda_width <= 0 or omega_center <= 0:
        raise ConfigError("lorentzian model requires positive parameters")
    if omega_max is None:
        omega_max = omega_center + 200 * lambda_width
    w = np.linspace(omega_max / n_points, omega_max, n_points)
    # concentrate samples near the peak
    w = np.unique(
        np.concatenate(
            [w, omega_center + lambda_width * np.linspace(-60, 60, 2401)]
        )
    )
    w = w[(w > 0) & (w <= omega_max)]
    j = (g_rabi**2 / np.pi) * lambda_width / ((w - omega_center) ** 2 + lambda_width**2)
    return SpectralDensity(
        omega=w,
        values=j,
        backend="LorentzianModel",
        metadata={
            "g_rabi": g_rabi,
            "lambda_width": lambda_width,
            "omega_center": omega_center,
        },
    )


def _refinement_grid(scenario: Scenario) -> np.ndarray:
    """Base grid plus windows resolving the SPP band and the loss-narrow peak."""
    og = scenario.omega_grid
    mat = scenario.material
    n = og.n_points
    w = np.linspace(og.omega_max / n, og.omega_max, n)
    if not og.refine:
        return w
    # SPP band: between the perpendicular-propagation magnetoplasmon branches
    wc = mat.omega_c
    ws0 = np.sqrt(0.5 + wc * wc / 4)
    lo, hi = ws0 - wc / 2, ws0 + wc / 2
    band = np.linspace(max(lo - 0.08, 0.01), min(hi + 0.08, og.omega_max), n)
    # loss-limited peaks at the band edges (width ~ gamma_c / 2)
    width = max(mat.gamma_c / 2, 1e-6)
    fine = []
    for c in {lo, hi}:
        fine.append(c + width * np.linspace(-40, 40, 1200))
        fine.append(c + width * np.linspace(-4, 4, 400))
    grids = [w, band] + fine
    allw = np.unique(np.concatenate(grids))
    return allw[(allw > 0) & (allw <= og.omega_max)]


def build_spectral_density(scenario: Scenario) -> SpectralDensity:
    """Tabulate J(omega) for the scenario through its reservoir backend."""
    if scenario.reservoir_backend == "LorentzianModel":
        raise ConfigError(
            "LorentzianModel scenarios must use lorentzian_spectral_density "
            "with explicit peak parameters"
        )
    g = scenario.coupling_g()
    w0 = scenario.atom.omega0
    z0 = scenario.atom.z0
    mat = scenario.material
    grid = _refinement_grid(scenario)
    prefactor = 32.0 * g * g * w0 * z0**3

    if scenario.reservoir_backend == "QuasistaticHalfSpace":
        im_g = gzz_quasistatic(z0, grid, mat).imag
        est = np.zeros_like(grid)
    else:
        if mat.omega_c == 0.0:
            vals, est = gzz_fresnel(z0, grid, mat)
            im_g = vals.imag
        else:
            vals = np.empty(grid.size, dtype=complex)
            est = np.empty(grid.size)
            for i, w in enumerate(grid):
                vals[i], est[i] = gzz_gyro(z0, w, mat)
            im_g = vals.imag

    j = prefactor * grid**2 * im_g
    jmax = float(np.max(j))
    if jmax <= 0:
        raise QuadratureError("spectral density is non-positive everywhere")
    most_negative = float(np.min(j))
    j = np.where((j < 0) & (np.abs(j) < _CLIP_REL * jmax), 0.0, j)

    sd = SpectralDensity(
        omega=grid,
        values=j,
        backend=scenario.reservoir_backend,
        metadata={
            "coupling_g": g,
            "omega0": w0,
            "z0": z0,
            "prefactor": prefactor,
            "quad_error_max": float(np.max(prefactor * grid**2 * est)),
            "most_negative": most_negative,
            "fwhm_samples": 0,
        },
    )
    sd.metadata["fwhm_samples"] = sd.fwhm_samples()
    if sd.metadata["fwhm_samples"] < 30:
        raise QuadratureError(
            f"SPP peak under-resolved: {sd.metadata['fwhm_samples']} samples "
            "inside the FWHM (need >= 30); increase n_omega"
        )
    return sd


def _segment_filon(omega, values, tau):
    """Exact integral of the piecewise-linear interpolant against e^{-i w tau}."""
    d = np.diff(omega)
    c0 = values[:-1]
    c1 = np.diff(values) / d
    x = -1j * tau
    xd = x * d
    small = np.abs(xd) < 1e-5
    exd = np.exp(xd)
    with np.errstate(divide="ignore", invalid="ignore"):
        i0 = np.where(small, d * (1 + xd / 2 + xd * xd / 6), (exd - 1) / np.where(x == 0, 1, x))
        i1 = np.where(
            small,
            d * d * (0.5 + xd / 3 + xd * xd / 8),
            (d * exd) / np.where(x == 0, 1, x) - (exd - 1) / np.where(x == 0, 1, x * x),
        )
    if tau == 0:
        i0 = d.astype(complex)
        i1 = (d * d / 2).astype(complex)
    phase = np.exp(-1j * omega[:-1] * tau)
    return np.sum(phase * (c0 * i0 + c1 * i1))


def kernel_at(tau, sd: SpectralDensity, state: str) -> complex:
    """K(tau) for one state; tau >= 0 in units of 1/omega_p."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    w0 = sd.metadata.get("omega0")
    if w0 is None:
        raise ValueError("spectral density metadata lacks omega0")
    shift = -w0 if state == "excited" else +w0
    val = _segment_filon(sd.omega, sd.values, tau)
    return complex(-np.exp(-1j * shift * tau) * val)


def kernel_samples(taus, sd: SpectralDensity, state: str) -> np.ndarray:
    """Vector of K(tau_i); shares the segment decomposition across taus."""
    w0 = sd.metadata["omega0"]
    shift = -w0 if state == "excited" else +w0
    out = np.empty(len(taus), dtype=complex)
    for i, tau in enumerate(np.asarray(taus, dtype=float)):
        out[i] = -np.exp(-1j * shift * tau) * _segment_filon(sd.omega, sd.values, tau)
    return out


def kernel_at_subdivided(tau, sd: SpectralDensity, state: str, per_period=10) -> complex:
    """Reference trapezoid evaluation with delta_w <= 2 pi/(per_period tau).

    Slow path used in tests to confirm the closed-form segment integration.
    """
    w0 = sd.metadata["omega0"]
    shift = -w0 if state == "excited" else +w0
    if tau == 0:
        return complex(-sd.total_weight())
    target = 2 * np.pi / (per_period * tau)
    grid = [sd.omega[0]]
    for a, b in zip(sd.omega[:-1], sd.omega[1:]):
        m = int(np.ceil((b - a) / target))
        grid.extend(np.linspace(a, b, m + 1)[1:])
    grid = np.asarray(grid)
    j = sd(grid)
    return complex(-np.trapezoid(j * np.exp(-1j * (grid + shift) * tau), grid))


def make_kernel(
    sd: SpectralDensity, state: str, t_final: float, n_steps: int
) -> MemoryKernel:
    """Precompute the n_steps + 1 kernel samples needed by the VIE solver."""
    if n_steps < 2:
        raise ConfigError(f"n_steps must be >= 2, got {n_steps}")
    h = t_final / n_steps
    taus = np.arange(n_steps + 1) * h
    samples = kernel_samples(taus, sd, state)
    return MemoryKernel(
        state=state,
        h=h,
        samples=samples,
        omega_max=sd.omega_max,
        omega0=float(sd.metadata["omega0"]),
    )
