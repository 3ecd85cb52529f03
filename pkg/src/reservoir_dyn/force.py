"""Exact transient force and its Markov-approximation ladder.

All methods consume one shared weight table

    w(omega) = (16/3) z0^4 omega^2 Im[d_z g_zz](z0, omega)

(real, normalized so that forces come out in units of
F0 = 3 |gamma|^2 / (16 pi z0^4 eps0) newtons). The exact force is

    F_z(t)/F0 = 2 Re{ i conj(c(t)) int dw w(omega) I(omega, t) },
    I(omega, t) = int_0^t c(t') e^{-i (omega -+ omega0)(t - t')} dt',

with the upper (lower) sign for the excited (ground) problem. The running
inner integral is updated per time step by one phase factor and a trapezoid
increment, so a full trace costs O(N_t N_omega).

Markov variants: FM substitutes the closed-form FM population and performs
the time integral exactly; PM2 imposes memorylessness directly inside the
time integral; FM2 additionally extends the limit to infinity (static value;
known to violate F(0) = 0). The energy-shift route differentiates the
ground-state Lamb shift and coincides with the FM2 static value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Scenario
from .constants import EPS0
from .errors import ConfigError
from .greens import gzz_fresnel, gzz_gyro, gzz_quasistatic
from .markov import pv_integral
from .spectral import SpectralDensity
from .volterra import AmplitudeTrace


@dataclass(frozen=True)
class ForceWeightTable:
    """Shared spectral weights of all force methods (alpha = z branch)."""

    omega: np.ndarray
    values: np.ndarray
    z0: float
    omega0: float
    f0_si: float
    backend: str
    trapezoid_weights: np.ndarray = field(default=None, repr=False)

    def quad_weights(self) -> np.ndarray:
        if self.trapezoid_weights is not None:
            return self.trapezoid_weights
        w = np.zeros_like(self.omega)
        d = np.diff(self.omega)
        w[:-1] += d / 2
        w[1:] += d / 2
        return w


@dataclass(frozen=True)
class ForceTrace:
    """F_z(t)/F0 series for one method and state."""

    times: np.ndarray
    values: np.ndarray
    method: str
    state: str
    f0_si: float

    def to_si(self) -> np.ndarray:
        return self.values * self.f0_si


def f0_si(gamma_cm: float, z0_si: float) -> float:
    """Normalization F0 = 3 |gamma|^2 / (16 pi z0^4 eps0), in newtons."""
    return 3 * gamma_cm**2 / (16 * np.pi * z0_si**4 * EPS0)


def build_force_weights(scenario: Scenario, t_final: float | None = None) -> ForceWeightTable:
    """Tabulate w(omega) through the scenario backend.

    t_final bounds the fastest phase the weight integrals must resolve; the
    grid is padded to keep delta_omega * t_final <= pi/5 everywhere.
    """
    from .spectral import _refinement_grid

    z0 = scenario.atom.z0
    w0 = scenario.atom.omega0
    mat = scenario.material
    grid = _refinement_grid(scenario)
    if t_final is not None and t_final > 0:
        need = np.pi / (5.0 * t_final)
        extra = np.arange(grid[0], grid[-1], need)
        grid = np.unique(np.concatenate([grid, extra]))

    if scenario.reservoir_backend == "QuasistaticHalfSpace":
        im_dg = gzz_quasistatic(z0, grid, mat, deriv=True).imag
    elif scenario.reservoir_backend == "SommerfeldHalfSpace":
        if mat.omega_c == 0.0:
            vals, _ = gzz_fresnel(z0, grid, mat, deriv=True)
            im_dg = vals.imag
        else:
            im_dg = np.array([gzz_gyro(z0, w, mat, deriv=True)[0].imag for w in grid])
    else:
        raise ConfigError(f"backend {scenario.reservoir_backend!r} provides no weights")

    values = (16.0 / 3.0) * z0**4 * grid**2 * im_dg
    gamma_cm = scenario.dipole_cm()
    return ForceWeightTable(
        omega=grid,
        values=values,
        z0=z0,
        omega0=w0,
        f0_si=f0_si(gamma_cm, scenario.units.length_to_si(z0)),
        backend=scenario.reservoir_backend,
    )


def _detuning(weights: ForceWeightTable, state: str) -> np.ndarray:
    if state == "excited":
        return weights.omega - weights.omega0
    if state == "ground":
        return weights.omega + weights.omega0
    raise ConfigError(f"state must be excited|ground, got {state!r}")


def exact_force(trace: AmplitudeTrace, weights: ForceWeightTable, state: str) -> ForceTrace:
    """Exact non-Markovian force from the solved amplitude trace.

    The per-frequency running integral obeys
        I(w, t + h) = e^{-i D h} I(w, t) + (h/2)(c(t+h) + e^{-i D h} c(t)),
    D the state detuning; F(0) = 0 exactly (empty time integral).
    """
    d = _detuning(weights, state)
    h = trace.h
    c = trace.values
    qw = weights.quad_weights() * weights.values
    phase = np.exp(-1j * d * h)
    inner = np.zeros(d.size, dtype=complex)
    out = np.empty(len(c))
    out[0] = 0.0
    for m in range(1, len(c)):
        inner = phase * inner + 0.5 * h * (c[m] + phase * c[m - 1])
        out[m] = 2 * np.real(1j * np.conj(c[m]) * np.dot(qw, inner))
    return ForceTrace(times=trace.times, values=out, method="Exact", state=state,
                      f0_si=weights.f0_si)


def fm_force_excited(
    gamma: float,
    delta: float,
    weights: ForceWeightTable,
    times,
    denominator: str = "half",
) -> ForceTrace:
    """FM force of the excited atom, closed form in time.

    F/F0 = 2 Re{ i int w(omega) e^{-G t/2}
                 (e^{-i(omega - omega0 + delta) t} - e^{-G t/2}) / den },
    den = Gamma/2 - i(omega - omega0 + delta) for denominator='half' (the
    variant consistent with the e^{-Gamma t/2} population; reproduces the
    exact weak-coupling force) or Gamma - i(...) for the printed variant.
    """
    times = np.asarray(times, dtype=float)
    dd = weights.omega - weights.omega0 + delta
    if denominator == "half":
        den = 0.5 * gamma - 1j * dd
    elif denominator == "printed":
        den = gamma - 1j * dd
    else:
        raise ConfigError("denominator must be half|printed")
    qw = weights.quad_weights() * weights.values
    out = np.empty(times.size)
    for i, t in enumerate(times):
        envelope = np.exp(-0.5 * gamma * t)
        inner = envelope * (np.exp(-1j * dd * t) - envelope) / den
        out[i] = 2 * np.real(1j * np.dot(qw, inner))
    return ForceTrace(times=times, values=out, method="FM", state="excited",
                      f0_si=weights.f0_si)


def fm_force_ground(delta_g: float, weights: ForceWeightTable, times) -> ForceTrace:
    """FM force of the ground-state atom:
    F/F0 = 2 int w (1 - cos((w + w0 + delta_g) t)) / (w + w0 + delta_g)."""
    times = np.asarray(times, dtype=float)
    dd = weights.omega + weights.omega0 + delta_g
    qw = weights.quad_weights() * weights.values
    out = np.empty(times.size)
    for i, t in enumerate(times):
        out[i] = 2 * np.dot(qw, (1 - np.cos(dd * t)) / dd)
    return ForceTrace(times=times, values=out, method="FM", state="ground",
                      f0_si=weights.f0_si)


def pm2_force(
    trace: AmplitudeTrace,
    weights: ForceWeightTable,
    state: str,
    times=None,
) -> ForceTrace:
    """PM2 force: memoryless population imposed inside the time integral.

    F/F0 = 2 |c(t)|^2 int w (1 - cos(D t)) / D; the excited-state integrand
    is evaluated by series for |D t| < 1e-3 (removable singularity at D = 0).
    """
    d = _detuning(weights, state)
    qw = weights.quad_weights() * weights.values
    if times is None:
        times = trace.times
        pops = trace.population
    else:
        times = np.asarray(times, dtype=float)
        pops = np.interp(times, trace.times, trace.population)
    out = np.empty(times.size)
    for i, t in enumerate(times):
        x = d * t
        small = np.abs(x) < 1e-3
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.where(small, t * x * (0.5 - x * x / 24), (1 - np.cos(x)) / d)
        out[i] = 2 * pops[i] * np.dot(qw, f)
    return ForceTrace(times=times, values=out, method="PM2", state=state,
                      f0_si=weights.f0_si)


def pm2_force_parts(weights: ForceWeightTable, t: float) -> dict:
    """Static/dynamic decomposition of the ground-state PM2 integrand."""
    d = _detuning(weights, "ground")
    qw = weights.quad_weights() * weights.values
    static = 2 * float(np.dot(qw, 1.0 / d))
    dynamic = -2 * float(np.dot(qw, np.cos(d * t) / d))
    return {"static": static, "dynamic": dynamic}


def fm2_static_force(weights: ForceWeightTable, omega0: float, state: str) -> float:
    """FM2 static value (the t -> inf limit of PM2 up to |c|^2).

    Ground: 2 int w/(w + w0); excited: 2 PV int w/(w - w0) (the resonant
    Sokhotski-Plemelj part is imaginary for the real alpha = z weight and
    drops under Re). Known defect: F(0) != 0 for this approximation.
    """
    if state == "ground":
        return 2 * float(np.trapezoid(weights.values / (weights.omega + omega0), weights.omega))
    if state == "excited":
        return 2 * pv_integral(weights.omega, weights.values, omega0)
    raise ConfigError(f"state must be excited|ground, got {state!r}")


def cp_force_from_shift(scenario: Scenario, weights: ForceWeightTable | None = None) -> float:
    """Static CP force as the total differential of the ground energy shift.

    FC = -d(-hbar delta_g(r)) along z equals the quadrature of the
    differentiated shift integrand; identical to the ground FM2 static value
    by construction of the shared weight table.
    """
    if weights is None:
        weights = build_force_weights(scenario)
    return fm2_static_force(weights, scenario.atom.omega0, "ground")


def lateral_force_weights_disabled() -> str:
    """Lateral (x, y) forces use the -Re branch of the derivative identity;
    they vanish identically for reciprocal media and stay disabled by default."""
    return "disabled"
