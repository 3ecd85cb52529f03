"""Closed-form Markov ladder: decay rate, shifts, FM and PM amplitudes.

Fermi-golden-rule quantities of the two initial-value problems:

    Gamma   = 2 pi J(w0)                         (excited decay rate)
    delta   = PV int J(w) / (w - w0) dw          (excited shift)
    delta_g = int J(w) / (w + w0) dw             (ground-manifold shift)

FM amplitudes:  c_eo = e^{-Gamma t/2} e^{i delta t},  b_go = e^{i delta_g t}.

PM amplitudes keep the finite upper limit of the memory integral. For the
excited state the log-amplitude reduces to principal-value-free quadratures:

    c_PM(t) = exp(-A(t)) exp(-i B(t)),
    A(t) = int J (1 - cos(D t)) / D^2 dw,   D = w - w0,
    B(t) = int J (sin(D t) - D t) / D^2 dw,

whose t -> inf limits reproduce Gamma/2 decay and the delta phase. The
ground-state analog has no singularity since w + w0 > 0.

Principal values on sampled data use singularity subtraction,

    PV int F/(w - w0) = int (F - F(w0))/(w - w0) + F(w0) ln((wmax - w0)/w0);

an alternative contour-rotation path (integral along positive imaginary
frequencies plus the i pi residue bookkeeping) is available for backends
with an analytic continuation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .spectral import SpectralDensity


@dataclass(frozen=True)
class MarkovSummary:
    """FM decay rate and the two shifts, all real, in units of omega_p."""

    gamma: float
    delta: float
    delta_g: float


def decay_rate(sd: SpectralDensity, omega0: float) -> float:
    """Gamma = 2 pi J(omega0); omega0 must lie inside the sampled grid."""
    if not (sd.omega[0] <= omega0 <= sd.omega[-1]):
        raise ConfigError(
            f"omega0={omega0} outside the J grid [{sd.omega[0]}, {sd.omega[-1]}]"
        )
    return float(2 * np.pi * sd(omega0))


def pv_integral(omega: np.ndarray, fvals: np.ndarray, omega0: float) -> float:
    """PV of int_0^wmax F(w)/(w - w0) dw by singularity subtraction.

    The subtracted integrand is finite at w0; the node closest to w0 is
    assigned the local slope estimated from its neighbors.
    """
    f0 = float(np.interp(omega0, omega, fvals))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (fvals - f0) / (omega - omega0)
    i = int(np.argmin(np.abs(omega - omega0)))
    lo, hi = max(i - 2, 0), min(i + 3, len(omega))
    sel = np.abs(omega[lo:hi] - omega0) > 1e-12
    if np.count_nonzero(sel) >= 2:
        slope = np.polyfit(omega[lo:hi][sel], fvals[lo:hi][sel], 1)[0]
    else:
        slope = 0.0
    bad = ~np.isfinite(g) | (np.abs(omega - omega0) < 1e-12)
    g = np.where(bad, slope, g)
    # exact subtraction constant over [omega_min, omega_max]; reduces to the
    # textbook ln((wmax - w0)/w0) as omega_min -> 0
    log_term = f0 * np.log((omega[-1] - omega0) / (omega0 - omega[0]))
    return float(np.trapezoid(g, omega) + log_term)


def lamb_shift_excited(
    sd: SpectralDensity,
    omega0: float,
    method: str = "subtraction",
    continuation=None,
    extra_pole_residues=(),
) -> float:
    """Excited-state shift delta = PV int J/(w - w0) dw.

    method='rotation' closes the contour through the first quadrant:
        PV = Re[ i pi J(w0) + int_0^inf J(iy) i/(iy - w0) dy + 2 pi i Res ],
    available when a continuation callable J(z) is supplied (Quasistatic and
    Lorentzian backends); extra_pole_residues lists residues of J(z)/(z - w0)
    at poles of J inside the first quadrant.
    """
    if method == "subtraction":
        return pv_integral(sd.omega, sd.values, omega0)
    if method == "rotation":
        if continuation is None:
            raise ConfigError("rotation path requires an analytic continuation")
        from scipy.integrate import quad

        def fre(y):
            z = 1j * y
            return (continuation(z) * 1j / (z - omega0)).real

        def fim(y):
            z = 1j * y
            return (continuation(z) * 1j / (z - omega0)).imag

        upper = max(10 * sd.omega_max, 100 * omega0)
        re_part = quad(fre, 0.0, upper, limit=400)[0]
        im_part = quad(fim, 0.0, upper, limit=400)[0]
        total = complex(re_part, im_part) + 1j * np.pi * sd(omega0)
        total += 2j * np.pi * np.sum(np.asarray(extra_pole_residues, dtype=complex))
        # imaginary parts must cancel between the residue and axis terms
        if abs(total.imag) > 1e-6 * (abs(total.real) + abs(1j * np.pi * sd(omega0))):
            raise ConfigError(
                f"rotation bookkeeping left an imaginary remainder {total.imag:.3e}"
            )
        return float(total.real)
    raise ConfigError(f"unknown PV method {method!r}")


def lamb_shift_ground(sd: SpectralDensity, omega0: float) -> float:
    """delta_g = int J/(w + w0) dw; positive for any nontrivial J >= 0."""
    return sd.moment(lambda w: 1.0 / (w + omega0))


def markov_summary(sd: SpectralDensity, omega0: float) -> MarkovSummary:
    return MarkovSummary(
        gamma=decay_rate(sd, omega0),
        delta=lamb_shift_excited(sd, omega0),
        delta_g=lamb_shift_ground(sd, omega0),
    )


def fm_population(state: str, t, gamma: float, delta: float) -> np.ndarray:
    """Full-Markov amplitude; delta means delta_g for the ground state.

    Excited: c_eo = e^{-Gamma t / 2} e^{i delta t}; ground: b_go = e^{i delta_g t}
    (the ground manifold has no Markovian decay channel).
    """
    t = np.asarray(t, dtype=float)
    if state == "excited":
        return np.exp((-0.5 * gamma + 1j * delta) * t)
    if state == "ground":
        return np.exp(1j * delta * t)
    raise ConfigError(f"state must be excited|ground, got {state!r}")


def _phase_weighted_moments(sd: SpectralDensity, omega0: float, t: float, sign: int):
    """A and B integrals of the PM log-amplitude for detuning D = w + sign*w0."""
    d = sd.omega + sign * omega0
    x = d * t
    small = np.abs(x) < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        a_int = np.where(small, t * t * (0.5 - x * x / 24), (1 - np.cos(x)) / (d * d))
        b_int = np.where(
            small, -t * t * t * d / 6 * (1 - x * x / 20), (np.sin(x) - x) / (d * d)
        )
    a = float(np.trapezoid(sd.values * a_int, sd.omega))
    b = float(np.trapezoid(sd.values * b_int, sd.omega))
    return a, b


def pm_population(state: str, t, sd: SpectralDensity, omega0: float) -> np.ndarray:
    """Partial-Markov amplitude (memoryless population, finite time limit)."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(ts.shape, dtype=complex)
    if state == "excited":
        for i, ti in enumerate(ts):
            a, b = _phase_weighted_moments(sd, omega0, ti, sign=-1)
            out[i] = np.exp(-a - 1j * b)
    elif state == "ground":
        dg = lamb_shift_ground(sd, omega0)
        dpos = sd.omega + omega0
        for i, ti in enumerate(ts):
            q_diff = -np.trapezoid(
                sd.values * (1 - np.exp(-1j * dpos * ti)) / dpos**2, sd.omega
            )
            out[i] = np.exp(1j * dg * ti) * np.exp(q_diff)
    else:
        raise ConfigError(f"state must be excited|ground, got {state!r}")
    return out if np.ndim(t) else complex(out[0])
