"""Laplace-domain long-time analysis of the ground-state amplitude.

The transform of the ground-state Volterra equation gives

    b_go(s) = 1 / (s + Gamma(s)),
    Gamma(s) = int_0^inf J(w) / (s + i (w + w0)) dw,

analytic off the branch cut running from s = -i w0 down to -i infinity. On
the imaginary axis s = i a (a > -w0) the integrand is purely imaginary, so
poles of b_go(s) on that axis solve the real root equation

    a = int J(w) / (w + w0 + a) dw,

and the surviving amplitude is the residue b_Res(t) = c e^{i a_p t} with
|c| = 1 / D'(s_p), D(s) = s + Gamma(s), D'(i a) = 1 + int J/(w + w0 + a)^2 >= 1.
The weak-coupling root reduces to the ground-state shift delta_g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoPoleError
from .markov import lamb_shift_ground
from .spectral import SpectralDensity


@dataclass(frozen=True)
class PoleSummary:
    """Imaginary-axis pole of b_go(s) and its residue magnitude."""

    alpha_p: float
    c_mag: float
    dprime: float
    delta_g_ref: float


def gamma_of_s(sd: SpectralDensity, omega0: float, s: complex) -> complex:
    """Gamma(s) by quadrature against 1/(s + i(w + w0)).

    Raises if s sits on (or hugs) the branch cut s = -i w0 ... -i inf.
    """
    s = complex(s)
    if s.real == 0.0 and s.imag <= -omega0 + 1e-12:
        raise NoPoleError(
            f"s={s} lies on the branch cut (s = -i w0 down to -i inf)"
        )
    den = s + 1j * (sd.omega + omega0)
    if np.min(np.abs(den)) < 1e-12:
        raise NoPoleError(f"s={s} within 1e-12 of the branch cut support")
    return complex(np.trapezoid(sd.values / den, sd.omega))


def _root_function(sd: SpectralDensity, omega0: float):
    w = sd.omega
    j = sd.values
    def f(alpha):
        return alpha - np.trapezoid(j / (w + omega0 + alpha), w)
    return f


def find_pole(sd: SpectralDensity, omega0: float) -> PoleSummary:
    """Bracketed 1-D root solve of the pole equation on (0, 0.9 w0)."""
    f = _root_function(sd, omega0)
    lo, hi = 1e-8 * omega0, 0.9 * omega0
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoPoleError(
            "no sign change of the pole equation in the bracket",
            bracket=(lo, hi),
            residuals=(flo, fhi),
        )
    alpha_p = brentq(f, lo, hi, xtol=1e-300, rtol=1e-12)
    dprime = 1.0 + float(np.trapezoid(sd.values / (sd.omega + omega0 + alpha_p) ** 2, sd.omega))
    return PoleSummary(
        alpha_p=float(alpha_p),
        c_mag=1.0 / dprime,
        dprime=dprime,
        delta_g_ref=lamb_shift_ground(sd, omega0),
    )


def pole_equation_scan(sd: SpectralDensity, omega0: float, n: int = 400):
    """Samples of the root function on (0, 0.9 w0); used to assert uniqueness."""
    alphas = np.linspace(1e-8 * omega0, 0.9 * omega0, n)
    f = _root_function(sd, omega0)
    return alphas, np.array([f(a) for a in alphas])


def branch_cut_check(sd: SpectralDensity, omega0: float, x: float | None = None) -> dict:
    """Numerically verify the discontinuity structure across the imaginary axis.

    G_d(s) = Gamma(x + i y) - Gamma(-x + i y) tends to 0 for y > -w0 and to
    2 pi J(-y - w0) below the branch point as x -> 0 (delta-sequence limit).
    Returns a diagnostic report; 'ok' summarizes both checks.
    """
    if x is None:
        x = 1e-4 * omega0
    if np.all(sd.values == 0):
        return {"ok": True, "above": 0.0, "below": 0.0, "expected_below": 0.0,
                "rel_err_below": 0.0, "norm": 0.0}
    norm = sd.total_weight()

    def gd(y):
        return gamma_of_s(sd, omega0, complex(x, y)) - gamma_of_s(sd, omega0, complex(-x, y))

    above = abs(gd(+0.1 * omega0))

    w_peak, _ = sd.peak()
    y_probe = -(omega0 + w_peak)
    below = gd(y_probe)
    expected = 2 * np.pi * sd(-y_probe - omega0)
    rel = abs(below - expected) / expected if expected > 0 else np.inf
    return {
        "ok": bool(above < 1e-3 * norm and rel < 0.1),
        "above": above,
        "below": complex(below),
        "expected_below": float(expected),
        "rel_err_below": float(rel),
        "norm": float(norm),
    }


def asymptotic_cp_force(pole: PoleSummary, weights, omega0: float) -> dict:
    """t -> inf Casimir-Polder force from the pole, with the FM comparator.

    F_nm / F0 = |c|^2 * 2 int w(omega) / (omega + omega0 + alpha_p) d omega;
    the FM value replaces alpha_p -> delta_g and |c| -> 1.
    """
    wgrid, wvals = weights.omega, weights.values
    nm = pole.c_mag**2 * 2 * np.trapezoid(wvals / (wgrid + omega0 + pole.alpha_p), wgrid)
    fm = 2 * np.trapezoid(wvals / (wgrid + omega0 + pole.delta_g_ref), wgrid)
    return {"nonmarkov": float(nm), "fm": float(fm)}
