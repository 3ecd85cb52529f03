"""Independent brute-force references used only by the test suite.

Two oracles validate the Volterra machinery from opposite directions:

  * the closed-form amplitude of a Lorentzian reservoir (the memory kernel
    -g^2 e^{-(lambda + i Delta) tau} maps onto a damped 2x2 linear system);
  * direct RK4 integration of the coupled atom + discretized-continuum
    amplitude equations, which reproduces the VIE in the many-mode limit.

The discretization picks modes by inverse-CDF sampling of J, so the SPP peak
is resolved with few modes; eliminating the modes analytically would return
the kernel quadrature of the sampled J exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDensity
from .volterra import AmplitudeTrace


def lorentzian_amplitude(t, g_rabi: float, lam: float, delta: float = 0.0):
    """Exact amplitude for K(tau) = -g^2 e^{-(lambda + i Delta) tau}.

    c(t) = e^{-mu t/2} [cosh(Omega t/2) + (mu/Omega) sinh(Omega t/2)],
    mu = lambda + i Delta, Omega = sqrt(mu^2 - 4 g^2). c(0) = 1, c'(0) = 0.
    """
    t = np.asarray(t, dtype=float)
    mu = lam + 1j * delta
    om = np.sqrt(mu * mu - 4 * g_rabi * g_rabi + 0j)
    return np.exp(-mu * t / 2) * (np.cosh(om * t / 2) + (mu / om) * np.sinh(om * t / 2))


@dataclass(frozen=True)
class DiscretizedContinuum:
    """M reservoir modes with couplings kappa_m^2 = (equal-mass J bins)."""

    omega_modes: np.ndarray
    kappa2: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.omega_modes)

    def moment(self, f) -> float:
        return float(np.sum(self.kappa2 * f(self.omega_modes)))


def discretize(sd: SpectralDensity, n_modes: int = 400) -> DiscretizedContinuum:
    """Inverse-CDF (equal-mass) sampling of J; each bin contributes its mass
    at the mass centroid."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    w = sd.omega
    j = np.maximum(sd.values, 0.0)  # mode couplings kappa^2 must be >= 0
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (j[1:] + j[:-1]) * np.diff(w))])
    total = cdf[-1]
    if total <= 0:
        return DiscretizedContinuum(np.array([]), np.array([]))
    targets = np.linspace(0.0, total, n_modes + 1)
    edges = np.interp(targets, cdf, w)
    masses = np.diff(targets)
    # mass centroid per bin from the fine grid
    centers = np.empty(n_modes)
    for i in range(n_modes):
        a, b = edges[i], edges[i + 1]
        sub = np.linspace(a, b, 12)
        js = sd(sub)
        m = np.trapezoid(js, sub)
        centers[i] = np.trapezoid(js * sub, sub) / m if m > 0 else 0.5 * (a + b)
    return DiscretizedContinuum(omega_modes=centers, kappa2=masses)


def brute_force_evolution(
    continuum: DiscretizedContinuum,
    omega0: float,
    state: str,
    t_final: float,
    n_steps: int,
) -> tuple[AmplitudeTrace, np.ndarray]:
    """Classical RK4 integration of the (M + 1)-dimensional coupled system.

        d a0/dt = -sum_m k_m a_m e^{-i (w_m -+ w0) t}
        d a_m/dt = +k_m a0 e^{+i (w_m -+ w0) t}

    (upper sign excited, lower ground). Norm |a0|^2 + sum |a_m|^2 is exactly
    conserved by the continuous system; the returned mode amplitudes allow
    the probability check. M = 0 returns the trivial constant trace.
    """
    m = continuum.n_modes
    h = t_final / n_steps
    sign = -1.0 if state == "excited" else +1.0
    det = continuum.omega_modes + sign * omega0
    kap = np.sqrt(continuum.kappa2)
    if m:
        fastest = np.max(np.abs(det))
        if fastest > 0 and h > 2 * np.pi / (10 * fastest):
            import warnings

            warnings.warn(
                f"RK4 step {h:.3e} marginal for the fastest mode detuning "
                f"{fastest:.3f}; refine n_steps",
                stacklevel=2,
            )

    a0 = np.zeros(n_steps + 1, dtype=complex)
    a0[0] = 1.0
    am = np.zeros(m, dtype=complex)

    def rhs(t, y0, ym):
        ph = np.exp(-1j * det * t)
        d0 = -np.sum(kap * ym * ph)
        dm = kap * y0 * np.conj(ph)
        return d0, dm

    y0 = 1.0 + 0.0j
    ym = am
    for i in range(n_steps):
        t = i * h
        k1 = rhs(t, y0, ym)
        k2 = rhs(t + h / 2, y0 + h / 2 * k1[0], ym + h / 2 * k1[1])
        k3 = rhs(t + h / 2, y0 + h / 2 * k2[0], ym + h / 2 * k2[1])
        k4 = rhs(t + h, y0 + h * k3[0], ym + h * k3[1])
        y0 = y0 + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        ym = ym + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        a0[i + 1] = y0

    trace = AmplitudeTrace(
        h=h,
        values=a0,
        state=state,
        metadata={"oracle": "rk4_continuum", "n_modes": m},
    )
    return trace, ym


def probability_deficit(trace: AmplitudeTrace, final_modes: np.ndarray) -> float:
    """|a0(T)|^2 + sum |a_m(T)|^2 - 1 at the final time (0 for exact unitarity)."""
    total = abs(trace.values[-1]) ** 2 + float(np.sum(np.abs(final_modes) ** 2))
    return abs(total - 1.0)
