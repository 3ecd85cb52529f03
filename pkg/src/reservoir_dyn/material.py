"""Dispersion model of the magnetized-plasma (gyrotropic) half-space.

With a static bias field along +y the relative permittivity tensor is

    eps = eps_t * I_t + eps_a * yy + i * eps_g * (y x I),   I_t = I - yy,

with components (frequencies in units of omega_p)

    eps_t = 1 - (1 + i G/w) / ((w + iG)^2 - wc^2)
    eps_a = 1 - 1 / (w (w + iG))
    eps_g = (1/w) * wc / (wc^2 - (w + iG)^2)

where G is the collision rate and wc the cyclotron frequency. wc = 0 gives a
reciprocal isotropic Drude plasma with eps_t = eps_a and eps_g = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaterialPoleError

# Minimum |denominator| before an evaluation counts as sitting on a pole.
_POLE_ATOL = 1e-30


@dataclass(frozen=True)
class MaterialConfig:
    """Half-space material parameters in normalized units (omega_p = 1).

    gamma_c: collision rate; omega_c: cyclotron frequency (0 => reciprocal).
    """

    gamma_c: float = 1e-3
    omega_c: float = 0.0

    def __post_init__(self):
        if self.gamma_c < 0:
            raise ValueError(f"gamma_c must be >= 0, got {self.gamma_c}")
        if self.omega_c < 0:
            raise ValueError(f"omega_c must be >= 0, got {self.omega_c}")


@dataclass(frozen=True)
class PermittivityTensor:
    """Complex dimensionless components of the gyrotropic permittivity."""

    eps_t: complex
    eps_a: complex
    eps_g: complex

    def as_matrix(self) -> np.ndarray:
        """Full 3x3 tensor in the (x, y, z) basis, bias along +y."""
        t, a, g = self.eps_t, self.eps_a, self.eps_g
        return np.array(
            [[t, 0.0, 1j * g], [0.0, a, 0.0], [-1j * g, 0.0, t]], dtype=complex
        )

    def antihermitian_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of (eps - eps^dag) / 2i; all >= 0 for a passive medium."""
        m = self.as_matrix()
        return np.linalg.eigvalsh((m - m.conj().T) / 2j)


def permittivity(material: MaterialConfig, omega) -> PermittivityTensor:
    """Evaluate the permittivity components at a (possibly complex) frequency.

    Complex omega is required by the rotated-contour shift integrals. Raises
    MaterialPoleError if omega coincides with a pole of the closed forms
    (omega = 0, -iG, or +-omega_c - iG).
    """
    w = complex(omega)
    gc = material.gamma_c
    wc = material.omega_c
    wg = w + 1j * gc
    den_t = wg * wg - wc * wc
    den_a = w * wg
    if abs(w) < _POLE_ATOL or abs(den_t) < _POLE_ATOL or abs(den_a) < _POLE_ATOL:
        raise MaterialPoleError(
            f"permittivity evaluated at a pole: omega={omega!r}, "
            f"|den_t|={abs(den_t):.3e}, |den_a|={abs(den_a):.3e}"
        )
    eps_t = 1.0 - (1.0 + 1j * gc / w) / den_t
    eps_a = 1.0 - 1.0 / den_a
    eps_g = (wc / w) / (wc * wc - wg * wg)
    return PermittivityTensor(eps_t, eps_a, eps_g)


def eps_t_scalar(material: MaterialConfig, omega):
    """Vectorized eps_t for array-valued omega (hot path of the quadratures)."""
    w = np.asarray(omega, dtype=complex)
    gc = material.gamma_c
    wc = material.omega_c
    return 1.0 - (1.0 + 1j * gc / w) / ((w + 1j * gc) ** 2 - wc * wc)
