"""Scattered dyadic Green function of the half-space at coincident points.

The quantity every downstream module consumes is the zz element of the
scattered (reflected) Green function per unit dipole moment squared,

    g_zz(z0, w) = (i / 4 pi) int_0^inf dk  k^3 / (k0^2 kz0)  r_pp(k)  e^{2 i kz0 z0},

in normalized units (omega_p = c = 1, k0 = w), normalization convention
E = i w mu0 int G . J. Three backends:

  * SommerfeldHalfSpace: real-axis wavenumber quadrature of the reflection
    response. For omega_c = 0 the closed-form Fresnel r_p is used and the
    integral is one-dimensional; for omega_c != 0 the reflection matrix is
    obtained by solving the 4-unknown boundary-matching system per (kx, ky)
    and the integral runs over the full 2-D spectral plane.
  * QuasistaticHalfSpace: near-field image closed form
    (eps_t - 1)/(eps_t + 1) / (16 pi k0^2 z0^3), valid for z0 << 1/k0.
  * LorentzianModel: no Green function; an analytic single-peak reservoir
    used as an oracle (see spectral module).

Spatial derivatives follow the coincident-point convention of the force
operator: d/dz acts on the field argument before r -> r0, which for the
scattered part multiplies the spectral integrand by (i kz0) propagating /
(-gamma0) evanescent, i.e. half the total z0-derivative of g_zz(z0, z0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .material import MaterialConfig, eps_t_scalar

_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int):
    if n not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _LEGENDRE_CACHE[n]


@dataclass(frozen=True)
class GreensSample:
    """g_zz and its first-argument z-derivative at one (z0, omega)."""

    omega: float
    g_zz: complex
    d_dz_g_zz: complex
    backend: str
    error_estimate: float = 0.0


# ---------------------------------------------------------------------------
# Fresnel (omega_c = 0) fast path
# ---------------------------------------------------------------------------

def fresnel_rp_evanescent(eps, gamma0, k0):
    """TM reflection coefficient in the evanescent parametrization.

    gamma0 = sqrt(k^2 - k0^2) >= 0, gamma1 = sqrt(k^2 - eps k0^2) with
    Re gamma1 >= 0; r_p = (eps g0 - g1) / (eps g0 + g1).
    """
    g1 = np.sqrt(gamma0**2 + k0**2 * (1.0 - eps))
    g1 = np.where(g1.real < 0, -g1, g1)
    return (eps * gamma0 - g1) / (eps * gamma0 + g1)


def fresnel_rp_propagating(eps, kz0, k0):
    """TM reflection coefficient for propagating waves, kz0 = k0 cos(theta)."""
    kr2 = k0**2 - kz0**2
    kz1 = np.sqrt(eps * k0**2 - kr2 + 0j)
    kz1 = np.where(kz1.imag < 0, -kz1, kz1)
    return (eps * kz0 - kz1) / (eps * kz0 + kz1)


def spp_pole_gamma0(material: MaterialConfig, omega: float):
    """Location of the SPP pole of r_p on the evanescent path.

    The pole of (eps g0 + g1) sits at g0^2 = -k0^2/(eps + 1); it lies near
    the real path only when Re eps < -1 (surface mode exists).
    """
    eps = complex(eps_t_scalar(material, omega))
    g0s = np.sqrt(-(omega**2) / (eps + 1.0) + 0j)
    if g0s.real < 0:
        g0s = -g0s
    return g0s


def _evanescent_edges(omega: float, z0: float, material: MaterialConfig) -> np.ndarray:
    """Panel edges on the gamma0 axis, geometrically refined at the SPP pole."""
    k0 = omega
    gmax = max(20.0 / z0, 10.0 * k0)
    g0s = spp_pole_gamma0(material, omega)
    gs, width = g0s.real, abs(g0s.imag) + 1e-7 * max(k0, 1e-3)
    edges = [0.0]
    if 0.0 < gs < gmax:
        span_l = max(gs * 0.95, 2 * width)
        span_r = max((gmax - gs) * 0.95, 2 * width)
        left = gs - np.geomspace(width, span_l, 22)[::-1]
        right = gs + np.geomspace(width, span_r, 22)
        edges += [e for e in left if e > 0] + [gs] + [e for e in right if e < gmax]
    else:
        edges += list(np.geomspace(1e-3 * max(k0, 0.05), 0.5 * gmax, 12))
    edges.append(gmax)
    return np.unique(np.asarray(edges))


def _propagating_edges(eps_re: float) -> np.ndarray:
    """Theta panel edges; split at the transmitted-wave branch point
    sin(theta_b) = sqrt(Re eps) when the medium is transparent (0 < eps < 1)."""
    base = np.linspace(0.0, np.pi / 2, 9)
    if not (0.0 < eps_re < 1.0):
        return base
    th_b = float(np.arcsin(np.sqrt(eps_re)))
    cluster = np.geomspace(1e-6, 0.3, 7)
    pts = np.concatenate([base, [th_b], th_b - cluster, th_b + cluster])
    pts = pts[(pts > 0) & (pts < np.pi / 2)]
    return np.unique(np.concatenate([pts, [0.0, np.pi / 2]]))


def _flatten_panels(edge_list, xg, wg):
    """Per-frequency panel edges -> flat (nodes, weights, frequency index)."""
    nodes, weights, idx = [], [], []
    for i, e in enumerate(edge_list):
        ea, eb = e[:-1], e[1:]
        n = (0.5 * (eb - ea)[:, None] * xg[None, :] + 0.5 * (eb + ea)[:, None]).ravel()
        w = (0.5 * (eb - ea)[:, None] * wg[None, :]).ravel()
        nodes.append(n)
        weights.append(w)
        idx.append(np.full(n.size, i))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(idx)


def _bincount_complex(idx, values, n):
    return np.bincount(idx, weights=values.real, minlength=n) + 1j * np.bincount(
        idx, weights=values.imag, minlength=n
    )


def _gzz_fresnel_once(z0, omegas, material, deriv, n_nodes):
    """1-D Sommerfeld quadrature, vectorized over an array of frequencies."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    n_w = omegas.size
    xg, wg = _leggauss(n_nodes)
    eps_all = eps_t_scalar(material, omegas)

    # propagating part: k = k0 sin(theta) substitution removes the 1/kz0 root
    th, th_w, idx = _flatten_panels(
        [_propagating_edges(e.real) for e in eps_all], xg, wg
    )
    k0 = omegas[idx]
    eps = eps_all[idx]
    kz0 = k0 * np.cos(th)
    f = np.sin(th) ** 3 * fresnel_rp_propagating(eps, kz0, k0) * np.exp(2j * kz0 * z0)
    if deriv:
        f = f * (1j * kz0)
    prop = (1j * omegas / (4 * np.pi)) * _bincount_complex(idx, th_w * f, n_w)

    # evanescent part: per-frequency pole-refined panels
    g, gw, idx = _flatten_panels(
        [_evanescent_edges(w, z0, material) for w in omegas], xg, wg
    )
    k0f = omegas[idx]
    epsf = eps_all[idx]
    f = (g**2 + k0f**2) * fresnel_rp_evanescent(epsf, g, k0f) * np.exp(-2 * g * z0)
    if deriv:
        f = f * (-g)
    evan = _bincount_complex(idx, gw * f, n_w) / (4 * np.pi * omegas**2)
    return prop + evan


def gzz_fresnel(z0, omegas, material, deriv=False, n_nodes=20, rtol=1e-6):
    """g_zz (or its z-derivative) with an embedded error estimate.

    Returns (values, estimates). Convergence is judged against the local
    magnitude with an absolute floor tied to the largest value in the batch,
    so spectrally negligible points cannot fail on relative terms alone.
    Raises QuadratureError when node enrichment still moves the result.
    """
    lo = _gzz_fresnel_once(z0, omegas, material, deriv, n_nodes)
    hi = _gzz_fresnel_once(z0, omegas, material, deriv, n_nodes + 12)
    est = np.abs(hi - lo)
    scale = np.maximum(np.abs(hi), np.max(np.abs(hi)) * 1e-4) + 1e-300
    bad = est / scale > rtol
    if np.any(bad):
        iw = int(np.argmax(est / scale))
        raise QuadratureError(
            f"Sommerfeld quadrature not converged at omega="
            f"{np.atleast_1d(omegas)[iw]:.6f} (rel. est. {(est / scale)[iw]:.2e})",
            estimate=float(est[iw]),
        )
    return hi, est


# ---------------------------------------------------------------------------
# Gyrotropic half-space: 4-unknown boundary matching per (kx, ky)
# ---------------------------------------------------------------------------

def _wave_matrix_det(kx, ky, kz, k0sq, epsm):
    """det(kk - k^2 I + k0^2 eps) for stacked wavevectors (explicit 3x3 det)."""
    kx, ky, kz = np.broadcast_arrays(kx, ky, kz)
    k2 = kx * kx + ky * ky + kz * kz
    m = np.empty(k2.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = kx * kx - k2 + k0sq * epsm[0, 0]
    m[..., 0, 1] = kx * ky + k0sq * epsm[0, 1]
    m[..., 0, 2] = kx * kz + k0sq * epsm[0, 2]
    m[..., 1, 0] = ky * kx + k0sq * epsm[1, 0]
    m[..., 1, 1] = ky * ky - k2 + k0sq * epsm[1, 1]
    m[..., 1, 2] = ky * kz + k0sq * epsm[1, 2]
    m[..., 2, 0] = kz * kx + k0sq * epsm[2, 0]
    m[..., 2, 1] = kz * ky + k0sq * epsm[2, 1]
    m[..., 2, 2] = kz * kz - k2 + k0sq * epsm[2, 2]
    a = m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
    b = m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
    c = m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    return a - b + c, m


def _wave_matrix(kx, ky, kz, k0sq, epsm):
    return _wave_matrix_det(kx, ky, kz, k0sq, epsm)[1]


def _medium_modes(kx, ky, omega, epsm):
    """Two downward-decaying plane-wave modes (kz roots + polarizations).

    The dispersion determinant is a quartic in kz; its coefficients are
    recovered from five evaluations (Vandermonde fit), the roots from the
    companion matrix, and the polarizations from the null space of the wave
    matrix. Returns (kz[(N,2)], evec[(N,2,3)]).
    """
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    n = kx.size
    k0sq = omega * omega
    scale = np.maximum(np.abs(omega), np.hypot(kx, ky))
    pts = np.array([0.0, 1.0, -1.0, 2.0, -2.0])
    kz_pts = scale[:, None] * pts[None, :]
    det, _ = _wave_matrix_det(
        kx[:, None], ky[:, None], kz_pts, k0sq, epsm
    )
    vand = kz_pts[..., None] ** np.arange(5)[None, None, :]
    coef = np.linalg.solve(vand, det[..., None])[..., 0]  # c0..c4 per node

    # companion matrix of the monic quartic; floor the leading coefficient
    cmax = np.max(np.abs(coef), axis=1)
    c4 = coef[:, 4]
    tiny = np.abs(c4) < 1e-13 * cmax
    c4 = np.where(tiny, 1e-13 * cmax * np.exp(1j * np.angle(c4 + (c4 == 0))), c4)
    mon = coef[:, :4] / c4[:, None]
    comp = np.zeros((n, 4, 4), dtype=complex)
    comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
    comp[:, :, 3] = -mon
    roots = np.linalg.eigvals(comp)

    order = np.argsort(roots.imag, axis=1)
    kz_sel = np.take_along_axis(roots, order[:, :2], axis=1)  # most negative Im

    # polarizations: smallest right-singular vectors of the wave matrix
    m1 = _wave_matrix(kx, ky, kz_sel[:, 0], k0sq, epsm)
    _, s1, vh1 = np.linalg.svd(m1)
    e1 = vh1[:, 2, :].conj()
    near_degenerate = np.abs(kz_sel[:, 0] - kz_sel[:, 1]) < 1e-6 * np.maximum(scale, 1e-12)
    m2 = _wave_matrix(kx, ky, kz_sel[:, 1], k0sq, epsm)
    _, s2, vh2 = np.linalg.svd(m2)
    e2 = np.where(near_degenerate[:, None], vh1[:, 1, :].conj(), vh2[:, 2, :].conj())
    kz = np.stack([kz_sel[:, 0], kz_sel[:, 1]], axis=1)
    ev = np.stack([e1, e2], axis=1)
    return kz, ev


def gyro_reflection(omega, material, kx, ky):
    """Reflection amplitudes (r_pp, r_sp) for a unit downgoing p wave.

    Tangential E and H are matched at z = 0 against the two transmitted
    modes of the gyrotropic medium; the 4x4 system is solved per node.
    """
    from .material import permittivity

    kx = np.atleast_1d(np.asarray(kx, dtype=float))
    ky = np.atleast_1d(np.asarray(ky, dtype=float))
    k0 = float(omega)
    epsm = permittivity(material, omega).as_matrix()

    krho = np.hypot(kx, ky)
    safe = krho > 1e-12 * max(k0, 1.0)
    khx = np.where(safe, kx / np.where(safe, krho, 1.0), 1.0)
    khy = np.where(safe, ky / np.where(safe, krho, 1.0), 0.0)
    kz0 = np.sqrt(k0 * k0 - krho * krho + 0j)
    kz0 = np.where(kz0.imag < 0, -kz0, kz0)

    def pvec(sign):
        # e_p(+-) = (-+ kz0 krho_hat + krho z) / k0
        return np.stack(
            [-sign * kz0 * khx, -sign * kz0 * khy, krho * np.ones_like(kz0)], axis=-1
        ) / k0

    e_s = np.stack([khy, -khx, np.zeros_like(khx)], axis=-1).astype(complex)
    e_p_dn = pvec(-1.0)
    e_p_up = pvec(+1.0)

    def hvec(kvec, evec):
        return np.cross(kvec, evec) / k0

    k_dn = np.stack([kx + 0j, ky + 0j, -kz0], axis=-1)
    k_up = np.stack([kx + 0j, ky + 0j, +kz0], axis=-1)

    kz_m, e_m = _medium_modes(kx, ky, k0, epsm)
    k_m1 = np.stack([kx + 0j, ky + 0j, kz_m[:, 0]], axis=-1)
    k_m2 = np.stack([kx + 0j, ky + 0j, kz_m[:, 1]], axis=-1)

    h_inc = hvec(k_dn, e_p_dn)
    h_rp = hvec(k_up, e_p_up)
    h_rs = hvec(k_up, e_s)
    h_m1 = hvec(k_m1, e_m[:, 0])
    h_m2 = hvec(k_m2, e_m[:, 1])

    n = kx.size
    A = np.zeros((n, 4, 4), dtype=complex)
    rhs = np.zeros((n, 4), dtype=complex)

    # rows: Ex, Ey, Hx, Hy continuity
    for r, comp in enumerate([0, 1]):
        A[:, r, 0] = e_p_up[..., comp]
        A[:, r, 1] = e_s[..., comp]
        A[:, r, 2] = -e_m[:, 0, comp]
        A[:, r, 3] = -e_m[:, 1, comp]
        rhs[:, r] = -e_p_dn[..., comp]
    for r, comp in enumerate([0, 1]):
        A[:, 2 + r, 0] = h_rp[..., comp]
        A[:, 2 + r, 1] = h_rs[..., comp]
        A[:, 2 + r, 2] = -h_m1[..., comp]
        A[:, 2 + r, 3] = -h_m2[..., comp]
        rhs[:, 2 + r] = -h_inc[..., comp]

    sol = np.linalg.solve(A, rhs[..., None])[..., 0]
    return sol[:, 0], sol[:, 1]


def _gzz_gyro_once(z0, omega, material, deriv, n_phi, n_nodes):
    """2-D spectral integral for the gyrotropic half-space at one frequency."""
    k0 = float(omega)
    xg, wg = _leggauss(n_nodes)
    phi = (np.arange(n_phi) + 0.5) * (2 * np.pi / n_phi)
    wphi = 2 * np.pi / n_phi

    # propagating radial panels in theta
    th_edges = np.linspace(0.0, np.pi / 2, 7)
    a, b = th_edges[:-1], th_edges[1:]
    th = (0.5 * (b - a)[:, None] * xg[None, :] + 0.5 * (b + a)[:, None]).ravel()
    th_w = (0.5 * (b - a)[:, None] * wg[None, :]).ravel()

    # evanescent panels (same refinement logic as the Fresnel path, but the
    # pole moves with phi under bias; widen the refined region)
    e = _evanescent_edges(omega, z0, material)
    g0s = spp_pole_gamma0(material, omega)
    if material.omega_c > 0 and 0 < g0s.real:
        extra = []
        for f in (0.5, 0.7, 1.4, 2.0, 3.0):
            c = g0s.real * f
            if 0 < c < e[-1]:
                extra += list(c + np.linspace(-0.4, 0.4, 9) * g0s.real * 0.3)
        e = np.unique(np.concatenate([e, [x for x in extra if 0 < x < e[-1]]]))
    ea, eb = e[:-1], e[1:]
    gv = (0.5 * (eb - ea)[:, None] * xg[None, :] + 0.5 * (eb + ea)[:, None]).ravel()
    gw = (0.5 * (eb - ea)[:, None] * wg[None, :]).ravel()

    total = 0.0 + 0.0j
    for ph in phi:
        cph, sph = np.cos(ph), np.sin(ph)
        # propagating
        kr = k0 * np.sin(th)
        kzp = k0 * np.cos(th)
        rpp, _ = gyro_reflection(omega, material, kr * cph, kr * sph)
        f = np.sin(th) ** 3 * rpp * np.exp(2j * kzp * z0)
        if deriv:
            f = f * (1j * kzp)
        total += wphi * (1j * k0 / (8 * np.pi**2)) * np.sum(th_w * f)
        # evanescent
        kr = np.sqrt(gv**2 + k0**2)
        rpp, _ = gyro_reflection(omega, material, kr * cph, kr * sph)
        f = (gv**2 + k0**2) * rpp * np.exp(-2 * gv * z0)
        if deriv:
            f = f * (-gv)
        total += wphi * np.sum(gw * f) / (8 * np.pi**2 * k0**2)
    return total


def gzz_gyro(z0, omega, material, deriv=False, n_phi=32, n_nodes=12):
    """Gyrotropic g_zz with a crude doubling-based error estimate."""
    lo = _gzz_gyro_once(z0, omega, material, deriv, n_phi, n_nodes)
    hi = _gzz_gyro_once(z0, omega, material, deriv, n_phi, n_nodes + 6)
    return hi, abs(hi - lo)


# ---------------------------------------------------------------------------
# Quasistatic backend
# ---------------------------------------------------------------------------

def image_coefficient(material: MaterialConfig, omega):
    """Electrostatic image response (eps_t - 1)/(eps_t + 1), complex omega ok."""
    eps = eps_t_scalar(material, omega)
    return (eps - 1.0) / (eps + 1.0)


def gzz_quasistatic(z0, omega, material, deriv=False):
    """Near-field image closed form; the non-coincident kernel is
    r_inf / (2 pi k0^2 (z + z0)^3), so the first-argument derivative carries
    the factor -(3 / 2 z0)."""
    w = np.asarray(omega, dtype=complex)
    g = image_coefficient(material, w) / (16 * np.pi * w * w * z0**3)
    if deriv:
        return -(1.5 / z0) * g
    return g


def im_gzz_quasistatic_continuation(z, z0, material):
    """Analytic continuation of Im g_zz off the real frequency axis.

    On the real axis Im g_zz = (R(w) - R(-w)) / 2i / (16 pi w^2 z0^3) with
    R the image coefficient; the right side is analytic and extends to
    complex arguments (poles of R lie in the lower half-plane).
    """
    z = np.asarray(z, dtype=complex)
    rz = image_coefficient(material, z)
    rm = image_coefficient(material, -z)
    return (rz - rm) / (2j * 16 * np.pi * z * z * z0**3)


# ---------------------------------------------------------------------------
# Backend dispatch
# ---------------------------------------------------------------------------

def scattered_gzz(z0, omega, material, backend, deriv=False) -> GreensSample:
    """Single-point evaluation through the configured backend."""
    if z0 <= 0:
        raise ValueError(f"z0 must be > 0, got {z0}")
    if backend == "SommerfeldHalfSpace":
        if material.omega_c == 0.0:
            vals, est = gzz_fresnel(z0, [omega], material)
            dvals, dest = gzz_fresnel(z0, [omega], material, deriv=True)
            return GreensSample(omega, complex(vals[0]), complex(dvals[0]), backend,
                                float(est[0] + dest[0]))
        v, e1 = gzz_gyro(z0, omega, material)
        d, e2 = gzz_gyro(z0, omega, material, deriv=True)
        return GreensSample(omega, v, d, backend, e1 + e2)
    if backend == "QuasistaticHalfSpace":
        v = complex(gzz_quasistatic(z0, omega, material))
        d = complex(gzz_quasistatic(z0, omega, material, deriv=True))
        return GreensSample(omega, v, d, backend, 0.0)
    raise ValueError(f"backend {backend!r} has no Green function")


def d_alpha_force_weight(z0, omega, material, backend, alpha="z", method="analytic"):
    """Real force-weight derivative d_alpha [gamma.G_I.gamma / 2i] per |gamma|^2.

    alpha = 'z' returns Im d_z g_zz (the real vertical branch); alpha = 'x'/'y'
    return Re d_alpha g_zz, nonzero only for nonreciprocal media (lateral
    output, disabled by default in force assembly). method = 'fd' evaluates
    half the centered z0-difference of g_zz, which equals the first-argument
    derivative for the scattered (z + z0)-dependent kernel.
    """
    if alpha == "z":
        if method == "analytic":
            return scattered_gzz(z0, omega, material, backend, deriv=True).g_zz.imag
        if method == "fd":
            h = 1e-5 * z0
            gp = scattered_gzz(z0 + h, omega, material, backend).g_zz.imag
            gm = scattered_gzz(z0 - h, omega, material, backend).g_zz.imag
            return 0.5 * (gp - gm) / (2 * h)
        raise ValueError(f"unknown method {method!r}")
    if alpha in ("x", "y"):
        if material.omega_c == 0.0:
            return 0.0  # odd integrand in k_alpha for a reciprocal half-space
        # first-argument in-plane derivative: integrand factor i k_alpha
        raise NotImplementedError("lateral weights require the gyrotropic 2-D path")
    raise ValueError(f"alpha must be x|y|z, got {alpha!r}")
