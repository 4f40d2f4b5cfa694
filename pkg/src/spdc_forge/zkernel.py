"""Closed-form transverse reductions for Gaussian pumps.

For a Gaussian pump all transverse-momentum integrals in the norm, purity,
fiber-overlap and heralding expressions are Gaussian and reduce analytically,
leaving only longitudinal integrals over the crystal:

* norm:      one 1-D integral of the profile autocorrelation,
* overlap:   one 1-D integral,
* marginal:  one 2-D integral,
* purity:    one 4-D integral, of which the z2 direction is integrated
             semi-analytically (the integrand is a rational function of z2
             with two simple poles; the poles near the contour are subtracted
             and restored through their residues and logarithms) and the
             remaining (z1, z3, z4) block by randomized quasi-Monte Carlo
             with scrambled Sobol points.

Plain tensor quadrature fails on the outer block: whenever a z2 pole crosses
the real segment as (z1, z3, z4) vary, the inner integral jumps by a residue
term, and those interior discontinuities destroy the convergence order of
smooth quadrature rules.  Randomized QMC is insensitive to them and provides
an empirical error estimate from the spread over independent scramblings.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .optics import OpticalConfig


def det4(cfg: OpticalConfig, w: float, z1, z2, z3, z4):
    """Determinant of the 4x4 covariance of the eight transverse integrals.

    The matrix couples the four longitudinal positions cyclically
    (signal: z1-z2 / z3-z4 chains, idler: z1-z4 / z3-z2 chains); its
    determinant expands to the closed form below and is exactly quadratic
    in each z variable.
    """
    al, be, kp = cfg.alpha, cfg.beta, cfg.k_p
    a = w * w / 2 - 1j * al * (z1 - z4)
    b = w * w / 2 - 1j * be * (z1 - z2)
    c = w * w / 2 - 1j * al * (z3 - z2)
    d = w * w / 2 - 1j * be * (z3 - z4)
    e = w * w / 4 + 1j * z1 / (2 * kp)
    f = w * w / 4 - 1j * z2 / (2 * kp)
    g = w * w / 4 + 1j * z3 / (2 * kp)
    h = w * w / 4 - 1j * z4 / (2 * kp)
    return (a * b * c * d - a * b * g ** 2 - a * d * f ** 2 - b * c * h ** 2
            - c * d * e ** 2 + e ** 2 * g ** 2 - 2 * e * f * g * h
            + f ** 2 * h ** 2)


def _z2_roots(cfg, w, Z1, Z3, Z4):
    """Quadratic coefficients of det4 in z2 and its two roots."""
    D0 = det4(cfg, w, Z1, 0.0, Z3, Z4)
    Dp = det4(cfg, w, Z1, 1.0, Z3, Z4)
    Dm = det4(cfg, w, Z1, -1.0, Z3, Z4)
    A0 = D0
    A2 = (Dp + Dm) / 2 - D0
    A1 = (Dp - Dm) / 2
    s = np.sqrt(A1 * A1 - 4 * A2 * A0)
    # pair the roots stably: q carries the larger magnitude
    q = -(A1 + np.where(np.real(np.conj(A1) * s) >= 0, s, -s)) / 2
    return A2, q / A2, A0 / q


def _inner_z2(cfg, chi, L, w, Z1, Z3, Z4, z2, wz2, chi_z2):
    """integral dz2 chi(z2)/det4 with pole subtraction near the contour."""
    h = L / 2
    A2, r1, r2 = _z2_roots(cfg, w, Z1, Z3, Z4)
    d12 = r1 - r2
    band = 0.25 * L
    near1 = (np.abs(r1.imag) < band) & (np.abs(r1.real) < h + band)
    near2 = (np.abs(r2.imag) < band) & (np.abs(r2.real) < h + band)
    safe = np.abs(d12) > 1e-9 * L
    near1 &= safe
    near2 &= safe
    # chi is evaluated at the complex roots only where the subtraction is
    # active; masked entries are fed a dummy argument and zeroed
    res1 = np.where(near1, chi(np.where(near1, r1, 0.0)) / (A2 * d12), 0.0)
    res2 = np.where(near2, -chi(np.where(near2, r2, 0.0)) / (A2 * d12), 0.0)
    I = res1 * np.log((h - r1) / (-h - r1)) + res2 * np.log((h - r2) / (-h - r2))
    for j in range(z2.size):
        zj = z2[j]
        Q = A2 * (zj - r1) * (zj - r2)
        I += wz2[j] * (chi_z2[j] / Q - res1 / (zj - r1) - res2 / (zj - r2))
    return I


def norm_reduced(cfg: OpticalConfig, chi, L: float, w: float,
                 n_tau: int = 800) -> float:
    """Reduced squared norm of the unnormalized state (prefactors dropped).

    Equals integral over tau of the profile autocorrelation against a
    Lorentzian in tau plus a delta contribution at tau = 0; the Lorentzian
    width is set by the pump focusing.
    """
    A = w * w * cfg.gamma_sum / 2
    c2 = 1.0 / (4 * cfg.k_p ** 2) - cfg.alpha * cfg.beta
    xt, wt = np.polynomial.legendre.leggauss(n_tau)

    def autocorr(tau):
        tau = abs(tau)
        half = (L - tau) / 2
        u = half * xt
        wu = half * wt
        return np.sum(wu * chi(u + tau / 2) * chi(u - tau / 2)).real

    taus = 0.5 * L * (xt + 1)
    wtau = 0.5 * L * wt
    Ct = np.array([autocorr(t) for t in taus])
    pv = float(np.sum(wtau * Ct * 2 * c2 / (c2 ** 2 * taus ** 2 + A ** 2)))
    return pv + (math.pi / A) * autocorr(0.0)


def state_norm(cfg: OpticalConfig, chi, L: float, w: float) -> float:
    """Squared norm of the unnormalized state including prefactors."""
    return (w * w / (2 * math.pi)) * math.pi ** 2 * norm_reduced(cfg, chi, L, w)


def purity_rqmc(cfg: OpticalConfig, chi, L: float, w: float,
                m: int = 16, n_inner: int = 64, n_replicas: int = 8,
                seed: int = 0) -> tuple[float, float]:
    """Purity of the reduced state for a Gaussian pump of waist w.

    Returns (purity, standard_error).  ``m`` is the log2 of the Sobol sample
    count per replica; the error estimate comes from the spread over
    ``n_replicas`` independently scrambled replicas.
    """
    h = L / 2
    x_in, w_in = np.polynomial.legendre.leggauss(n_inner)
    z2 = h * x_in
    wz2 = h * w_in
    chi_z2 = chi(z2)
    den = norm_reduced(cfg, chi, L, w)
    vals = []
    rng = np.random.default_rng(seed)
    for _ in range(n_replicas):
        eng = qmc.Sobol(d=3, scramble=True, seed=int(rng.integers(2 ** 32)))
        pts = eng.random(2 ** m) * L - h
        acc = 0.0 + 0.0j
        step = 65536
        for i in range(0, pts.shape[0], step):
            Z1 = pts[i:i + step, 0]
            Z3 = pts[i:i + step, 1]
            Z4 = pts[i:i + step, 2]
            F = (chi(Z1) * chi(Z3) * chi(Z4)
                 * _inner_z2(cfg, chi, L, w, Z1, Z3, Z4, z2, wz2, chi_z2))
            acc += F.sum()
        vals.append((L ** 3) * acc.real / pts.shape[0])
    vals = np.asarray(vals)
    P = float(vals.mean() / den ** 2)
    err = float(vals.std(ddof=1) / math.sqrt(n_replicas) / den ** 2)
    return P, err


def smf_overlap(cfg: OpticalConfig, chi, L: float, w_p: float,
                w_s: float, w_i: float, n_z: int = 400) -> float:
    """Pair-collection probability into Gaussian fiber modes (both arms)."""
    x, wt = np.polynomial.legendre.leggauss(n_z)
    z = 0.5 * L * x
    wz = 0.5 * L * wt
    mss = (w_p * w_p + w_s * w_s) / 4 - 1j * cfg.alpha * z
    mii = (w_p * w_p + w_i * w_i) / 4 - 1j * cfg.beta * z
    msi = w_p * w_p / 4 + 1j * z / (2 * cfg.k_p)
    det = mss * mii - msi ** 2
    num = (w_p * w_s * w_i / (2 * math.pi) ** 1.5) * math.pi ** 2 \
        * np.sum(wz * chi(z) / det)
    return float(abs(num) ** 2 / state_norm(cfg, chi, L, w_p))


def signal_marginal(cfg: OpticalConfig, chi, L: float, w_p: float,
                    w_s: float, n_z: int = 300) -> float:
    """Probability of the signal photon in the Gaussian mode, idler traced."""
    x, wt = np.polynomial.legendre.leggauss(n_z)
    z = 0.5 * L * x
    wz = 0.5 * L * wt
    cz = chi(z)
    Z1 = z[:, None]
    Z2 = z[None, :]
    mss = w_p * w_p / 4 + w_s * w_s / 4 - 1j * cfg.alpha * Z1
    mxx = w_p * w_p / 4 + w_s * w_s / 4 + 1j * cfg.alpha * Z2
    mii = w_p * w_p / 2 - 1j * cfg.beta * (Z1 - Z2)
    msi = w_p * w_p / 4 + 1j * Z1 / (2 * cfg.k_p)
    mxi = w_p * w_p / 4 - 1j * Z2 / (2 * cfg.k_p)
    det3 = mss * (mii * mxx - mxi ** 2) - msi * (msi * mxx)
    num = (w_p * w_p * w_s * w_s / (2 * math.pi) ** 2) * math.pi ** 3 \
        * np.einsum("i,j,ij->", wz * cz, wz * cz, 1.0 / det3)
    return float((num / state_norm(cfg, chi, L, w_p)).real)
