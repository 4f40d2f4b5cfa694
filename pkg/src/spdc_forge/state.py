"""The biphoton mode function and its truncated LG x LG decomposition.

The mode function is Phi(q_s, q_i) = V_p(q_s + q_i) phi(delta_kz(q_s, q_i))
up to global normalization.  ``decompose`` projects it onto a truncated
Laguerre-Gaussian product basis, resolving the azimuthal integrals through
the orbital-angular-momentum selection rule l_s + l_i = l_pump: with the
global azimuth integrated out analytically, each pump OAM component reduces
to a (rho_s, rho_i, psi) grid with psi = phi_i - phi_s handled by an FFT,
leaving smooth Gauss-Legendre radial quadratures.
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass

import numpy as np

from .optics import OpticalConfig, TransverseMomentum, delta_kz
from .profiles import Chi2Profile, profile_to_dict, profile_from_dict, residual_response
from .pump import PumpSpec, lg_radial, pump_amplitude


@dataclass(frozen=True)
class SubspaceBounds:
    """Truncation bounds: radial indices 0..max_radial, |OAM| <= max_oam."""

    max_radial: int
    max_oam: int

    def __post_init__(self):
        if self.max_radial < 0 or self.max_oam < 0:
            raise ValueError("bounds must be non-negative")

    @property
    def dim(self) -> int:
        return (self.max_radial + 1) * (2 * self.max_oam + 1)

    def index(self, p: int, l: int) -> int:
        if not (0 <= p <= self.max_radial and abs(l) <= self.max_oam):
            raise IndexError(f"mode ({p}, {l}) outside bounds")
        return p * (2 * self.max_oam + 1) + (l + self.max_oam)

    def mode_of(self, idx: int) -> tuple[int, int]:
        n = 2 * self.max_oam + 1
        return idx // n, idx % n - self.max_oam


class CoincidenceMatrix:
    """Complex amplitude matrix over truncated signal x idler LG pairs.

    ``data[a, b]`` is the amplitude of signal mode a and idler mode b in the
    dense index layout of ``SubspaceBounds.index``.  The matrix is normalized
    to unit Frobenius norm; ``captured_norm`` records the fraction of the
    full state norm captured by the truncated basis.
    """

    def __init__(self, data: np.ndarray, bounds: SubspaceBounds,
                 w_s_um: float, w_i_um: float, captured_norm: float):
        data = np.asarray(data, dtype=complex)
        if data.shape != (bounds.dim, bounds.dim):
            raise ValueError("data shape does not match bounds")
        if not (0 < captured_norm <= 1 + 1e-9):
            raise ValueError("captured_norm must lie in (0, 1]")
        fro = np.linalg.norm(data)
        if fro == 0:
            raise ValueError("empty coincidence matrix")
        self.data = data / fro
        self.bounds = bounds
        self.w_s_um = float(w_s_um)
        self.w_i_um = float(w_i_um)
        self.captured_norm = float(min(captured_norm, 1.0))

    def entry(self, p_s: int, l_s: int, p_i: int, l_i: int) -> complex:
        return complex(self.data[self.bounds.index(p_s, l_s),
                                 self.bounds.index(p_i, l_i)])

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.data, compute_uv=False)

    def to_json(self) -> str:
        return json.dumps({
            "max_radial": self.bounds.max_radial,
            "max_oam": self.bounds.max_oam,
            "w_s_um": self.w_s_um,
            "w_i_um": self.w_i_um,
            "captured_norm": self.captured_norm,
            "layout": "signal-major, index = p*(2*max_oam+1) + (l+max_oam)",
            "data_b64": base64.b64encode(
                np.ascontiguousarray(self.data).tobytes()).decode("ascii"),
        }, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "CoincidenceMatrix":
        d = json.loads(s)
        bounds = SubspaceBounds(d["max_radial"], d["max_oam"])
        raw = base64.b64decode(d["data_b64"])
        data = np.frombuffer(raw, dtype=complex).reshape(bounds.dim, bounds.dim)
        return cls(data.copy(), bounds, d["w_s_um"], d["w_i_um"],
                   d["captured_norm"])


def mode_function_value(cfg: OpticalConfig, pump: PumpSpec, profile: Chi2Profile,
                        q_s: TransverseMomentum, q_i: TransverseMomentum) -> complex:
    """Phi(q_s, q_i) up to global normalization."""
    sx = q_s.x + q_i.x
    sy = q_s.y + q_i.y
    q_sum = TransverseMomentum(math.hypot(sx, sy), math.atan2(sy, sx))
    response = residual_response(profile, cfg.L_um)
    return pump_amplitude(pump, q_sum) * complex(response(delta_kz(cfg, q_s, q_i)))


def _polar_grid(w_s, w_i, n_radial, n_azimuthal, radial_extent):
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    R_s = radial_extent / w_s
    R_i = radial_extent / w_i
    rs = R_s * (x + 1) / 2
    wrs = R_s * wx / 2
    ri = R_i * (x + 1) / 2
    wri = R_i * wx / 2
    psi = 2 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    return rs, wrs, ri, wri, psi


def decompose(cfg: OpticalConfig, pump: PumpSpec, profile: Chi2Profile,
              bounds: SubspaceBounds, w_s_um: float, w_i_um: float,
              n_radial: int = 240, n_azimuthal: int = 256,
              radial_extent: float = 13.0) -> CoincidenceMatrix:
    """Project the mode function onto the truncated LG x LG basis.

    ``radial_extent`` sets the radial cutoff in units of 1/waist for each
    arm; 13 puts the Gaussian weight at the cutoff below 1e-18.
    """
    if bounds.dim > 10_000:
        raise ValueError("subspace too large")
    H, U = bounds.max_radial, bounds.max_oam
    rs, wrs, ri, wri, psi = _polar_grid(w_s_um, w_i_um, n_radial,
                                        n_azimuthal, radial_extent)
    RS = rs[:, None, None]
    RI = ri[None, :, None]
    cpsi = np.cos(psi)[None, None, :]
    SX = RS + RI * cpsi
    SY = RI * np.sin(psi)[None, None, :]
    Smag = np.sqrt(SX * SX + SY * SY)
    expg = np.exp(1j * np.arctan2(SY, SX))
    dk = cfg.alpha * RS ** 2 + cfg.beta * RI ** 2 - RS * RI * cpsi / cfg.k_p
    response = residual_response(profile, cfg.L_um)
    PM = np.asarray(response(dk))

    # radial basis tables, weighted by the radial quadrature measure
    Bs = {(p, al): lg_radial(p, al, w_s_um, rs) * wrs * rs
          for p in range(H + 1) for al in range(U + 1)}
    Bi = {(p, al): lg_radial(p, al, w_i_um, ri) * wri * ri
          for p in range(H + 1) for al in range(U + 1)}

    # group pump modes by OAM; each group shares one angular kernel
    groups: dict[int, list] = {}
    for p, l, a in pump.modes:
        groups.setdefault(l, []).append((p, a))

    C = np.zeros((bounds.dim, bounds.dim), dtype=complex)
    norm_total = 0.0
    dpsi = 2 * np.pi / n_azimuthal
    wgt = np.einsum("i,j->ij", wrs * rs, wri * ri)
    for l_pump, plist in sorted(groups.items()):
        V = sum(a * lg_radial(p, l_pump, pump.waist_um, Smag) for p, a in plist)
        G = V * expg ** l_pump * PM
        norm_total += 2 * np.pi * dpsi * float(
            np.einsum("ij,ijk->", wgt, np.abs(G) ** 2))
        Gh = np.fft.fft(G, axis=2) * dpsi
        for l_i in range(-U, U + 1):
            l_s = l_pump - l_i
            if abs(l_s) > U:
                continue
            Bsm = np.array([Bs[(q, abs(l_s))] for q in range(H + 1)])
            Bim = np.array([Bi[(q, abs(l_i))] for q in range(H + 1)])
            blk = 2 * np.pi * (Bsm @ Gh[:, :, l_i % n_azimuthal] @ Bim.T)
            for q_s in range(H + 1):
                C[bounds.index(q_s, l_s),
                  bounds.index(0, l_i):bounds.index(H, l_i) + 1:2 * U + 1] = blk[q_s]
    captured_raw = float((np.abs(C) ** 2).sum())
    if captured_raw == 0 or norm_total == 0:
        raise ValueError("decomposition captured no amplitude")
    return CoincidenceMatrix(C, bounds, w_s_um, w_i_um,
                             captured_norm=captured_raw / norm_total)


def reduced_density(matrix: CoincidenceMatrix) -> np.ndarray:
    """Reduced idler density matrix, obtained by tracing out the signal."""
    C = matrix.data
    rho = C.conj().T @ C
    return rho / np.trace(rho).real
