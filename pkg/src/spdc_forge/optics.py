"""Physical constants, dispersion, wave numbers and the transverse phase mismatch.

All lengths are micrometres internally and all transverse momenta are
rad/µm, so products like ``delta_kz * z`` and the focusing parameter
``xi = L / (k w**2)`` stay near unity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


# --- dispersion models -------------------------------------------------------

def _ktp_ny(lam_um: float) -> float:
    """KTP n_y Sellmeier (Koenig & Wong, Appl. Phys. Lett. 84, 1644 (2004))."""
    l2 = lam_um * lam_um
    return math.sqrt(2.09930 + 0.922683 / (1 - 0.0467695 / l2) - 0.0138408 * l2)


def _ktp_nz(lam_um: float) -> float:
    """KTP n_z Sellmeier (Fradkin et al., Appl. Phys. Lett. 74, 914 (1999))."""
    l2 = lam_um * lam_um
    return math.sqrt(
        2.12725
        + 1.18431 / (1 - 5.14852e-2 / l2)
        + 0.6603 / (1 - 100.00507 / l2)
        - 9.68956e-3 * l2
    )


# Each model maps a beam role to an index function of wavelength (µm).
# "ktp-typeII": y-polarised pump and signal, z-polarised idler.
_DISPERSION_MODELS = {
    "ktp-typeII": {
        "pump": _ktp_ny,
        "signal": _ktp_ny,
        "idler": _ktp_nz,
        "valid_um": (0.4, 3.5),
    },
    "unit": {
        "pump": lambda lam: 1.0,
        "signal": lambda lam: 1.0,
        "idler": lambda lam: 1.0,
        "valid_um": (0.0, math.inf),
    },
}


def dispersion_models() -> tuple[str, ...]:
    """Names of the available dispersion models."""
    return tuple(_DISPERSION_MODELS)


# --- domain types -------------------------------------------------------------

@dataclass(frozen=True)
class TransverseMomentum:
    """Transverse momentum in cylindrical coordinates (rho in rad/µm)."""

    rho: float
    phi: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        object.__setattr__(self, "phi", self.phi % (2 * math.pi))

    @property
    def x(self) -> float:
        return self.rho * math.cos(self.phi)

    @property
    def y(self) -> float:
        return self.rho * math.sin(self.phi)


@dataclass(frozen=True)
class BeamParameter:
    """Dimensionless focusing parameter xi = L / (k w**2)."""

    xi: float

    def __post_init__(self):
        if self.xi <= 0:
            raise ValueError("xi must be positive")


@dataclass(frozen=True)
class OpticalConfig:
    """Wavelengths (nm), refractive indices, crystal length (µm) and wave numbers.

    Wave numbers ``k_p``, ``k_s``, ``k_i`` are in rad/µm with
    ``k = 2 pi n / lambda``.
    """

    lambda_p_nm: float
    lambda_s_nm: float
    lambda_i_nm: float
    n_p: float
    n_s: float
    n_i: float
    L_um: float
    dispersion: str = "ktp-typeII"

    def __post_init__(self):
        for name in ("lambda_p_nm", "lambda_s_nm", "lambda_i_nm",
                     "n_p", "n_s", "n_i", "L_um"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        lhs = 1.0 / self.lambda_p_nm
        rhs = 1.0 / self.lambda_s_nm + 1.0 / self.lambda_i_nm
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise ValueError("wavelengths violate energy conservation")

    @property
    def k_p(self) -> float:
        return 2 * math.pi * self.n_p / (self.lambda_p_nm * 1e-3)

    @property
    def k_s(self) -> float:
        return 2 * math.pi * self.n_s / (self.lambda_s_nm * 1e-3)

    @property
    def k_i(self) -> float:
        return 2 * math.pi * self.n_i / (self.lambda_i_nm * 1e-3)

    # Coefficients of the paraxial phase mismatch, used throughout the
    # Gaussian-reduction formulas: delta_kz = alpha rho_s^2 + beta rho_i^2
    # - rho_s rho_i cos(phi_i - phi_s) / k_p.
    @property
    def alpha(self) -> float:
        return (self.k_p - self.k_s) / (2 * self.k_p * self.k_s)

    @property
    def beta(self) -> float:
        return (self.k_p - self.k_i) / (2 * self.k_p * self.k_i)

    @property
    def gamma_sum(self) -> float:
        return self.alpha + self.beta + 1.0 / self.k_p

    def is_degenerate(self, rtol: float = 1e-6) -> bool:
        """True when k_s = k_i = k_p / 2 within rtol."""
        return (abs(self.k_s - self.k_i) <= rtol * self.k_p
                and abs(self.k_s + self.k_i - self.k_p) <= rtol * self.k_p)


# --- operations ----------------------------------------------------------------

def make_config(lambda_p_nm: float, lambda_s_nm: float, crystal_length_mm: float,
                dispersion: str = "ktp-typeII") -> OpticalConfig:
    """Build an OpticalConfig; the idler wavelength follows from energy conservation."""
    if lambda_s_nm <= lambda_p_nm:
        raise ValueError("signal wavelength must exceed the pump wavelength")
    if crystal_length_mm <= 0:
        raise ValueError("crystal length must be positive")
    try:
        model = _DISPERSION_MODELS[dispersion]
    except KeyError:
        raise ValueError(f"unknown dispersion model {dispersion!r}; "
                         f"available: {sorted(_DISPERSION_MODELS)}") from None
    lambda_i_nm = 1.0 / (1.0 / lambda_p_nm - 1.0 / lambda_s_nm)
    lo, hi = model["valid_um"]
    for lam_nm in (lambda_p_nm, lambda_s_nm, lambda_i_nm):
        lam_um = lam_nm * 1e-3
        if not (lo <= lam_um <= hi):
            raise ValueError(f"wavelength {lam_nm} nm outside validity range of "
                             f"{dispersion!r} ({lo}-{hi} µm)")
    return OpticalConfig(
        lambda_p_nm=lambda_p_nm,
        lambda_s_nm=lambda_s_nm,
        lambda_i_nm=lambda_i_nm,
        n_p=model["pump"](lambda_p_nm * 1e-3),
        n_s=model["signal"](lambda_s_nm * 1e-3),
        n_i=model["idler"](lambda_i_nm * 1e-3),
        L_um=crystal_length_mm * 1e3,
        dispersion=dispersion,
    )


def config_from_dict(d: dict) -> OpticalConfig:
    return make_config(
        lambda_p_nm=float(d["lambda_p_nm"]),
        lambda_s_nm=float(d["lambda_s_nm"]),
        crystal_length_mm=float(d["crystal_length_mm"]),
        dispersion=d.get("dispersion", "ktp-typeII"),
    )


def config_to_dict(cfg: OpticalConfig) -> dict:
    return {
        "lambda_p_nm": cfg.lambda_p_nm,
        "lambda_s_nm": cfg.lambda_s_nm,
        "crystal_length_mm": cfg.L_um * 1e-3,
        "dispersion": cfg.dispersion,
    }


def load_config(path) -> OpticalConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def delta_kz(cfg: OpticalConfig, q_s: TransverseMomentum,
             q_i: TransverseMomentum) -> float:
    """Longitudinal phase mismatch (rad/µm) for transverse momenta q_s, q_i."""
    return (cfg.alpha * q_s.rho ** 2
            + cfg.beta * q_i.rho ** 2
            - q_s.rho * q_i.rho * math.cos(q_i.phi - q_s.phi) / cfg.k_p)


def xi_from_waist(cfg: OpticalConfig, w_um: float, k: float) -> BeamParameter:
    """Focusing parameter xi = L / (k w**2) for waist w at wave number k."""
    if w_um <= 0:
        raise ValueError("waist must be positive")
    return BeamParameter(cfg.L_um / (k * w_um * w_um))


def waist_from_xi(cfg: OpticalConfig, xi, k: float) -> float:
    """Waist (µm) realizing the focusing parameter xi at wave number k."""
    x = xi.xi if isinstance(xi, BeamParameter) else float(xi)
    if x <= 0:
        raise ValueError("xi must be positive")
    return math.sqrt(cfg.L_um / (k * x))
