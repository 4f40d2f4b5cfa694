"""Transverse-momentum-space pump amplitudes and the Gaussian collection mode.

All mode functions are L2-normalized over the transverse plane,
integral |V|^2 d^2q = 1.  The Laguerre-Gaussian radial profile uses the
waist parameter of the corresponding position-space mode at focus, so the
(p=0, l=0) mode coincides with the plain Gaussian beam.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .optics import TransverseMomentum


def lg_radial(p: int, l: int, w_um: float, rho):
    """Radial factor of the momentum-space LG mode (vectorized in rho)."""
    rho = np.asarray(rho, dtype=float)
    t = w_um * w_um * rho * rho / 2
    pref = (w_um / math.sqrt(2 * math.pi)) * math.exp(
        0.5 * (gammaln(p + 1) - gammaln(p + abs(l) + 1)))
    return pref * t ** (abs(l) / 2) * eval_genlaguerre(p, abs(l), t) * np.exp(-t / 2)


def gaussian_amplitude(w_um: float, q: TransverseMomentum) -> complex:
    """Fundamental Gaussian pump amplitude V(q) = (w/sqrt(2 pi)) exp(-w^2 |q|^2 / 4)."""
    if w_um <= 0:
        raise ValueError("waist must be positive")
    return complex((w_um / math.sqrt(2 * math.pi))
                   * math.exp(-w_um * w_um * q.rho * q.rho / 4))


def lg_amplitude(p: int, l: int, w_um: float, q: TransverseMomentum) -> complex:
    """Momentum-space Laguerre-Gaussian mode LG_p^l at q."""
    if p < 0:
        raise ValueError("radial index must be non-negative")
    if w_um <= 0:
        raise ValueError("waist must be positive")
    return complex(lg_radial(p, l, w_um, q.rho)) * np.exp(1j * l * q.phi)


@dataclass(frozen=True)
class PumpSpec:
    """Pump waist plus a normalized LG coefficient superposition."""

    waist_um: float
    modes: tuple = ((0, 0, 1.0 + 0j),)

    def __post_init__(self):
        if self.waist_um <= 0:
            raise ValueError("waist must be positive")
        modes = tuple((int(p), int(l), complex(a)) for p, l, a in self.modes)
        if len(modes) == 0:
            raise ValueError("at least one pump mode is required")
        if any(p < 0 for p, _, _ in modes):
            raise ValueError("radial indices must be non-negative")
        if len({(p, l) for p, l, _ in modes}) != len(modes):
            raise ValueError("duplicate pump mode indices")
        norm = sum(abs(a) ** 2 for _, _, a in modes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError("pump coefficients must be normalized")
        object.__setattr__(self, "modes", modes)

    @property
    def is_gaussian(self) -> bool:
        return (len(self.modes) == 1 and self.modes[0][0] == 0
                and self.modes[0][1] == 0)

    def oam_values(self) -> tuple:
        return tuple(sorted({l for _, l, _ in self.modes}))


def gaussian_pump(waist_um: float) -> PumpSpec:
    return PumpSpec(waist_um=waist_um)


def pump_amplitude(spec: PumpSpec, q: TransverseMomentum) -> complex:
    """Coefficient-weighted superposition of LG modes at q."""
    return sum(a * lg_amplitude(p, l, spec.waist_um, q) for p, l, a in spec.modes)


@dataclass(frozen=True)
class CollectionMode:
    """Gaussian single-mode-fiber collection mode."""

    waist_um: float

    def __post_init__(self):
        if self.waist_um <= 0:
            raise ValueError("waist must be positive")


# --- serialization ----------------------------------------------------------------

def pump_to_dict(spec: PumpSpec) -> dict:
    return {
        "waist_um": spec.waist_um,
        "modes": [{"p": p, "l": l, "re": a.real, "im": a.imag}
                  for p, l, a in spec.modes],
    }


def pump_from_dict(d: dict) -> PumpSpec:
    modes = tuple((m["p"], m["l"], complex(m["re"], m.get("im", 0.0)))
                  for m in d.get("modes", [{"p": 0, "l": 0, "re": 1.0}]))
    return PumpSpec(waist_um=float(d["waist_um"]), modes=modes)


def pump_to_json(spec: PumpSpec) -> str:
    return json.dumps(pump_to_dict(spec), sort_keys=True)


def pump_from_json(s: str) -> PumpSpec:
    return pump_from_dict(json.loads(s))
