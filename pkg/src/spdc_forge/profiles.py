"""Longitudinal nonlinearity profiles chi2(z) and their phase-matching amplitudes.

Four profile variants are supported: a constant response, a Gaussian
apodization, a truncated cosine series, and a physical sequence of
oppositely poled domains.  The phase-matching amplitude is

    phi(dk) = integral_{-L/2}^{L/2} chi2(z) exp(i dk z) dz

evaluated in closed form for every variant.  The sinc convention is
unnormalized: sinc(x) = sin(x)/x.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import wofz


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1. Accepts arrays."""
    return np.sinc(np.asarray(x) / np.pi)


# --- profile variants ----------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """chi2(z) = 1 on the whole crystal."""


@dataclass(frozen=True)
class GaussianApodized:
    """chi2(z) = exp(-z**2 / sigma**2), truncated at the crystal faces."""

    sigma_um: float

    def __post_init__(self):
        if self.sigma_um <= 0:
            raise ValueError("sigma must be positive")


MAX_COSINE_ORDER = 32


@dataclass(frozen=True)
class CosineSeries:
    """chi2(z) = sum_n c_n cos(n z / sigma)."""

    coeffs: tuple
    sigma_um: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) == 0 or len(c) - 1 > MAX_COSINE_ORDER:
            raise ValueError(f"series order must be 0..{MAX_COSINE_ORDER}")
        if not all(math.isfinite(v) for v in c):
            raise ValueError("coefficients must be finite")
        if self.sigma_um <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class DomainSequence:
    """M poled domains of length l_c with orientations signs in {-1, +1}.

    ``band_limit`` (rad/µm), when set, restricts the first-order response
    used by the metrics pipeline to residual detunings |dk| <= band_limit;
    see ``residual_response``.
    """

    signs: tuple
    l_c_um: float
    band_limit: float | None = None

    def __post_init__(self):
        s = tuple(int(v) for v in self.signs)
        object.__setattr__(self, "signs", s)
        if len(s) < 1 or any(v not in (-1, 1) for v in s):
            raise ValueError("signs must be a non-empty sequence of +/-1")
        if self.l_c_um <= 0:
            raise ValueError("domain length must be positive")
        if self.band_limit is not None and self.band_limit <= 0:
            raise ValueError("band_limit must be positive")

    @property
    def n_domains(self) -> int:
        return len(self.signs)

    @property
    def length_um(self) -> float:
        return self.n_domains * self.l_c_um

    @property
    def qpm_detuning(self) -> float:
        """First-order quasi-phase-matching detuning pi / l_c (rad/µm)."""
        return math.pi / self.l_c_um

    def domain_centers(self) -> np.ndarray:
        m = np.arange(1, self.n_domains + 1)
        return (m - 0.5) * self.l_c_um - self.length_um / 2


Chi2Profile = Constant | GaussianApodized | CosineSeries | DomainSequence


def _check_length(profile, L_um: float) -> None:
    if isinstance(profile, DomainSequence):
        if abs(profile.length_um - L_um) > 1e-9 * L_um:
            raise ValueError("domain sequence length does not match crystal length")


# --- pointwise evaluation --------------------------------------------------------

def evaluate_chi2(profile: Chi2Profile, z, L_um: float):
    """Profile value at position(s) z inside the crystal (|z| <= L/2)."""
    _check_length(profile, L_um)
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > L_um / 2 * (1 + 1e-12)):
        raise ValueError("z outside the crystal")
    if isinstance(profile, Constant):
        out = np.ones_like(z)
    elif isinstance(profile, GaussianApodized):
        out = np.exp(-(z / profile.sigma_um) ** 2)
    elif isinstance(profile, CosineSeries):
        out = sum(c * np.cos(n * z / profile.sigma_um)
                  for n, c in enumerate(profile.coeffs))
        out = np.asarray(out, dtype=float)
    elif isinstance(profile, DomainSequence):
        idx = np.clip(((z + L_um / 2) / profile.l_c_um).astype(int),
                      0, profile.n_domains - 1)
        out = np.asarray(profile.signs, dtype=float)[idx]
    else:
        raise TypeError(f"unsupported profile {type(profile).__name__}")
    return out if out.shape else float(out)


def chi_callable(profile: Chi2Profile, L_um: float):
    """The profile as a callable accepting complex arguments, or None.

    The four-fold longitudinal reduction of the purity integral needs the
    profile continued off the real axis; that only makes sense for the smooth
    variants, so DomainSequence returns None.
    """
    if isinstance(profile, Constant):
        return lambda z: np.ones_like(np.asarray(z, dtype=complex))
    if isinstance(profile, GaussianApodized):
        s = profile.sigma_um
        return lambda z: np.exp(-(np.asarray(z, dtype=complex) / s) ** 2)
    if isinstance(profile, CosineSeries):
        c = np.asarray(profile.coeffs)
        s = profile.sigma_um

        def chi(z):
            z = np.asarray(z, dtype=complex)
            return sum(ci * np.cos(n * z / s) for n, ci in enumerate(c))

        return chi
    return None


# --- phase matching --------------------------------------------------------------

def phase_matching(profile: Chi2Profile, dkz, L_um: float):
    """Phase-matching amplitude phi(dk) (µm), vectorized over dkz."""
    _check_length(profile, L_um)
    dk = np.asarray(dkz, dtype=float)
    scalar = dk.ndim == 0
    dk = np.atleast_1d(dk)
    h = L_um / 2
    if isinstance(profile, Constant):
        out = (L_um * sinc(L_um * dk / 2)).astype(complex)
    elif isinstance(profile, CosineSeries):
        # each cosine term integrates to a pair of shifted sinc lobes
        s = profile.sigma_um
        acc = np.zeros_like(dk)
        for n, c in enumerate(profile.coeffs):
            a = n / s
            acc = acc + c * (sinc((dk - a) * h) + sinc((dk + a) * h))
        out = (h * acc).astype(complex)
    elif isinstance(profile, DomainSequence):
        z_m = profile.domain_centers()
        s = np.asarray(profile.signs, dtype=float)
        env = profile.l_c_um * sinc(dk * profile.l_c_um / 2)
        flat = dk.ravel()
        acc = np.empty(flat.size, dtype=complex)
        step = max(1, 20_000_000 // max(1, z_m.size))  # cap the outer product
        for i in range(0, flat.size, step):
            acc[i:i + step] = np.exp(1j * np.outer(flat[i:i + step], z_m)) @ s
        out = env * acc.reshape(dk.shape)
    elif isinstance(profile, GaussianApodized):
        # Gaussian truncated at the faces.  The error-function closed form
        # exp(-a^2) * (erf(x - i a) + erf(x + i a)) with x = h/s, a = s dk/2
        # is rewritten via the Faddeeva function w so that every factor stays
        # bounded at large detuning:
        #   exp(-a^2) erfc(x +/- i a) = exp(-x^2 -/+ 2 i a x) w(i x -/+ a)
        s = profile.sigma_um
        a = s * dk / 2
        x = h / s
        face = math.exp(-x * x)
        out = (s * math.sqrt(math.pi) / 2) * (
            2 * np.exp(-a * a)
            - face * (np.exp(2j * a * x) * wofz(1j * x + a)
                      + np.exp(-2j * a * x) * wofz(1j * x - a)))
    else:
        raise TypeError(f"unsupported profile {type(profile).__name__}")
    return complex(out[0]) if scalar else out


def residual_response(profile: Chi2Profile, L_um: float):
    """Vectorized phi as a function of the residual phase mismatch.

    For the smooth variants this is ``phase_matching`` itself.  A domain
    sequence compensates the bulk mismatch at first quasi-phase-matching
    order, so its response to the residual mismatch dk lives at total
    detuning dk + pi/l_c; consistent with treating periodic poling as an
    effective constant nonlinearity, the metrics pipeline keeps only the
    first-order band (|dk| <= band_limit when set), discarding the broadband
    conversion floor that a binary grating exhibits at large detunings.
    """
    _check_length(profile, L_um)
    if isinstance(profile, DomainSequence):
        d0 = profile.qpm_detuning
        bl = profile.band_limit

        def response(dk):
            dk = np.asarray(dk, dtype=float)
            flat = np.atleast_1d(dk).ravel()
            if bl is None:
                out = np.asarray(phase_matching(profile, flat + d0, L_um))
            else:
                # only in-band points need the exact (expensive) domain sum
                out = np.zeros(flat.size, dtype=complex)
                mask = np.abs(flat) <= bl
                if mask.any():
                    out[mask] = phase_matching(profile, flat[mask] + d0, L_um)
            return out.reshape(dk.shape) if dk.shape else complex(out[0])

        return response

    def response(dk):
        return phase_matching(profile, dk, L_um)

    return response


# --- curves ----------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseMatchCurve:
    """phi sampled on a strictly increasing detuning grid."""

    dkz: np.ndarray
    amplitude: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        dk = np.asarray(self.dkz, dtype=float)
        amp = np.asarray(self.amplitude, dtype=complex)
        if dk.size == 0:
            raise ValueError("empty grid")
        if dk.size > 1 and not np.all(np.diff(dk) > 0):
            raise ValueError("grid must be strictly increasing")
        if amp.shape != dk.shape:
            raise ValueError("grid/amplitude shape mismatch")
        object.__setattr__(self, "dkz", dk)
        object.__setattr__(self, "amplitude", amp)


def phase_matching_curve(profile: Chi2Profile, dkz_grid, L_um: float,
                         normalize: bool = False) -> PhaseMatchCurve:
    """Sample phi on a grid, optionally max-|phi|-normalized for plotting."""
    amp = phase_matching(profile, np.asarray(dkz_grid, dtype=float), L_um)
    amp = np.atleast_1d(amp)
    if normalize:
        peak = np.abs(amp).max()
        if peak > 0:
            amp = amp / peak
    return PhaseMatchCurve(np.atleast_1d(np.asarray(dkz_grid, dtype=float)),
                           amp, normalized=normalize)


def curve_to_csv(curve: PhaseMatchCurve) -> str:
    buf = io.StringIO()
    buf.write("dkz,re,im,abs\n")
    for d, a in zip(curve.dkz, curve.amplitude):
        buf.write(f"{d:.12e},{a.real:.12e},{a.imag:.12e},{abs(a):.12e}\n")
    return buf.getvalue()


# --- serialization ----------------------------------------------------------------

def profile_to_dict(profile: Chi2Profile) -> dict:
    if isinstance(profile, Constant):
        return {"variant": "constant"}
    if isinstance(profile, GaussianApodized):
        return {"variant": "gaussian", "sigma_um": profile.sigma_um}
    if isinstance(profile, CosineSeries):
        return {"variant": "cosine", "coeffs": list(profile.coeffs),
                "sigma_um": profile.sigma_um}
    if isinstance(profile, DomainSequence):
        d = {"variant": "domains", "l_c_um": profile.l_c_um,
             "signs": [int(s) for s in profile.signs]}
        if profile.band_limit is not None:
            d["band_limit"] = profile.band_limit
        return d
    raise TypeError(f"unsupported profile {type(profile).__name__}")


def profile_from_dict(d: dict) -> Chi2Profile:
    v = d["variant"]
    if v == "constant":
        return Constant()
    if v == "gaussian":
        return GaussianApodized(sigma_um=float(d["sigma_um"]))
    if v == "cosine":
        return CosineSeries(coeffs=tuple(d["coeffs"]), sigma_um=float(d["sigma_um"]))
    if v == "domains":
        return DomainSequence(signs=tuple(d["signs"]), l_c_um=float(d["l_c_um"]),
                              band_limit=d.get("band_limit"))
    raise ValueError(f"unknown profile variant {v!r}")


def profile_to_json(profile: Chi2Profile) -> str:
    return json.dumps(profile_to_dict(profile), sort_keys=True)


def profile_from_json(s: str) -> Chi2Profile:
    return profile_from_dict(json.loads(s))
