import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import spdc_forge as sf
from spdc_forge.profiles import (chi_callable, curve_to_csv, evaluate_chi2,
                                 phase_matching, phase_matching_curve,
                                 profile_from_json, profile_to_json,
                                 residual_response, sinc)

L = 1.0e4  # µm


def quad_oracle(profile, dkz, L_um, n=600):
    """Reference integral of chi(z) exp(i dk z) by dense Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(n)
    z = 0.5 * L_um * x
    wz = 0.5 * L_um * w
    chi = evaluate_chi2(profile, z, L_um)
    dkz = np.atleast_1d(np.asarray(dkz, dtype=float))
    return np.array([np.sum(wz * chi * np.exp(1j * dk * z)) for dk in dkz])


def test_sinc_helper():
    assert sinc(0.0) == 1.0
    assert sinc(np.pi) == pytest.approx(0.0, abs=1e-15)
    x = np.linspace(-5, 5, 11)
    assert np.allclose(sinc(x), np.sinc(x / np.pi))


def test_constant_profile_closed_form():
    dk = np.linspace(-4e-3, 4e-3, 41)
    phi = phase_matching(sf.Constant(), dk, L)
    assert np.allclose(phi, L * sinc(L * dk / 2), rtol=1e-12)
    assert phi[len(dk) // 2] == pytest.approx(L)
    assert np.allclose(phi, quad_oracle(sf.Constant(), dk, L), rtol=1e-9)


def test_gaussian_profile_matches_quadrature():
    prof = sf.GaussianApodized(sigma_um=L / 4)
    dk = np.linspace(-4e-3, 4e-3, 17)
    phi = np.asarray(phase_matching(prof, dk, L))
    assert np.allclose(phi, quad_oracle(prof, dk, L), rtol=1e-8, atol=1e-6)


def test_cosine_profile_matches_quadrature():
    prof = sf.CosineSeries(coeffs=sf.COSINE_COEFFS_ORDER7, sigma_um=L / 4)
    dk = np.linspace(-4e-3, 4e-3, 17)
    phi = np.asarray(phase_matching(prof, dk, L))
    assert np.allclose(phi, quad_oracle(prof, dk, L), rtol=1e-8, atol=1e-6)


@given(coeffs=st.lists(st.floats(-1, 1), min_size=1, max_size=6),
       dk_scaled=st.floats(-40, 40))
@settings(max_examples=40, deadline=None)
def test_cosine_closed_form_property(coeffs, dk_scaled):
    if not any(abs(c) > 1e-3 for c in coeffs):
        coeffs = list(coeffs) + [1.0]
    prof = sf.CosineSeries(coeffs=tuple(coeffs), sigma_um=L / 4)
    dk = dk_scaled / L
    phi = complex(np.asarray(phase_matching(prof, dk, L)).ravel()[0])
    ref = complex(quad_oracle(prof, dk, L)[0])
    assert phi == pytest.approx(ref, abs=1e-6 * L)


def test_cosine_general_width_falls_back_to_quadrature():
    prof = sf.CosineSeries(coeffs=(1.0, -0.3), sigma_um=0.31 * L)
    dk = np.array([0.0, 1.1e-3, -2.3e-3])
    phi = np.asarray(phase_matching(prof, dk, L))
    assert np.allclose(phi, quad_oracle(prof, dk, L), rtol=1e-7, atol=1e-5)


def domain_oracle(prof, dkz, L_um):
    """Per-domain quadrature of the piecewise-constant modulation."""
    centers = prof.domain_centers()
    half = prof.l_c_um / 2
    x, w = np.polynomial.legendre.leggauss(12)
    out = []
    for dk in np.atleast_1d(dkz):
        acc = 0.0 + 0.0j
        for s, zc in zip(prof.signs, centers):
            z = zc + half * x
            acc += s * half * np.sum(w * np.exp(1j * dk * z))
        out.append(acc)
    return np.array(out)


def test_domain_sequence_exact_sum():
    rng = np.random.default_rng(3)
    signs = tuple(int(s) for s in rng.choice([-1, 1], size=40))
    prof = sf.DomainSequence(signs=signs, l_c_um=23.0)
    assert prof.n_domains == 40
    assert prof.length_um == pytest.approx(40 * 23.0)
    assert prof.qpm_detuning == pytest.approx(np.pi / 23.0)
    dk = np.linspace(-0.2, 0.2, 21)
    phi = np.asarray(phase_matching(prof, dk, prof.length_um))
    assert np.allclose(phi, domain_oracle(prof, dk, prof.length_um),
                       rtol=1e-9, atol=1e-9)


def test_domain_sequence_sign_flip_invariance():
    signs = tuple([1, -1] * 30)
    a = sf.DomainSequence(signs=signs, l_c_um=23.0)
    b = sf.DomainSequence(signs=tuple(-s for s in signs), l_c_um=23.0)
    dk = np.linspace(0.0, 0.3, 31)
    pa = np.abs(phase_matching(a, dk, a.length_um))
    pb = np.abs(phase_matching(b, dk, b.length_um))
    assert np.allclose(pa, pb, rtol=1e-12)


def test_periodic_domains_peak_at_qpm_detuning():
    prof = sf.DomainSequence(signs=tuple([1, -1] * 200), l_c_um=23.0)
    d0 = prof.qpm_detuning
    dk = np.linspace(0.5 * d0, 1.5 * d0, 401)
    amp = np.abs(phase_matching(prof, dk, prof.length_um))
    peak = dk[np.argmax(amp)]
    assert peak == pytest.approx(d0, rel=5e-3)
    # first QPM order carries amplitude (2 / pi) * L at the peak
    assert amp.max() == pytest.approx(2 / np.pi * prof.length_um, rel=1e-2)


def test_residual_response_smooth_equals_phase_matching(gaussian_profile, cfg):
    dk = np.linspace(-3e-3, 3e-3, 11)
    resp = residual_response(gaussian_profile, cfg.L_um)
    assert np.allclose(resp(dk), phase_matching(gaussian_profile, dk, cfg.L_um))


def test_residual_response_domain_band_limit():
    signs = tuple([1, -1] * 150)
    length = 300 * 23.0
    band = 36.0 / length
    prof = sf.DomainSequence(signs=signs, l_c_um=23.0, band_limit=band)
    resp = residual_response(prof, length)
    dk_in = np.linspace(-band, band, 9)
    d0 = prof.qpm_detuning
    expected = phase_matching(prof, dk_in + d0, length)
    assert np.allclose(resp(dk_in), expected, rtol=1e-12)
    assert np.all(resp(np.array([band * 1.01, -band * 1.01, 10 * band])) == 0)


def test_evaluate_chi2_values():
    z = np.array([-4000.0, 0.0, 4000.0])
    assert np.allclose(evaluate_chi2(sf.Constant(), z, L), 1.0)
    g = evaluate_chi2(sf.GaussianApodized(sigma_um=L / 4), z, L)
    assert g[1] == pytest.approx(1.0)
    assert g[0] == pytest.approx(np.exp(-(4000.0 / (L / 4)) ** 2))
    prof = sf.DomainSequence(signs=(1, -1, 1, -1), l_c_um=10.0)
    vals = evaluate_chi2(prof, np.array([-15.0, -5.0, 5.0, 15.0]), 40.0)
    assert np.allclose(vals, [1, -1, 1, -1])
    with pytest.raises(ValueError):
        evaluate_chi2(sf.Constant(), np.array([L]), L)


def test_chi_callable_availability(cfg, gaussian_profile):
    assert chi_callable(sf.Constant(), L) is not None
    assert chi_callable(gaussian_profile, L) is not None
    domains = sf.DomainSequence(signs=(1, -1), l_c_um=10.0)
    assert chi_callable(domains, 20.0) is None


def test_curve_and_csv_roundtrip():
    dk = np.linspace(-2e-3, 2e-3, 33)
    curve = phase_matching_curve(sf.Constant(), dk, L, normalize=True)
    assert np.abs(curve.amplitude).max() == pytest.approx(1.0)
    text = curve_to_csv(curve)
    rows = [r for r in text.strip().splitlines()[1:]]
    assert len(rows) == 33
    again = curve_to_csv(phase_matching_curve(sf.Constant(), dk, L,
                                              normalize=True))
    assert text == again  # byte-identical rerun


@pytest.mark.parametrize("profile", [
    sf.Constant(),
    sf.GaussianApodized(sigma_um=2500.0),
    sf.CosineSeries(coeffs=(1.0, -0.5, 0.25), sigma_um=2500.0),
    sf.DomainSequence(signs=(1, -1, -1, 1), l_c_um=23.0, band_limit=0.05),
])
def test_profile_json_roundtrip(profile):
    assert profile_from_json(profile_to_json(profile)) == profile


def test_profile_validation():
    with pytest.raises(ValueError):
        sf.GaussianApodized(sigma_um=-1.0)
    with pytest.raises(ValueError):
        sf.CosineSeries(coeffs=(), sigma_um=100.0)
    with pytest.raises(ValueError):
        sf.DomainSequence(signs=(1, 2), l_c_um=10.0)
    with pytest.raises(ValueError):
        sf.DomainSequence(signs=(1, -1), l_c_um=-3.0)
