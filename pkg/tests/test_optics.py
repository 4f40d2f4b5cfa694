import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import spdc_forge as sf
from spdc_forge.optics import (config_from_dict, config_to_dict,
                               dispersion_models, load_config)


def test_reference_wave_numbers(cfg):
    # frozen values for the shipped type-II dispersion model at 775/1550 nm
    assert cfg.k_p == pytest.approx(14.2550, abs=2e-3)
    assert cfg.k_s == pytest.approx(7.0294, abs=2e-3)
    assert cfg.k_i == pytest.approx(7.3616, abs=2e-3)
    assert cfg.alpha == pytest.approx(0.036055, abs=2e-5)
    assert cfg.beta == pytest.approx(0.032845, abs=2e-5)
    assert cfg.gamma_sum == pytest.approx(cfg.alpha + cfg.beta + 1 / cfg.k_p)


def test_energy_conservation_enforced():
    with pytest.raises(ValueError):
        sf.OpticalConfig(lambda_p_nm=775, lambda_s_nm=1500, lambda_i_nm=1600,
                         n_p=1.8, n_s=1.75, n_i=1.85, L_um=1e4)


def test_make_config_validation():
    with pytest.raises(ValueError):
        sf.make_config(775, 700, 10)  # signal below pump
    with pytest.raises(ValueError):
        sf.make_config(775, 1550, -1)
    with pytest.raises(ValueError):
        sf.make_config(775, 1550, 10, dispersion="nope")
    with pytest.raises(ValueError):
        sf.make_config(300, 600, 10)  # outside dispersion validity range
    assert "ktp-typeII" in dispersion_models()
    assert "unit" in dispersion_models()


def test_idler_from_energy_conservation(cfg):
    assert 1 / cfg.lambda_p_nm == pytest.approx(
        1 / cfg.lambda_s_nm + 1 / cfg.lambda_i_nm, rel=1e-12)


def test_degeneracy_flags(cfg, unit_cfg):
    assert unit_cfg.is_degenerate()
    assert not cfg.is_degenerate()  # type-II: signal/idler indices differ


def test_unit_model_mismatch_coefficients(unit_cfg):
    # with k_s = k_i = k_p / 2 both curvature coefficients equal 1 / (2 k_p)
    assert unit_cfg.alpha == pytest.approx(1 / (2 * unit_cfg.k_p), rel=1e-12)
    assert unit_cfg.beta == pytest.approx(1 / (2 * unit_cfg.k_p), rel=1e-12)


@given(rho_s=st.floats(0, 0.5), rho_i=st.floats(0, 0.5),
       phi_s=st.floats(-math.pi, math.pi), phi_i=st.floats(-math.pi, math.pi),
       theta=st.floats(-math.pi, math.pi))
@settings(max_examples=60, deadline=None)
def test_delta_kz_rotation_invariance(rho_s, rho_i, phi_s, phi_i, theta):
    cfg = sf.make_config(775.0, 1550.0, 10.0)
    a = sf.delta_kz(cfg, sf.TransverseMomentum(rho_s, phi_s),
                    sf.TransverseMomentum(rho_i, phi_i))
    b = sf.delta_kz(cfg, sf.TransverseMomentum(rho_s, phi_s + theta),
                    sf.TransverseMomentum(rho_i, phi_i + theta))
    assert a == pytest.approx(b, abs=1e-12)


@given(rho_s=st.floats(0, 0.5), rho_i=st.floats(0, 0.5),
       phi_s=st.floats(-math.pi, math.pi), phi_i=st.floats(-math.pi, math.pi))
@settings(max_examples=60, deadline=None)
def test_delta_kz_exchange_symmetry_degenerate(rho_s, rho_i, phi_s, phi_i):
    cfg = sf.make_config(775.0, 1550.0, 10.0, dispersion="unit")
    a = sf.delta_kz(cfg, sf.TransverseMomentum(rho_s, phi_s),
                    sf.TransverseMomentum(rho_i, phi_i))
    b = sf.delta_kz(cfg, sf.TransverseMomentum(rho_i, phi_i),
                    sf.TransverseMomentum(rho_s, phi_s))
    assert a == pytest.approx(b, abs=1e-12)


def test_delta_kz_on_axis_is_zero(cfg):
    q0 = sf.TransverseMomentum(0.0, 0.0)
    assert sf.delta_kz(cfg, q0, q0) == 0.0


def test_momentum_cartesian_components():
    q = sf.TransverseMomentum(2.0, math.pi / 6)
    assert q.x == pytest.approx(2.0 * math.cos(math.pi / 6))
    assert q.y == pytest.approx(2.0 * math.sin(math.pi / 6))


@given(xi=st.floats(0.05, 10.0))
@settings(max_examples=40, deadline=None)
def test_waist_focusing_roundtrip(xi):
    cfg = sf.make_config(775.0, 1550.0, 10.0)
    for k in (cfg.k_p, cfg.k_s, cfg.k_i):
        w = sf.waist_from_xi(cfg, xi, k)
        beam = sf.xi_from_waist(cfg, w, k)
        assert beam.xi == pytest.approx(xi, rel=1e-12)
        # the defining relation: xi = L / (k w^2)
        assert xi == pytest.approx(cfg.L_um / (k * w * w), rel=1e-12)


def test_config_dict_roundtrip(cfg, tmp_path):
    d = config_to_dict(cfg)
    again = config_from_dict(d)
    assert again == cfg
    p = tmp_path / "optics.json"
    p.write_text(json.dumps(d))
    assert load_config(p) == cfg
