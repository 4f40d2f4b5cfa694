"""Shared fixtures: reference configurations and cached heavy decompositions."""

import pytest

import spdc_forge as sf


@pytest.fixture(scope="session")
def cfg():
    """Type-II KTP reference: 775 nm pump, degenerate 1550 nm pair, 10 mm."""
    return sf.make_config(775.0, 1550.0, 10.0)


@pytest.fixture(scope="session")
def unit_cfg():
    """Index-free toy configuration with exactly degenerate wave numbers."""
    return sf.make_config(775.0, 1550.0, 10.0, dispersion="unit")


@pytest.fixture(scope="session")
def sinc_profile():
    return sf.Constant()


@pytest.fixture(scope="session")
def gaussian_profile(cfg):
    return sf.GaussianApodized(sigma_um=cfg.L_um / 4)


@pytest.fixture(scope="session")
def cosine_profile(cfg):
    return sf.CosineSeries(coeffs=sf.COSINE_COEFFS_ORDER7,
                           sigma_um=cfg.L_um / 4)


def waist(cfg, xi, k):
    return sf.waist_from_xi(cfg, xi, k)


@pytest.fixture(scope="session")
def sinc_matrix(cfg, sinc_profile):
    """Mode-matrix decomposition of the unapodized crystal at its optimum."""
    pump = sf.gaussian_pump(waist(cfg, 1.42, cfg.k_p))
    w_s = waist(cfg, 1.43, cfg.k_s)
    w_i = waist(cfg, 1.43, cfg.k_i)
    return sf.decompose(cfg, pump, sinc_profile, sf.SubspaceBounds(8, 6),
                        w_s, w_i)


@pytest.fixture(scope="session")
def gauss_matrix(cfg, gaussian_profile):
    """Mode-matrix decomposition of the Gaussian-apodized crystal."""
    pump = sf.gaussian_pump(waist(cfg, 3.0, cfg.k_p))
    w_s = waist(cfg, 3.04, cfg.k_s)
    w_i = waist(cfg, 3.04, cfg.k_i)
    return sf.decompose(cfg, pump, gaussian_profile, sf.SubspaceBounds(8, 6),
                        w_s, w_i)
