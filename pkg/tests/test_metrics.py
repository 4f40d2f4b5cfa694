import json

import numpy as np
import pytest

import spdc_forge as sf
from spdc_forge.metrics import (heralding_efficiency, pair_collection_smf,
                                purity_from_matrix, purity_z_kernel,
                                total_rate)


def test_report_invariants():
    rep = sf.MetricsReport(purity=0.9, schmidt_number=1 / 0.9, r2_smf=0.8,
                           heralding=0.95, relative_rate=None,
                           captured_norm=0.999, purity_path="z-kernel")
    d = json.loads(rep.to_json())
    assert d["purity"] == 0.9
    with pytest.raises(ValueError):
        sf.MetricsReport(purity=1.2, schmidt_number=0.8, r2_smf=0.5,
                         heralding=0.9, relative_rate=None,
                         captured_norm=None, purity_path="z-kernel")
    with pytest.raises(ValueError):
        # coupling can never exceed the heralding probability
        sf.MetricsReport(purity=0.9, schmidt_number=1 / 0.9, r2_smf=0.95,
                         heralding=0.9, relative_rate=None,
                         captured_norm=None, purity_path="z-kernel")


def test_purity_from_matrix_guard_and_tail(gauss_matrix):
    p_tail = purity_from_matrix(gauss_matrix)
    p_trunc = purity_from_matrix(gauss_matrix, tail_corrected=False)
    assert 0 < p_tail <= p_trunc <= 1
    assert p_tail == pytest.approx(
        p_trunc * gauss_matrix.captured_norm ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        purity_from_matrix(gauss_matrix, min_captured=1.0)


def test_purity_z_kernel_rejects_domains(cfg):
    prof = sf.DomainSequence(signs=tuple([1, -1] * 250), l_c_um=20.0)
    cfg20 = sf.make_config(775.0, 1550.0, 10.0)
    with pytest.raises(ValueError):
        purity_z_kernel(cfg20, 20.0, prof)


def test_dual_purity_paths_agree_gaussian(cfg, gaussian_profile, gauss_matrix):
    w_p = sf.waist_from_xi(cfg, 3.0, cfg.k_p)
    p_zk = purity_z_kernel(cfg, w_p, gaussian_profile)
    p_matrix = purity_from_matrix(gauss_matrix)
    assert abs(p_zk - p_matrix) <= 0.005


@pytest.mark.parametrize("xi_pair", [(1.42, 1.43), (3.0, 3.04), (3.67, 3.73)])
def test_heralding_bounds_coupling(cfg, gaussian_profile, xi_pair):
    xi_p, xi_c = xi_pair
    pump = sf.gaussian_pump(sf.waist_from_xi(cfg, xi_p, cfg.k_p))
    w_s = sf.waist_from_xi(cfg, xi_c, cfg.k_s)
    w_i = sf.waist_from_xi(cfg, xi_c, cfg.k_i)
    r2 = pair_collection_smf(cfg, pump, gaussian_profile, w_s, w_i)
    eta = heralding_efficiency(cfg, pump, gaussian_profile, w_s, w_i)
    assert 0 < r2 <= eta <= 1 + 1e-9


def test_total_rate_reference_and_degeneracy(cfg, unit_cfg):
    assert total_rate(unit_cfg, sf.Constant()) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        total_rate(cfg, sf.Constant())  # type-II indices: not degenerate
    # apodization can only lower the emitted pair rate
    gauss = sf.GaussianApodized(sigma_um=unit_cfg.L_um / 4)
    assert total_rate(unit_cfg, gauss) < 1.0


def test_total_rate_pump_independence(unit_cfg):
    """The emitted pair rate does not depend on the pump transverse shape."""
    prof = sf.GaussianApodized(sigma_um=unit_cfg.L_um / 4)
    pumps = [
        sf.gaussian_pump(20.0),
        sf.PumpSpec(waist_um=20.0, modes=((2, 1, 1.0),)),
        sf.PumpSpec(waist_um=20.0, modes=((0, 0, np.sqrt(0.4)),
                                          (1, -2, np.sqrt(0.6) * 1j))),
    ]
    rates = [total_rate(unit_cfg, prof, pump=p) for p in pumps]
    for r in rates[1:]:
        assert abs(r - rates[0]) <= 1e-10


def test_compute_metrics_report_consistency(cfg, gaussian_profile):
    pump = sf.gaussian_pump(sf.waist_from_xi(cfg, 3.0, cfg.k_p))
    rep = sf.compute_metrics(cfg, pump, gaussian_profile, xi_s=3.04)
    assert rep.purity_path == "z-kernel"
    assert rep.schmidt_number == pytest.approx(1.0 / rep.purity, rel=1e-12)
    assert rep.relative_rate is None  # rate undefined off degeneracy
    assert rep.purity_stderr is not None and rep.purity_stderr < 1e-3
    assert 0 < rep.r2_smf <= rep.heralding <= 1


def test_compute_metrics_matrix_path(cfg, cosine_profile):
    w_p = sf.waist_from_xi(cfg, 3.67, cfg.k_p)
    pump = sf.PumpSpec(waist_um=w_p, modes=((0, 1, 1.0),))
    rep = sf.compute_metrics(cfg, pump, cosine_profile, xi_s=3.73,
                             bounds=sf.SubspaceBounds(4, 4),
                             min_captured=0.9)
    assert rep.purity_path == "mode-matrix"
    assert rep.captured_norm is not None and rep.captured_norm > 0.9
    assert 0 < rep.purity <= 1
