import math
import pathlib

import numpy as np
import pytest

import heomtt

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_units_round_trip():
    assert heomtt.au_to_fs(heomtt.fs_to_au(12.5)) == pytest.approx(12.5, rel=1e-15)
    assert heomtt.au_to_ev(heomtt.ev_to_au(2.0)) == pytest.approx(2.0, rel=1e-15)
    assert heomtt.fs_to_au(1.0) == pytest.approx(1.0 / 0.02418884326585747, rel=1e-14)


def test_bath_helpers():
    terms = [(6.066930655356927e-11, 2.688026777363475e-03, 1.344013388681738e-03)]
    k, peak, width = heomtt.kappa(terms, 298.0)
    assert k == pytest.approx(1.4, rel=1e-4)
    assert heomtt.au_to_ev(heomtt.reorganization_energy(terms)) == pytest.approx(0.034, rel=1e-6)
    assert len(heomtt.correlation_expansion(terms, 298.0, 2)) == 4
    # Re C(0) = Delta^2 once the Matsubara tail is summed
    err = [abs(sum(a for a, _, _ in heomtt.correlation_expansion(terms, 298.0, n)).real / width**2 - 1) for n in (2, 200)]
    assert err[1] < 1e-5
    assert err[1] < err[0]


def test_storage_report():
    r = heomtt.storage_report(2, 80, 5, 80)
    assert r["dense_scalars"] == 131206068
    assert r["tt_bound"] == 2528720


@pytest.mark.parametrize("backend", ["dense", "tt"])
def test_simulate_preserves_trace(backend):
    r = heomtt.simulate(str(CONFIGS / "app1.json"), backend=backend, t_final=5.0, stride=5, rmax=12)
    # 5 fs rounds to 21 steps of 0.24 fs
    rho = r["rho"]
    assert rho.shape[1:] == (4, 4)
    assert r["t_fs"][0] == 0.0
    assert r["t_fs"][-1] == pytest.approx(21 * 0.24)
    tr = np.einsum("tii->t", rho)
    assert np.max(np.abs(tr - 1.0)) < 1e-8
    assert np.max(np.abs(rho - np.conj(np.transpose(rho, (0, 2, 1))))) < 1e-8
    p = heomtt.populations(r)
    assert p[0, 3] == pytest.approx(1.0, abs=1e-12)


def test_backends_agree_early():
    a = heomtt.populations(heomtt.simulate(str(CONFIGS / "app1.json"), backend="dense", t_final=2.4))
    b = heomtt.populations(heomtt.simulate(str(CONFIGS / "app1.json"), backend="tt", t_final=2.4, rmax=20, pad_rank=8))
    assert np.max(np.abs(a[-1] - b[-1])) < 1e-8


def test_config_errors_raise():
    with pytest.raises(heomtt.ConfigError):
        heomtt.simulate(str(CONFIGS / "app1.json"), dt=-1.0)
    with pytest.raises(ValueError):
        heomtt.simulate(str(CONFIGS / "missing.json"))
    assert not math.isnan(heomtt.beta_from_kelvin(298.0))
