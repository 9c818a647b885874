import json
import math

import numpy as np
import pytest

import hcent


def test_chain_spec():
    s = hcent.ChainSpec.from_xi(4096, 16.0)
    assert s.n_sites == 4096
    assert s.xi == pytest.approx(16.0)
    assert hcent.xi(0.5) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hcent.ChainSpec.from_coupling(16, 1.0)


def test_kernel_matches_numpy_mode_sum():
    spec = hcent.ChainSpec.from_coupling(64, 0.9)
    k = hcent.build_kernel(spec)
    theta = 2 * np.pi * np.arange(64) / 64
    nu = np.sqrt(1 - 0.9 * np.cos(theta))
    x = np.arange(64)
    g = (np.cos(np.outer(x, theta)) / nu).sum(axis=1) / 128
    h = (np.cos(np.outer(x, theta)) * nu).sum(axis=1) / 128
    np.testing.assert_allclose(k.g, g, atol=1e-12)
    np.testing.assert_allclose(k.h, h, atol=1e-12)


def test_measure_reference_values():
    r = hcent.measure(64, 0.9, 4, 1)
    assert r.entropy_a == pytest.approx(0.28509550906620107, rel=1e-9)
    assert r.mutual_information == pytest.approx(0.06327898382616615, rel=1e-8)
    assert r.log_negativity == pytest.approx(0.08742491228414175, rel=1e-9)
    assert set(r.as_dict()) == {"S_A", "S_B", "S_AB", "I_nats", "E_LN_bits"}


def test_uncoupled_chain_has_no_negativity():
    k = hcent.build_kernel(hcent.ChainSpec.from_coupling(128, 0.0))
    assert hcent.log_negativity(k, hcent.BlockPair(128, 4, 8)) == 0.0


def test_spectrum_from_matrices():
    g = np.array([[2.0]])
    h = np.array([[0.5]])
    nu = hcent.symplectic_spectrum(g, h)
    assert nu == pytest.approx([1.0])
    assert hcent.entropy(nu) == pytest.approx(1.5 * math.log(1.5) + 0.5 * math.log(2.0))
    assert hcent.log_negativity([0.25, 0.5]) == pytest.approx(1.0)
    with pytest.raises(ArithmeticError):
        hcent.symplectic_spectrum(np.array([[1.0, 2.0], [2.0, 1.0]]), np.eye(2))


def test_fit_and_errors():
    x = np.linspace(0.5, 2.5, 20)
    f = hcent.fit("exp_linear", x, 3 * np.exp(-2.8 * x))
    assert f["coefficients"]["decay"] == pytest.approx(2.8)
    with pytest.raises(RuntimeError):
        hcent.fit("linear", [1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        hcent.fit("cubic", x, x)


def test_sweep_and_self_check():
    config = {
        "schema_version": 1,
        "sweep_kind": "critical_r",
        "chain": {"preset": "critical", "n_sites": 512},
        "grid": {"block_len": 16, "r_min": 0.1, "r_max": 2.0, "points": 6},
    }
    csv = hcent.run_sweep(json.dumps(config))
    lines = csv.strip().split("\n")
    assert lines[0].endswith("I_nats,E_LN_bits")
    e = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
    assert all(a > b for a, b in zip(e, e[1:]))
    assert hcent.run_sweep(json.dumps(config), threads=1) == csv
    config["grid"]["bogus"] = 1
    with pytest.raises(ValueError, match="grid.bogus"):
        hcent.run_sweep(json.dumps(config))

    s = hcent.self_check(sizes=[8, 16], max_block_len=3)
    assert s["passed"]
