import math

import numpy as np
import pytest

import pemda


def test_thresholds_at_unit_parameters():
    p = pemda.Params(beta_u=50, beta_b=50)
    t = pemda.compute_thresholds(p, C=1, k0=1, Ch1=1)
    assert t["R3"] == pytest.approx(3.0, rel=1e-14)
    assert t["beta_min"] == pytest.approx(1108.0, rel=1e-14)
    assert t["h_max"] == pytest.approx(math.sqrt(0.2) / 50, rel=1e-12)


def test_bad_parameters_raise():
    with pytest.raises(pemda.ValidationError):
        pemda.Params(mu=-1)
    with pytest.raises(pemda.Error):
        pemda.Grid(0, 8, 8)


def test_random_state_has_requested_norms():
    g = pemda.Grid(8, 8, 8)
    s = pemda.random_state(g, seed=3, norm_u=2.0, norm_b=0.5)
    n = s.norms()
    assert n["l2_u"] == pytest.approx(2.0, rel=1e-12)
    assert n["l2_b"] == pytest.approx(0.5, rel=1e-12)
    assert s.is_admissible()
    u1, u2 = s.u()
    assert u1.shape == g.shape
    # physical samples carry the same L2 norm
    cell = g.volume / u1.size
    assert math.sqrt(cell * (np.sum(u1**2) + np.sum(u2**2))) == pytest.approx(2.0, rel=1e-12)


def test_arrays_round_trip():
    g = pemda.Grid(8, 8, 8)
    x, y, z = (np.array(c) for c in g.coordinates())
    Z, Y, X = np.meshgrid(z, y, x, indexing="ij")
    u1 = np.cos(Y) * np.cos(np.pi * Z)
    zero = np.zeros(g.shape)
    s = pemda.state_from_arrays(g, u1, zero, zero, zero)
    assert np.max(np.abs(s.u()[0] - u1)) < 1e-13


def test_cda_error_decreases():
    g = pemda.Grid(16, 16, 8)
    truth = pemda.random_state(g, seed=1)
    guess = pemda.random_state(g, seed=2)
    p = pemda.Params(beta_u=20, beta_b=20, h=math.pi / 4)
    recs = pemda.run_cda(truth, guess, p, pemda.Interpolant("spectral", math.pi / 4, g),
                         pemda.IntegratorConfig(dt=5e-3, t_end=0.2))
    assert len(recs) == 41
    assert recs[-1].err_l2 < 0.5 * recs[0].err_l2
    assert pemda.RunRecord.from_json(recs[-1].to_json()) == recs[-1]


def test_records_file(tmp_path):
    g = pemda.Grid(8, 8, 8)
    tr = pemda.run_reference(pemda.random_state(g, seed=4), pemda.Params(), pemda.IntegratorConfig(dt=0.01, t_end=0.05))
    path = tmp_path / "ref.ndjson"
    pemda.write_records(path, tr.records)
    back = pemda.read_records(path)
    assert back == tr.records
    assert back[-1].err_l2 is None


def test_cli_and_verify():
    code, out, _ = pemda.cli("check-params", "--mu", 1, "--nu", 1, "--beta-u", 50, "--beta-b", 50, "--Ch1", 1)
    assert code == 0 and "h_max = 0.0089442719" in out
    assert pemda.cli("--bogus")[0] == 1
    assert all(c["passed"] for c in pemda.verify(pemda.Grid(16, 16, 16)))
