# SPDX-License-Identifier: Apache-2.0
import math

import numpy as np
import pytest

import bearingntf as bn


def test_unfold_matches_hand_layout():
    t = np.arange(1.0, 9.0).reshape((2, 2, 2), order="F")
    np.testing.assert_array_equal(bn.unfold(t, 1), [[1, 3, 5, 7], [2, 4, 6, 8]])
    np.testing.assert_array_equal(bn.unfold(t, 3), [[1, 2, 3, 4], [5, 6, 7, 8]])
    for mode in (1, 2, 3):
        np.testing.assert_array_equal(bn.fold(bn.unfold(t, mode), mode, (2, 2, 2)), t)


def test_cp_reconstruct_entry():
    rng = np.random.default_rng(0)
    w, h, v = rng.random((4, 2)), rng.random((3, 2)), rng.random((2, 2))
    y = bn.cp_reconstruct(w, h, v)
    np.testing.assert_allclose(y, np.einsum("ij,pj,lj->ipl", w, h, v), rtol=1e-13)


def test_tensor_file_round_trip(tmp_path):
    t = np.random.default_rng(1).random((3, 4, 2))
    path = str(tmp_path / "t.bntf")
    bn.write_tensor(path, t)
    np.testing.assert_array_equal(bn.read_tensor(path), t)


def test_simulate_parts_sum_to_mixture():
    m = bn.simulate(noise_sigma=0.5, duration=1.0, seed=3)
    assert m["y"].shape == (25000,)
    np.testing.assert_array_equal(m["y"], m["s"] + m["d"] + m["n"])
    assert math.isfinite(m["snr_db"])


def test_spectrogram_and_tensor_shapes():
    m = bn.simulate(duration=2.0, seed=0)
    values, freq, times = bn.spectrogram(m["y"], 25000.0)
    assert values.shape == (freq.size, times.size)
    assert values.shape == (257, 1782)
    t = bn.tensorize(m["y"], 25000.0, fold_seconds=1.0, folds=2)
    assert t.shape == (257, 889, 2)


def test_beta_divergence_values():
    y, q = np.array([2.0]), np.array([1.0])
    assert bn.beta_divergence(y, q, 1.0) == pytest.approx(0.5)
    assert bn.beta_divergence(y, q, 0.0) == pytest.approx(2 * math.log(2) - 1)
    assert bn.beta_divergence(y, q, -1.0) == pytest.approx(1 - math.log(2))


def test_ntf_fit_is_nonnegative_and_descends():
    rng = np.random.default_rng(2)
    y = bn.cp_reconstruct(rng.random((10, 2)), rng.random((8, 2)), rng.random((4, 2)))
    fit = bn.ntf(y, rank=2, beta="is", max_iters=50, tol=0.0, seed=1)
    for key in ("W", "H", "V"):
        assert (fit[key] >= 0).all()
    assert np.all(np.diff(fit["objective"]) <= 1e-9 * fit["objective"][0])
    assert fit["iterations"] == 50


def test_nmf_and_diagnose_on_clean_signal():
    m = bn.simulate(noise_sigma=0.0, dist_count=0, duration=2.0)
    assert m["snr_db"] is None
    values, _, _ = bn.spectrogram(m["y"], 25000.0)
    fit = bn.nmf(values, rank=2, beta=1.0, max_iters=100, seed=0)
    assert fit["V"] is None
    rep = bn.diagnose(fit["W"], fit["H"], frame_rate=25000.0 / 28.0)
    peak = rep["spectrum_freq"][1 + int(np.argmax(rep["spectrum"][1:]))]
    assert abs(peak - 30.0) < 1.0
    assert rep["sbi"] > 0.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(bn.ConfigError):
        bn.simulate(fs=1000.0)
    with pytest.raises(bn.DataError):
        bn.unfold(np.ones((2, 2)), 1)
    with pytest.raises(ValueError):
        bn.nmf(np.ones((3, 3)), beta="nope")
