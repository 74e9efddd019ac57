import numpy as np
import pytest

from impedance_lab.exceptions import InfeasibleTraining, ShapeMismatch
from impedance_lab.fading import ChannelSpec
from impedance_lab.frontend import compute_F
from impedance_lab.signalpath import (Observations, dft_training,
                                      sufficient_stats, synthesize)

F_DIPOLE = compute_F(73 + 42.5j, 50 + 0j, 60 + 20j)


class TestDftTraining:
    def test_gram_matrix(self):
        train = dft_training(4, 64, 1.0)
        np.testing.assert_allclose(train.X1 @ train.X1.conj().T, 8.0 * np.eye(4),
                                   atol=1e-10)
        np.testing.assert_allclose(train.X2 @ train.X2.conj().T, 8.0 * np.eye(4),
                                   atol=1e-10)

    def test_row_orthogonality(self):
        train = dft_training(4, 64, 1.0)
        G = train.X1 @ train.X1.conj().T
        off = G - np.diag(np.diag(G))
        assert np.abs(off).max() < 1e-10

    def test_degenerate_size(self):
        train = dft_training(1, 2, 1.0)
        assert train.X1.shape == (1, 1)
        assert abs(train.X1[0, 0]) == pytest.approx(1.0)  # sqrt(P), P = 1

    def test_power_scaling(self):
        train = dft_training(4, 64, 2.0)
        np.testing.assert_allclose(train.X1 @ train.X1.conj().T, 16.0 * np.eye(4),
                                   atol=1e-10)

    def test_odd_T_rejected(self):
        with pytest.raises(InfeasibleTraining):
            dft_training(4, 63)

    def test_too_short_rejected(self):
        with pytest.raises(InfeasibleTraining):
            dft_training(4, 6)


class TestSynthesize:
    def test_noiseless_identity_F(self):
        spec = ChannelSpec.iid(N=4, L=3, sigma_h2=1.0)
        train = dft_training(4, 64)
        obs = synthesize(spec, train, 1.0 + 0j, 0.0, np.random.default_rng(0))
        scale = 2.0 * 4 / 64
        Y1 = scale * obs.U1 @ train.X1.conj().T
        Y2 = scale * obs.U2 @ train.X2.conj().T
        np.testing.assert_allclose(Y1, Y2, atol=1e-12)

    def test_noiseless_bilinearity(self):
        spec = ChannelSpec.iid(N=4, L=3, sigma_h2=1.0)
        train = dft_training(4, 64)
        obs = synthesize(spec, train, F_DIPOLE, 0.0, np.random.default_rng(1))
        stats = sufficient_stats(obs, train, 0.0)
        np.testing.assert_allclose(stats.Y2, F_DIPOLE * stats.Y1, atol=1e-12)

    def test_pure_noise_variance(self):
        spec = ChannelSpec.iid(N=4, L=160, sigma_h2=0.0)
        train = dft_training(4, 64)
        sigma_n2 = 0.7
        obs = synthesize(spec, train, F_DIPOLE, sigma_n2, np.random.default_rng(2))
        samples = np.concatenate([obs.U1.ravel(), obs.U2.ravel()])
        assert samples.size >= 10_000
        se = 3 * sigma_n2 / np.sqrt(samples.size)
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(sigma_n2, abs=se)

    def test_truth_recorded(self):
        spec = ChannelSpec.iid(N=2, L=2, sigma_h2=0.5)
        train = dft_training(2, 16)
        obs = synthesize(spec, train, F_DIPOLE, 0.1, np.random.default_rng(3))
        assert obs.truth.F == F_DIPOLE
        assert obs.truth.sigma_h2 == 0.5
        assert obs.truth.H.shape == (2, 2)

    def test_shape_mismatch(self):
        spec = ChannelSpec.iid(N=3, L=2, sigma_h2=1.0)
        train = dft_training(4, 64)
        with pytest.raises(ShapeMismatch):
            synthesize(spec, train, 1.0, 0.1, np.random.default_rng(0))


class TestSufficientStats:
    def test_sigma2_value(self):
        spec = ChannelSpec.iid(N=4, L=2, sigma_h2=1.0)
        train = dft_training(4, 64)
        obs = synthesize(spec, train, F_DIPOLE, 1.0, np.random.default_rng(4))
        stats = sufficient_stats(obs, train, 1.0)
        assert stats.sigma2 == pytest.approx(0.125)

    def test_unbiased_around_H(self):
        spec = ChannelSpec.iid(N=4, L=40, sigma_h2=1.0)
        train = dft_training(4, 64)
        rng = np.random.default_rng(5)
        resid = []
        for _ in range(200):
            obs = synthesize(spec, train, F_DIPOLE, 0.5, rng)
            stats = sufficient_stats(obs, train, 0.5)
            resid.append(stats.Y1 - obs.truth.H)
        resid = np.concatenate([r.ravel() for r in resid])
        sigma2 = 2.0 * 4 * 0.5 / 64
        se = 3 * sigma2 / np.sqrt(resid.size)
        assert abs(resid.mean()) < 3 / np.sqrt(resid.size)
        assert np.mean(np.abs(resid) ** 2) == pytest.approx(sigma2, abs=se)

    def test_bad_shapes_rejected(self):
        train = dft_training(4, 64)
        obs = Observations(U1=np.zeros((2, 31), dtype=complex),
                           U2=np.zeros((2, 32), dtype=complex))
        with pytest.raises(ShapeMismatch):
            sufficient_stats(obs, train, 0.1)
