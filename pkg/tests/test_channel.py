import numpy as np
import pytest

from cvkey import ChannelParams, log_negativity, noise_figures, tmsv, transmit, transmittance
from cvkey.channel import transmit_with
from cvkey.errors import DomainError
from cvkey.gaussian import SIGMA_Z, TwoModeCM
from cvkey.resources import apply_mode_mismatch, subtracted_tmsv


class TestTransmittance:
    def test_zero_length(self):
        assert transmittance(0.0) == 0.5

    def test_fifty_km(self):
        assert transmittance(50, 0.02) == pytest.approx(0.05, rel=1e-14)

    def test_fifteen_km(self):
        # 0.5 * 10**-0.3 at 30 digits
        assert transmittance(15, 0.02) == pytest.approx(0.250593616813636149, rel=1e-14)

    def test_negative(self):
        with pytest.raises(DomainError):
            transmittance(-1.0)

    def test_decreasing(self):
        T = [transmittance(L) for L in np.linspace(0, 500, 501)]
        assert np.all(np.diff(T) < 0)
        assert all(0 < t <= 0.5 for t in T)


class TestNoiseFigures:
    @pytest.mark.parametrize("T, eta, expected", [
        (0.5, 1.0, (1.0, 0.0, 1.0)),
        (0.05, 1.0, (19.0, 0.0, 19.0)),
        (0.5, 0.8, (1.0, 0.25, 2.0)),
    ])
    def test_values(self, T, eta, expected):
        assert noise_figures(T, eta) == pytest.approx(expected, abs=1e-13)

    @pytest.mark.parametrize("T, eta", [(0.0, 1.0), (0.5, 0.0)])
    def test_degenerate(self, T, eta):
        with pytest.raises(DomainError):
            noise_figures(T, eta)

    def test_line_noise_grows_with_loss(self):
        chi = [noise_figures(transmittance(L), 1.0)[0] for L in np.linspace(0, 300, 61)]
        assert np.all(np.diff(chi) > 0)


class TestTransmit:
    def test_zero_length(self):
        r = 0.5
        out = transmit(tmsv(r), ChannelParams(length_km=0.0, eta=1.0))
        assert np.allclose(out.b, 0.5 * (np.cosh(2 * r) + 1) * np.eye(2), atol=1e-14)
        assert np.allclose(out.c, np.sinh(2 * r) / np.sqrt(2) * SIGMA_Z, atol=1e-14)
        assert np.array_equal(out.a, tmsv(r).a)

    def test_identity_channel(self):
        V = subtracted_tmsv(0.7, 0.9, 1)
        assert np.array_equal(transmit_with(V, 1.0, 0.0).matrix, V.matrix)

    def test_uncorrelated_stays_uncorrelated(self):
        V = TwoModeCM.standard(5.0, 3.0, 0.0)
        out = transmit(V, ChannelParams(length_km=20.0, eta=0.9))
        assert np.count_nonzero(out.c) == 0

    @pytest.mark.parametrize("L", [0.0, 10.0, 100.0, 400.0])
    @pytest.mark.parametrize("eta", [0.5, 1.0])
    def test_symmetric_positive(self, L, eta):
        out = transmit(apply_mode_mismatch(subtracted_tmsv(1.2, 0.8, 2), 0.03),
                       ChannelParams(length_km=L, eta=eta))
        assert np.array_equal(out.matrix, out.matrix.T)
        assert np.all(np.diag(out.matrix) > 0)

    def test_entanglement_non_increasing_in_length(self, r50):
        V = apply_mode_mismatch(tmsv(r50), 0.01)
        en = [log_negativity(transmit(V, ChannelParams(length_km=L))) for L in np.linspace(0, 300, 61)]
        assert np.all(np.diff(en) <= 0)


class TestParams:
    @pytest.mark.parametrize("kwargs", [
        {"length_km": -1.0}, {"eta": 0.0}, {"eta": 1.1}, {"beta": 0.0}, {"beta": 1.5},
        {"loss_coeff": -0.1},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(DomainError):
            ChannelParams(**kwargs)

    def test_defaults(self):
        ch = ChannelParams()
        assert (ch.loss_coeff, ch.eta, ch.beta) == (0.02, 1.0, 0.95)
        assert ch.transmittance == 0.5
