import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lhrhythm.config import AnalysisConfig
from lhrhythm.model import UniformSeries
from lhrhythm.preprocess import HF_BAND, LF_BAND
from lhrhythm.tfr import (SpwvdConfig, TimeFrequencyMap, analytic_signal, band_amplitude,
                          calibrate_amplitude, instantaneous_amplitude, instantaneous_moments,
                          spwvd, spwvd_direct)

CFG = SpwvdConfig()
DAY = 24.0


def series(values, dt=1.0, t0=0.0):
    return UniformSeries(t0, dt, np.asarray(values))


def analytic_tone(f0, n, amp=1.0, dt=1.0):
    return series(amp * np.exp(2j * np.pi * f0 * dt * np.arange(n)), dt)


def interior(n, cfg=CFG):
    return slice(cfg.margin, n - cfg.margin)


class TestConfig:
    def test_window_normalisation(self):
        for shape in ("hamming", "gaussian"):
            c = SpwvdConfig(window_shape=shape)
            assert c.time_window().sum() == pytest.approx(1.0)
            assert c.lag_window_sq()[0] == 1.0

    @pytest.mark.parametrize("kw", [dict(h_len=128), dict(g_len=0), dict(n_freq_bins=500),
                                    dict(h_len=255, n_freq_bins=128), dict(window_shape="kaiser")])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SpwvdConfig(**kw)


class TestAnalytic:
    def test_cosine_becomes_exponential(self):
        n, f0 = 1024, 37 / 1024
        z = analytic_signal(series(np.cos(2 * np.pi * f0 * np.arange(n)))).values
        sl = slice(n // 10, n - n // 10)
        assert np.max(np.abs(z - np.exp(2j * np.pi * f0 * np.arange(n)))[sl]) < 1e-6

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=8, max_size=300))
    def test_real_part_is_input(self, xs):
        z = analytic_signal(series(np.array(xs))).values
        assert np.max(np.abs(z.real - xs)) <= 1e-9 * max(1.0, np.max(np.abs(xs)))

    def test_constant(self):
        z = analytic_signal(series(np.full(64, 2.5))).values
        assert np.allclose(z, 2.5 + 0j, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError):
            analytic_signal(series(np.ones(5)))


class TestSpwvd:
    def test_zero_input(self):
        m = spwvd(series(np.zeros(400, complex)), CFG)
        assert not np.any(m.values)

    def test_frequency_axis(self):
        m = spwvd(analytic_tone(0.1, 400), CFG)
        assert m.freqs[0] == 0 and np.all(np.diff(m.freqs) > 0) and m.freqs[-1] < 0.5
        assert m.dnu == pytest.approx(1 / (2 * CFG.n_freq_bins))

    def test_tone_peak_at_nearest_bin(self):
        f0 = 0.1234
        z = analytic_tone(f0, 600)
        m = spwvd(z, CFG)
        want = int(np.argmin(np.abs(m.freqs - f0)))
        peaks = np.argmax(m.values[interior(600)], axis=1)
        assert np.all(peaks == want)
        # oracle: the direct double sum at a few (t, nu) points
        cfg = SpwvdConfig(31, 15, 64)
        zs = analytic_tone(f0, 120)
        direct = spwvd_direct(zs, cfg, times=[40, 60, 80])
        fast = spwvd(zs, cfg).values[[40, 60, 80]]
        assert np.allclose(fast, direct, rtol=0, atol=1e-9 * np.abs(direct).max())
        nearest = int(np.argmin(np.abs(np.arange(64) / 128 - f0)))
        assert np.all(np.argmax(direct, axis=1) == nearest)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(40, 120), st.sampled_from([(7, 5, 8), (15, 9, 16), (31, 1, 32), (9, 15, 16)]),
           st.integers(0, 2 ** 32 - 1))
    def test_matches_direct_sum(self, n, dims, seed):
        rng = np.random.default_rng(seed)
        z = series(rng.standard_normal(n) + 1j * rng.standard_normal(n), dt=0.7)
        cfg = SpwvdConfig(*dims)
        fast = spwvd(z, cfg).values
        direct = spwvd_direct(z, cfg)
        assert np.max(np.abs(fast - direct)) <= 1e-9 * np.abs(direct).max()

    def test_matches_direct_sum_length_256(self):
        rng = np.random.default_rng(5)
        x = series(np.cumsum(rng.standard_normal(256)), dt=DAY)
        z = analytic_signal(x)
        cfg = SpwvdConfig(63, 31, 64)
        rows = [0, 17, 100, 128, 200, 255]
        fast = spwvd(z, cfg).values[rows]
        direct = spwvd_direct(z, cfg, times=rows)
        assert np.max(np.abs(fast - direct)) <= 1e-9 * np.abs(direct).max()

    def test_time_shift_covariance(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(700) + 1j * rng.standard_normal(700)
        s = 37
        a = spwvd(series(x[s:]), CFG).values
        b = spwvd(series(x), CFG).values[s:]
        sl = interior(len(a))
        assert np.max(np.abs(a[sl] - b[sl])) <= 1e-9 * np.abs(b).max()

    def test_cross_terms_smoothed_away(self):
        n, f1, f2 = 800, 0.08, 0.18
        z = series(np.exp(2j * np.pi * f1 * np.arange(n)) + np.exp(2j * np.pi * f2 * np.arange(n)))
        mid_bin = lambda m: int(np.argmin(np.abs(m.freqs - (f1 + f2) / 2)))  # noqa: E731
        smooth = spwvd(z, CFG)
        sl = interior(n)
        auto = smooth.values[sl].max()
        assert np.abs(smooth.values[sl, mid_bin(smooth)]).max() < 0.05 * auto
        plain_cfg = SpwvdConfig.unsmoothed(256)
        plain = spwvd(series(z.values[:256]), plain_cfg)
        cross = np.abs(plain.values[64:192, mid_bin(plain)]).max()
        assert cross > 0.05 * plain.values[64:192].max()

    def test_worker_count_does_not_change_bytes(self):
        rng = np.random.default_rng(2)
        z = analytic_signal(series(rng.standard_normal(1500), dt=DAY))
        one = spwvd(z, CFG, workers=1).values
        many = spwvd(z, CFG, workers=4).values
        assert one.tobytes() == many.tobytes()

    def test_too_short(self):
        with pytest.raises(ValueError):
            spwvd(analytic_tone(0.1, 100), CFG)


class TestMoments:
    @pytest.mark.parametrize("amp", [0.5, 1.0, 3.0])
    def test_tone_power_and_frequency(self, amp):
        f0, n = 0.0713, 900
        mom = instantaneous_moments(spwvd(analytic_tone(f0, n, amp), CFG))
        p = mom.ipow.values[interior(n)]
        assert np.std(p) / np.mean(p) < 0.01
        assert np.mean(p) == pytest.approx(amp ** 2, rel=0.01)
        f = mom.ifreq.values[interior(n)]
        assert np.max(np.abs(f - f0)) <= 1 / (2 * CFG.n_freq_bins)

    def test_tone_near_zero_frequency(self):
        # smoothing spreads a 3-bin tone across 0 Hz; the moment must not wrap to Nyquist
        f0, n = 3.3 / (2 * CFG.n_freq_bins), 900
        mom = instantaneous_moments(spwvd(analytic_tone(f0, n), CFG))
        f = mom.ifreq.values[interior(n)]
        assert np.max(np.abs(f - f0)) <= 1 / (2 * CFG.n_freq_bins)

    def test_linear_chirp(self):
        n = 1024
        t = np.arange(n)
        f_a, f_b = 0.05, 0.2
        k = (f_b - f_a) / n
        z = series(np.exp(2j * np.pi * (f_a * t + 0.5 * k * t * t)))
        mom = instantaneous_moments(spwvd(z, CFG))
        sl = interior(n)
        err = np.abs(mom.ifreq.values - (f_a + k * t))[sl]
        assert err.max() < 2 / (2 * CFG.n_freq_bins)

    def test_zero_map(self):
        m = TimeFrequencyMap(0.0, 1.0, np.arange(8) / 16, np.zeros((20, 8)))
        mom = instantaneous_moments(m)
        assert not np.any(mom.ipow.values) and np.all(np.isnan(mom.ifreq.values))

    def test_unsmoothed_energy_marginal(self):
        n = 256
        z = analytic_signal(series(np.cos(2 * np.pi * 0.1 * np.arange(n)), dt=DAY))
        mom = instantaneous_moments(spwvd(z, SpwvdConfig.unsmoothed(n)))
        energy = np.sum(np.abs(z.values) ** 2) * z.dt
        assert np.sum(mom.ipow.values) * z.dt == pytest.approx(energy, rel=0.01)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.1, 20), st.integers(0, 2 ** 32 - 1))
    def test_bilinearity(self, c, seed):
        rng = np.random.default_rng(seed)
        x = analytic_signal(series(rng.standard_normal(400)))
        a = instantaneous_moments(spwvd(x, CFG))
        b = instantaneous_moments(spwvd(x.with_values(c * x.values), CFG))
        assert np.allclose(b.ipow.values, c * c * a.ipow.values, rtol=1e-9,
                           atol=1e-9 * c * c * np.abs(a.ipow.values).max())
        ok = np.isfinite(a.ifreq.values)
        assert np.allclose(b.ifreq.values[ok], a.ifreq.values[ok], rtol=1e-9, atol=1e-12)

    def test_ifreq_inside_axis_where_power(self):
        mom = instantaneous_moments(spwvd(analytic_tone(0.3, 500), CFG))
        f = mom.ifreq.values[mom.ipow.values > 0]
        assert np.all((f >= 0) & (f <= 0.5))


class TestCalibration:
    @pytest.mark.parametrize("band,taps", [(LF_BAND, AnalysisConfig().lf_taps), (HF_BAND, 255)])
    @pytest.mark.parametrize("amp", [1.0, 2.7])
    def test_tone_amplitude_recovered(self, band, taps, amp):
        n = 2048
        f0 = band.center_frequency()
        x = series(amp * np.cos(2 * np.pi * f0 * DAY * np.arange(n)), dt=DAY)
        _, inst = band_amplitude(x, band, CFG, taps)
        edge = CFG.margin + taps
        assert np.allclose(inst.iamp.values[edge:n - edge], amp, rtol=0.02)

    def test_alpha_positive(self):
        for band in (LF_BAND, HF_BAND):
            assert calibrate_amplitude(CFG, band, DAY) > 0

    def test_amplitude_arithmetic(self):
        zero = series(np.zeros(10))
        assert not np.any(instantaneous_amplitude(zero, 3.0).values)
        assert np.allclose(instantaneous_amplitude(series(np.full(10, 4.0)), 0.5).values, 1.0)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            instantaneous_amplitude(series(np.array([1.0, -0.5, 1.0])), 1.0)

    def test_reflect_padding_keeps_axis(self):
        x = series(np.cos(2 * np.pi * np.arange(1200) / 14), dt=DAY, t0=48.0)
        comp, inst = band_amplitude(x, HF_BAND, CFG, edge_pad="reflect")
        assert len(inst.iamp) == len(x) and inst.iamp.t0 == x.t0
        with pytest.raises(ValueError):
            band_amplitude(x, HF_BAND, CFG, edge_pad="wrap")
