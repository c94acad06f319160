import numpy as np
import pytest

from pulsegrade.spectral import (
    PeakResult,
    Spectrum,
    find_peak,
    signal_band_mask,
    snr,
    welch_psd,
)


def flat_spectrum(n=1001):
    freqs = np.linspace(0.5, 3.0, n)
    return Spectrum(freqs, np.ones_like(freqs))


def band_measure_oracle(f1, n=2_000_001):
    """Numerical integration of the signal/noise band measures on [0.75, 2.5].

    Independent of the implementation: integrates the window indicator on a
    dense grid instead of classifying spectrum bins.
    """
    f = np.linspace(0.75, 2.5, n)
    sig = (np.abs(f - f1) <= 0.1) | (np.abs(f - 2 * f1) <= 0.1)
    df = (2.5 - 0.75) / (n - 1)
    sig_measure = sig.sum() * df
    noise_measure = (~sig).sum() * df
    return 10 * np.log10(sig_measure / noise_measure)


class TestWelchPsd:
    def test_pure_tone_argmax(self):
        t = np.arange(900) / 30.0
        spec = welch_psd(np.sin(2 * np.pi * 1.5 * t))
        peak = spec.freqs_hz[np.argmax(spec.power)]
        assert peak == pytest.approx(1.5, abs=0.01)

    def test_white_noise_spreads_power(self):
        # No single bin may hold more than 10% of band power, any seed.
        for seed in range(100):
            rng = np.random.default_rng(seed)
            spec = welch_psd(rng.normal(0, 1, 900))
            band = spec.band_mask()
            p = spec.power[band]
            assert p.max() < 0.10 * p.sum()

    def test_all_zero_signal(self):
        spec = welch_psd(np.zeros(900))
        assert np.all(spec.power == 0.0)

    def test_scaling_quadratic(self):
        rng = np.random.default_rng(1)
        x = rng.normal(0, 1, 600)
        a = welch_psd(x)
        b = welch_psd(3.0 * x)
        assert np.allclose(b.power, 9.0 * a.power, rtol=1e-9)

    def test_short_signal_single_window(self):
        t = np.arange(90) / 30.0  # 3 s < 10 s segment
        spec = welch_psd(np.sin(2 * np.pi * 1.2 * t))
        peak = spec.freqs_hz[np.argmax(spec.power)]
        assert peak == pytest.approx(1.2, abs=0.35)  # 3 s resolution limit

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            welch_psd(np.zeros(63))

    def test_resolution_fine_enough(self):
        spec = welch_psd(np.random.default_rng(0).normal(0, 1, 300))
        assert np.diff(spec.freqs_hz).max() <= 0.01


class TestFindPeak:
    def test_single_spike(self):
        spec = flat_spectrum()
        power = np.zeros_like(spec.power)
        power[np.argmin(np.abs(spec.freqs_hz - 1.2))] = 5.0
        result = find_peak(Spectrum(spec.freqs_hz, power))
        assert result.hz == pytest.approx(1.2, abs=0.01)
        assert not result.no_peak

    def test_band_restriction(self):
        # larger spike at 0.5 Hz is outside the band; 2.0 Hz wins
        spec = flat_spectrum()
        power = np.zeros_like(spec.power)
        power[np.argmin(np.abs(spec.freqs_hz - 0.5))] = 10.0
        power[np.argmin(np.abs(spec.freqs_hz - 2.0))] = 3.0
        result = find_peak(Spectrum(spec.freqs_hz, power))
        assert result.hz == pytest.approx(2.0, abs=0.01)

    def test_all_zero_fallback(self):
        spec = flat_spectrum()
        result = find_peak(Spectrum(spec.freqs_hz, np.zeros_like(spec.power)))
        assert result == PeakResult(1.625, True)


class TestSnr:
    def test_single_bin_all_power(self):
        spec = flat_spectrum()
        power = np.zeros_like(spec.power)
        power[np.argmin(np.abs(spec.freqs_hz - 1.2))] = 1.0
        assert snr(Spectrum(spec.freqs_hz, power), 1.2) == 20.0

    def test_all_zero_floor(self):
        spec = flat_spectrum()
        assert snr(Spectrum(spec.freqs_hz, np.zeros_like(spec.power)), 1.2) == -20.0

    def test_flat_spectrum_both_windows_inside(self):
        # Closed form: 10 log10(0.4 / 1.35); the quadrature oracle agrees.
        oracle = band_measure_oracle(1.2)
        assert oracle == pytest.approx(10 * np.log10(0.4 / 1.35), abs=1e-3)
        assert snr(flat_spectrum(), 1.2) == pytest.approx(oracle, abs=0.1)
        assert snr(flat_spectrum(), 1.2) == pytest.approx(-5.28, abs=0.1)

    def test_flat_spectrum_harmonic_clipped(self):
        # f1 = 2 Hz puts the harmonic window outside the band entirely.
        oracle = band_measure_oracle(2.0)
        assert oracle == pytest.approx(10 * np.log10(0.2 / 1.55), abs=1e-3)
        assert snr(flat_spectrum(), 2.0) == pytest.approx(oracle, abs=0.1)
        assert snr(flat_spectrum(), 2.0) == pytest.approx(-8.89, abs=0.1)

    def test_f1_outside_band_rejected(self):
        with pytest.raises(ValueError):
            snr(flat_spectrum(), 0.5)

    def test_scale_invariance(self):
        spec = welch_psd(np.random.default_rng(2).normal(0, 1, 900))
        for c in (1e-6, 0.5, 42.0):
            scaled = Spectrum(spec.freqs_hz, c * spec.power)
            assert snr(scaled, 1.3) == pytest.approx(snr(spec, 1.3), abs=1e-9)

    def test_partition_property(self):
        # B_sig and B_noise partition the band bins for every f1 in band.
        spec = flat_spectrum()
        band = spec.band_mask()
        for f1 in np.linspace(0.75, 2.5, 50):
            sig = signal_band_mask(spec.freqs_hz, f1)
            noise = band & ~sig
            assert not np.any(sig & noise)
            assert np.array_equal(sig | noise, band)
            assert np.all(sig <= band)  # sig never leaves the band

    def test_monotonicity(self):
        spec = flat_spectrum()
        base = snr(spec, 1.2)
        sig = signal_band_mask(spec.freqs_hz, 1.2)
        noise = spec.band_mask() & ~sig
        boosted_sig = spec.power.copy()
        boosted_sig[sig] += 1.0
        boosted_noise = spec.power.copy()
        boosted_noise[noise] += 1.0
        assert snr(Spectrum(spec.freqs_hz, boosted_sig), 1.2) > base
        assert snr(Spectrum(spec.freqs_hz, boosted_noise), 1.2) < base


class TestSpectrumValidation:
    def test_negative_power_rejected(self):
        freqs = np.arange(0.5, 3.01, 0.01)
        power = np.ones_like(freqs)
        power[3] = -0.1
        with pytest.raises(ValueError):
            Spectrum(freqs, power)

    def test_coarse_grid_rejected(self):
        freqs = np.arange(0.5, 3.01, 0.05)
        with pytest.raises(ValueError):
            Spectrum(freqs, np.ones_like(freqs))

    def test_band_coverage_required(self):
        freqs = np.arange(1.0, 2.0, 0.01)
        with pytest.raises(ValueError):
            Spectrum(freqs, np.ones_like(freqs))
