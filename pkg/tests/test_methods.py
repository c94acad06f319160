import numpy as np
import pytest

from pulsegrade import synth
from pulsegrade.methods import (
    METHODS,
    TraceTooShortError,
    extract,
    extract_all,
    normalize_methods,
)
from pulsegrade.trace_io import RgbTrace

# Methods whose window-mean normalization makes the whole waveform (not
# just the peak) invariant to positive scaling of the input.
NORMALIZING = ("ica", "chrom", "lgi", "pbv", "pos", "omit")


def fft_peak_hz(x, fs=30.0):
    spec = np.abs(np.fft.rfft(np.asarray(x) - np.mean(x))) ** 2
    freqs = np.fft.rfftfreq(len(x), d=1.0 / fs)
    band = (freqs >= 0.75) & (freqs <= 2.5)
    return freqs[band][np.argmax(spec[band])], freqs[1] - freqs[0]


def green_only_trace(n=900, f=1.2):
    t = np.arange(n) / 30.0
    g = 1.0 + 0.01 * np.sin(2 * np.pi * f * t)
    return RgbTrace(t, np.ones(n), g, np.ones(n))


def constant_trace(n=300):
    t = np.arange(n) / 30.0
    return RgbTrace(t, np.ones(n), np.ones(n), np.ones(n))


class TestExtract:
    def test_green_sinusoid_peak(self):
        pulse = extract(green_only_trace(), "green")
        assert not pulse.degenerate
        peak, bin_width = fft_peak_hz(pulse.samples)
        assert abs(peak - 1.2) <= bin_width

    def test_constant_trace_degenerate_all_methods(self):
        trace = constant_trace()
        for method in METHODS:
            pulse = extract(trace, method)
            assert pulse.degenerate
            assert np.all(pulse.samples == 0.0)

    def test_skin_tone_trace_pos_chrom_peak(self):
        trace = synth.generate(synth.clean_spec(hr_bpm=72, seed=5))
        for method in ("pos", "chrom"):
            pulse = extract(trace, method)
            assert not pulse.degenerate
            peak, bin_width = fft_peak_hz(pulse.samples)
            assert abs(peak - 1.2) <= bin_width

    def test_output_length_matches_input(self):
        trace = synth.generate(synth.clean_spec(seed=2, duration_s=11.3))
        for method in METHODS:
            assert len(extract(trace, method)) == len(trace)

    def test_zero_mean_invariant(self):
        trace = synth.generate(synth.clean_spec(seed=4))
        for method in METHODS:
            pulse = extract(trace, method)
            if not pulse.degenerate:
                assert abs(pulse.samples.mean()) < 1e-6 * pulse.samples.std()

    def test_too_short_trace(self):
        t = np.arange(63) / 30.0
        trace = RgbTrace(t, np.ones(63), np.ones(63), np.ones(63))
        with pytest.raises(TraceTooShortError):
            extract(trace, "green")

    def test_non_canonical_rate_rejected(self):
        t = np.arange(200) / 25.0
        trace = RgbTrace(t, np.ones(200), np.ones(200), np.ones(200))
        with pytest.raises(ValueError, match="30 Hz"):
            extract(trace, "green")

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown method"):
            extract(green_only_trace(), "magic")

    def test_determinism_bit_identical(self):
        trace = synth.generate(synth.clean_spec(seed=9))
        for method in METHODS:
            a = extract(trace, method)
            b = extract(trace, method)
            assert np.array_equal(a.samples, b.samples)

    @pytest.mark.parametrize("scale", [0.5, 3.0, 100.0])
    def test_scale_invariance(self, scale):
        trace = synth.generate(synth.clean_spec(seed=6))
        scaled = RgbTrace(trace.timestamps_s, scale * trace.r, scale * trace.g,
                          scale * trace.b)
        for method in METHODS:
            a = extract(trace, method)
            b = extract(scaled, method)
            peak_a, _ = fft_peak_hz(a.samples)
            peak_b, _ = fft_peak_hz(b.samples)
            assert peak_a == peak_b, method
            if method in NORMALIZING:
                # identical up to global sign and amplitude
                corr = np.corrcoef(a.samples, b.samples)[0, 1]
                assert abs(corr) > 1.0 - 1e-9, method


class TestExtractAll:
    def test_all_seven(self):
        trace = synth.generate(synth.clean_spec(seed=0))
        pulses = extract_all(trace)
        assert [p.method for p in pulses] == list(METHODS)
        assert len({len(p) for p in pulses}) == 1

    def test_singleton_set(self):
        trace = green_only_trace()
        pulses = extract_all(trace, ("green",))
        assert len(pulses) == 1 and pulses[0].method == "green"

    def test_constant_trace_all_degenerate(self):
        pulses = extract_all(constant_trace())
        assert len(pulses) == 7
        assert all(p.degenerate for p in pulses)


class TestMethodSet:
    def test_default_is_all_seven(self):
        assert normalize_methods(None) == METHODS
        assert normalize_methods(()) == METHODS

    def test_order_preserved(self):
        assert normalize_methods(("pos", "green")) == ("pos", "green")

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            normalize_methods(("pos", "pos"))

    def test_unknown_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            normalize_methods(("pos", "nope"))
