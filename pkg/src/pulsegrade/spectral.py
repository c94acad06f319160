"""Power spectral density estimation and band-ratio SNR.

The SNR follows de Haan & Jeanne (IEEE TBME 2013): the decibel ratio of
power inside narrow windows around the heart-rate fundamental and its
second harmonic (each +/- 0.1 Hz, clipped to the 0.75-2.5 Hz analysis
band) to the power in the remainder of the band. Results are clamped to
[-20, +20] dB so empty or single-line spectra stay finite.

PSDs come from Welch's method with 10 s Hann segments, 50% overlap, and
zero-padding to 4096 points, giving a grid step of 30/4096 ~ 0.0073 Hz --
fine enough that each 0.1 Hz half-window spans dozens of bins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import signal as sps

from .config import (
    BAND_MAX_HZ,
    BAND_MIN_HZ,
    CANONICAL_FPS,
    NO_PEAK_HZ,
    SNR_CEIL_DB,
    SNR_FLOOR_DB,
    SNR_WINDOW_HZ,
)

_SEGMENT_S = 10.0
_NFFT = 4096

MIN_SAMPLES = 64


@dataclass
class Spectrum:
    """One-sided PSD on a uniform grid, resolution <= 0.01 Hz over the band."""

    freqs_hz: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        self.freqs_hz = np.asarray(self.freqs_hz, dtype=float)
        self.power = np.asarray(self.power, dtype=float)
        if self.freqs_hz.shape != self.power.shape:
            raise ValueError("freqs_hz and power must have the same shape")
        if not np.all(np.isfinite(self.power)) or np.any(self.power < 0):
            raise ValueError("PSD values must be finite and nonnegative")
        step = np.diff(self.freqs_hz)
        if step.size and (np.any(step <= 0) or step.max() > 0.01 + 1e-12):
            raise ValueError("frequency grid must be increasing with step <= 0.01 Hz")
        if self.freqs_hz.size == 0 or self.freqs_hz[0] > 0.5 or self.freqs_hz[-1] < 3.0:
            raise ValueError("frequency grid must cover at least [0.5, 3.0] Hz")

    def band_mask(self) -> np.ndarray:
        return (self.freqs_hz >= BAND_MIN_HZ) & (self.freqs_hz <= BAND_MAX_HZ)


class PeakResult(NamedTuple):
    hz: float
    no_peak: bool


def welch_psd(samples, fs: float = CANONICAL_FPS) -> Spectrum:
    """Welch PSD of a pulse signal (accepts a PulseSignal or a plain array)."""
    x = np.asarray(getattr(samples, "samples", samples), dtype=float)
    if len(x) < MIN_SAMPLES:
        raise ValueError(f"signal has {len(x)} samples; need >= {MIN_SAMPLES}")
    nperseg = min(int(round(_SEGMENT_S * fs)), len(x))
    freqs, power = sps.welch(
        x,
        fs=fs,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        nfft=_NFFT,
        detrend="constant",
    )
    # Rounding noise in an all-zero or near-zero signal must not fake power.
    power = np.where(power < 0, 0.0, power)
    return Spectrum(freqs_hz=freqs, power=power)


def find_peak(spec: Spectrum) -> PeakResult:
    """Argmax frequency of the PSD restricted to the analysis band.

    An all-zero band yields the band midpoint flagged no_peak; consensus
    treats such peaks as ordinary outlier candidates.
    """
    band = spec.band_mask()
    if not band.any():
        raise ValueError("spectrum grid does not cover the analysis band")
    p = spec.power[band]
    if p.max() <= 0.0:
        return PeakResult(NO_PEAK_HZ, True)
    return PeakResult(float(spec.freqs_hz[band][np.argmax(p)]), False)


def signal_band_mask(freqs_hz: np.ndarray, f1: float) -> np.ndarray:
    """Bins whose centers fall in the fundamental/harmonic windows, in band.

    Windows are [f1 - 0.1, f1 + 0.1] and [2 f1 - 0.1, 2 f1 + 0.1], edges
    inclusive, intersected with [0.75, 2.5] Hz (the second harmonic window
    vanishes entirely once f1 > 1.3 Hz).
    """
    in_band = (freqs_hz >= BAND_MIN_HZ) & (freqs_hz <= BAND_MAX_HZ)
    near = np.abs(freqs_hz - f1) <= SNR_WINDOW_HZ
    near |= np.abs(freqs_hz - 2.0 * f1) <= SNR_WINDOW_HZ
    return in_band & near


def snr(spec: Spectrum, f1: float) -> float:
    """Band-ratio SNR in dB at fundamental f1, clamped to [-20, +20].

    The noise band is everything inside the analysis band but outside the
    signal windows, so the two masks partition the band for every valid f1.
    """
    if not BAND_MIN_HZ <= f1 <= BAND_MAX_HZ:
        raise ValueError(f"f1={f1} outside [{BAND_MIN_HZ}, {BAND_MAX_HZ}] Hz")
    sig_mask = signal_band_mask(spec.freqs_hz, f1)
    noise_mask = spec.band_mask() & ~sig_mask
    sig_power = spec.power[sig_mask].sum()
    noise_power = spec.power[noise_mask].sum()
    if sig_power <= 0.0:
        return SNR_FLOOR_DB
    if noise_power <= 0.0:
        return SNR_CEIL_DB
    return float(np.clip(10.0 * np.log10(sig_power / noise_power),
                         SNR_FLOOR_DB, SNR_CEIL_DB))
