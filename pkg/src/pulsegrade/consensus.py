"""Multi-method consensus for the signal-level quality score.

The per-method SNRs are combined as a weighted average where each method's
weight rewards agreement with its peers along two axes:

- frequency consistency: a RANSAC consensus over the per-method heart-rate
  peaks, mapped through a Gaussian kernel whose width adapts to the spread
  of the estimates;
- spectral correlation: mean squared Pearson correlation of a method's
  band-restricted, sum-normalized PSD with every other method's.

Weights are normalized to sum to one, so the fused score is a convex
combination of the per-method SNRs and comparable across videos.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .config import (
    BAND_MAX_HZ,
    BAND_MIN_HZ,
    DEFAULT_SEED,
    RANSAC_EPSILON_HZ,
    RANSAC_ITERATIONS,
    SNR_FLOOR_DB,
)
from . import spectral
from .methods import extract_all, normalize_methods
from .spectral import Spectrum, welch_psd
from .trace_io import RgbTrace

# Peak spreads below this count as exact agreement: every frequency weight
# is 1, the zero-deviation limit of the Gaussian kernel.
SIGMA_F_MIN_HZ = 1e-6


@dataclass
class MethodReport:
    method: str
    snr_db: float
    peak_hz: float
    no_peak: bool
    degenerate: bool
    w_f: float = 0.0
    w_s: float = 0.0
    w: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "snr_db": self.snr_db,
            "peak_hz": self.peak_hz,
            "no_peak": self.no_peak,
            "degenerate": self.degenerate,
            "w_f": self.w_f,
            "w_s": self.w_s,
            "w": self.w,
        }


@dataclass
class ConsensusReport:
    """Everything the signal branch concluded about one video."""

    video_id: str
    per_method: list  # of MethodReport
    consensus_hz: float
    sigma_f_hz: float
    q_sig_raw: float
    inlier_methods: list

    def to_json_dict(self) -> dict:
        return {
            "per_method": [m.to_json_dict() for m in self.per_method],
            "consensus_hz": self.consensus_hz,
            "sigma_f_hz": self.sigma_f_hz,
            "q_sig_raw": self.q_sig_raw,
            "inlier_methods": list(self.inlier_methods),
        }


def video_seed(seed: int, video_id: str) -> int:
    """Stable per-video RNG seed, independent of scoring order and platform."""
    return zlib.crc32(f"{seed}:{video_id}".encode("utf-8"))


def ransac_consensus(peaks, epsilon: float = RANSAC_EPSILON_HZ,
                     iterations: int = RANSAC_ITERATIONS,
                     seed: int = DEFAULT_SEED):
    """Robust consensus frequency over per-method peak estimates.

    Repeatedly averages a random size-min(2, M) subset as the hypothesis,
    collects the points within epsilon of it, and keeps the largest inlier
    set; the consensus is the median of those inliers (median of all points
    when no hypothesis attracted any). Returns (consensus_hz,
    inlier_indices); deterministic for a given seed.
    """
    peaks = np.asarray(peaks, dtype=float)
    m = len(peaks)
    if m == 0:
        raise ValueError("no peak estimates")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    s = min(2, m)
    rng = np.random.default_rng(seed)
    best: np.ndarray = np.array([], dtype=int)
    for _ in range(iterations):
        subset = rng.choice(m, size=s, replace=False)
        hypothesis = peaks[subset].mean()
        inliers = np.flatnonzero(np.abs(peaks - hypothesis) <= epsilon)
        if len(inliers) > len(best):
            best = inliers
    if len(best) > 0:
        consensus = float(np.median(peaks[best]))
        return consensus, best.tolist()
    return float(np.median(peaks)), []


def frequency_weights(peaks, consensus_hz: float, sigma_f: float) -> np.ndarray:
    """Gaussian-kernel agreement weights in [0, 1], one per peak."""
    peaks = np.asarray(peaks, dtype=float)
    if sigma_f < SIGMA_F_MIN_HZ:
        return np.ones_like(peaks)
    return np.exp(-((peaks - consensus_hz) ** 2) / (2.0 * sigma_f ** 2))


def _band_normalized(spec: Spectrum) -> np.ndarray:
    p = spec.power[spec.band_mask()]
    total = p.sum()
    if total <= 0.0:
        return np.zeros_like(p)
    return p / total


def spectral_weights(spectra) -> np.ndarray:
    """Mean squared pairwise Pearson correlation of band-normalized PSDs.

    Spectra must share one frequency grid. A zero-variance (flat or empty)
    normalized spectrum correlates 0 with everything, so its weight and its
    contribution to other methods' weights vanish. M = 1 returns {1.0}.
    """
    m = len(spectra)
    if m == 0:
        raise ValueError("no spectra")
    if m == 1:
        return np.ones(1)
    base = spectra[0].freqs_hz
    for spec in spectra[1:]:
        if spec.freqs_hz.shape != base.shape or not np.allclose(spec.freqs_hz, base):
            raise ValueError("spectra must share one frequency grid")

    rows = np.vstack([_band_normalized(s) for s in spectra])
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    # Rows are unit-sum, so anything at rounding scale is a flat spectrum.
    valid = norms > 1e-12
    corr = np.zeros((m, m))
    if valid.any():
        unit = np.zeros_like(centered)
        unit[valid] = centered[valid] / norms[valid, None]
        corr = unit @ unit.T
        corr[~valid, :] = 0.0
        corr[:, ~valid] = 0.0
    off_diag = corr ** 2
    np.fill_diagonal(off_diag, 0.0)
    return off_diag.sum(axis=1) / (m - 1)


def fuse_signal_score(snrs, w_f, w_s):
    """Normalized weighted average of per-method SNRs.

    Raw weights are w_f + w_s; an all-zero raw vector falls back to uniform
    so the score stays a convex combination of the inputs.
    """
    snrs = np.asarray(snrs, dtype=float)
    raw = np.asarray(w_f, dtype=float) + np.asarray(w_s, dtype=float)
    if len(raw) != len(snrs):
        raise ValueError("weight/SNR length mismatch")
    total = raw.sum()
    if total <= 0.0:
        weights = np.full(len(snrs), 1.0 / len(snrs))
    else:
        weights = raw / total
    return float(weights @ snrs), weights


def assess_signal(trace: RgbTrace, methods=None, seed: int = DEFAULT_SEED,
                  video_id: str = "",
                  epsilon_hz: float = RANSAC_EPSILON_HZ) -> ConsensusReport:
    """Full signal branch for one canonical-rate trace.

    Extraction -> PSD -> peak/SNR per method, then consensus, both weight
    families, and the fused score. Degenerate methods stay in the report
    with the -20 dB floor and a no-peak fallback peak, which the consensus
    step treats as outliers.
    """
    methods = normalize_methods(methods)
    pulses = extract_all(trace, methods, video_id)
    spectra = [welch_psd(p) for p in pulses]

    reports = []
    for pulse, spec in zip(pulses, spectra):
        peak = spectral.find_peak(spec)
        if pulse.degenerate:
            snr_db = SNR_FLOOR_DB
        else:
            snr_db = spectral.snr(spec, peak.hz)
        reports.append(MethodReport(
            method=pulse.method,
            snr_db=snr_db,
            peak_hz=peak.hz,
            no_peak=peak.no_peak,
            degenerate=pulse.degenerate,
        ))

    peaks = np.array([r.peak_hz for r in reports])
    consensus_hz, inlier_idx = ransac_consensus(
        peaks, epsilon=epsilon_hz, seed=video_seed(seed, video_id)
    )
    sigma_f = float(np.std(peaks))
    w_f = frequency_weights(peaks, consensus_hz, sigma_f)
    w_s = spectral_weights(spectra)
    q_sig_raw, weights = fuse_signal_score([r.snr_db for r in reports], w_f, w_s)

    for r, wf, ws, w in zip(reports, w_f, w_s, weights):
        r.w_f = float(wf)
        r.w_s = float(ws)
        r.w = float(w)

    return ConsensusReport(
        video_id=video_id,
        per_method=reports,
        consensus_hz=consensus_hz,
        sigma_f_hz=sigma_f,
        q_sig_raw=q_sig_raw,
        inlier_methods=[reports[i].method for i in inlier_idx],
    )
