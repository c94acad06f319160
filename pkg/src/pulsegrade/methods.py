"""Conventional rPPG pulse-extraction algorithms.

Seven classical methods map a (3, N) mean-RGB trace at the canonical 30 Hz
rate to a single pulse waveform:

- GREEN: Verkruysse, Svaasand & Nelson, "Remote plethysmographic imaging
  using ambient light", Opt. Express 2008.
- ICA: Poh, McDuff & Picard, "Advancements in noncontact ... cardiopulmonary
  measurements using a webcam", IEEE TBME 2011 (FastICA variant).
- CHROM: de Haan & Jeanne, "Robust pulse rate from chrominance-based rPPG",
  IEEE TBME 2013.
- LGI: Pilz et al., "Local group invariance for heart rate estimation from
  face videos in the wild", CVPRW 2018.
- PBV: de Haan & van Leest, "Improved motion robustness of remote-PPG by
  using the blood volume pulse signature", Physiol. Meas. 2014.
- POS: Wang et al., "Algorithmic principles of remote PPG", IEEE TBME 2017.
- OMIT: Casado & Bordallo Lopez, "Face2PPG: an unsupervised pipeline for
  blood volume pulse extraction from faces", 2023 (QR orthogonalization).

Shared conventions: window-local channel normalization c / mean(c), a final
zero-phase 4th-order Butterworth band-pass over 0.75-2.5 Hz, and exact mean
removal. Every division is guarded; a guard trip emits zeros for that window
so broken inputs degrade to an all-zeros signal flagged ``degenerate``
instead of propagating NaNs. All methods are deterministic, including ICA
(fixed identity initialization, no RNG).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .config import BAND_MAX_HZ, BAND_MIN_HZ, CANONICAL_FPS
from .trace_io import RgbTrace

METHODS = ("green", "ica", "chrom", "lgi", "pbv", "pos", "omit")

MIN_SAMPLES = 64  # ~2.1 s, the shortest window the spectral stage accepts

_EPS = 1e-12
_WINDOW_S = 1.6

_BANDPASS_SOS = sps.butter(
    4, [BAND_MIN_HZ, BAND_MAX_HZ], btype="bandpass", fs=CANONICAL_FPS, output="sos"
)

# Unit-norm blood-volume signature (relative pulsatile amplitude of r, g, b).
_PBV_SIGNATURE = np.array([0.33, 0.77, 0.53])
_PBV_SIGNATURE = _PBV_SIGNATURE / np.linalg.norm(_PBV_SIGNATURE)


class TraceTooShortError(ValueError):
    pass


@dataclass
class PulseSignal:
    """One method's extracted pulse waveform at 30 Hz.

    Zero mean, same length as the input trace; ``degenerate`` marks signals
    where the method's guards collapsed the output to all zeros.
    """

    samples: np.ndarray
    method: str
    video_id: str = ""
    degenerate: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)

    def __len__(self):
        return len(self.samples)


def normalize_methods(methods=None) -> tuple:
    """Validate a method selection; None or empty selects all seven."""
    if not methods:
        return METHODS
    out = tuple(methods)
    unknown = [m for m in out if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s): {unknown}; valid: {list(METHODS)}")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate methods in {out}")
    return out


def _window_starts(n: int, w: int, hop: int) -> list:
    starts = list(range(0, n - w + 1, hop))
    if not starts:
        return [0]
    if starts[-1] + w < n:
        starts.append(n - w)  # align final window to the end
    return starts


def _norm_window(seg: np.ndarray) -> np.ndarray | None:
    """Divide each channel by its window mean; None when a mean underflows."""
    means = seg.mean(axis=1)
    if np.any(np.abs(means) < _EPS):
        return None
    return seg / means[:, None]


def _green(c: np.ndarray) -> np.ndarray:
    return c[1] - c[1].mean()


def _chrom(c: np.ndarray) -> np.ndarray:
    n = c.shape[1]
    w = min(int(round(_WINDOW_S * CANONICAL_FPS)), n)
    hop = max(w // 2, 1)
    hann = np.hanning(w)
    out = np.zeros(n)
    for start in _window_starts(n, w, hop):
        cn = _norm_window(c[:, start:start + w])
        if cn is None:
            continue
        x = 3.0 * cn[0] - 2.0 * cn[1]
        y = 1.5 * cn[0] + cn[1] - 1.5 * cn[2]
        sy = y.std()
        if sy < _EPS:
            continue
        s = x - (x.std() / sy) * y
        out[start:start + w] += hann * (s - s.mean())
    return out


def _pos(c: np.ndarray) -> np.ndarray:
    n = c.shape[1]
    w = min(int(round(_WINDOW_S * CANONICAL_FPS)), n)
    out = np.zeros(n)
    for end in range(w, n + 1):
        cn = _norm_window(c[:, end - w:end])
        if cn is None:
            continue
        s1 = cn[1] - cn[2]
        s2 = cn[1] + cn[2] - 2.0 * cn[0]
        sd2 = s2.std()
        if sd2 < _EPS:
            continue
        h = s1 + (s1.std() / sd2) * s2
        out[end - w:end] += h - h.mean()
    return out


def _pbv(c: np.ndarray) -> np.ndarray:
    n = c.shape[1]
    w = min(int(round(_WINDOW_S * CANONICAL_FPS)), n)
    hop = max(w // 2, 1)
    hann = np.hanning(w)
    out = np.zeros(n)
    for start in _window_starts(n, w, hop):
        cn = _norm_window(c[:, start:start + w])
        if cn is None:
            continue
        cn = cn - cn.mean(axis=1, keepdims=True)
        q = cn @ cn.T
        k, *_ = np.linalg.lstsq(q, _PBV_SIGNATURE, rcond=None)
        denom = float(_PBV_SIGNATURE @ k)
        if abs(denom) < _EPS:
            continue
        s = (k @ cn) / denom
        out[start:start + w] += hann * (s - s.mean())
    return out


def _lgi(c: np.ndarray) -> np.ndarray:
    # SVD needs more averaging than the chrominance windows: with 1.6 s
    # windows the leading direction wobbles on weak signals and the
    # overlap-add decoheres the pulse, so LGI uses 10 s windows.
    n = c.shape[1]
    w = min(int(round(10.0 * CANONICAL_FPS)), n)
    hop = max(w // 2, 1)
    hann = np.hanning(w)
    out = np.zeros(n)
    for start in _window_starts(n, w, hop):
        cn = _norm_window(c[:, start:start + w])
        if cn is None:
            continue
        u, _, _ = np.linalg.svd(cn, full_matrices=False)
        proj = np.eye(3) - np.outer(u[:, 0], u[:, 0])
        f = proj @ cn
        s = f[np.argmax(f.var(axis=1))]
        out[start:start + w] += hann * (s - s.mean())
    return out


def _omit(c: np.ndarray) -> np.ndarray:
    means = c.mean(axis=1)
    if np.any(np.abs(means) < _EPS):
        return np.zeros(c.shape[1])
    cn = c / means[:, None]
    q, _ = np.linalg.qr(cn)
    proj = np.eye(3) - np.outer(q[:, 0], q[:, 0])
    y = proj @ cn
    return y[1] - y[1].mean()


def _periodogram_band_ratio(x: np.ndarray) -> float:
    """Peak-to-total power ratio inside the analysis band (component picker)."""
    spec = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(len(x), d=1.0 / CANONICAL_FPS)
    band = (freqs >= BAND_MIN_HZ) & (freqs <= BAND_MAX_HZ)
    total = spec[band].sum()
    if total < _EPS:
        return 0.0
    return float(spec[band].max() / total)


def _ica(c: np.ndarray, max_iter: int = 200, tol: float = 1e-6) -> np.ndarray:
    n = c.shape[1]
    means = c.mean(axis=1)
    if np.any(np.abs(means) < _EPS):
        return np.zeros(n)
    x = c / means[:, None] - 1.0

    # Whitening via eigendecomposition of the channel covariance.
    cov = (x @ x.T) / n
    eigval, eigvec = np.linalg.eigh(cov)
    top = eigval.max()
    if top < _EPS:
        return np.zeros(n)
    scale = np.where(eigval > top * 1e-12, 1.0 / np.sqrt(np.maximum(eigval, top * 1e-12)), 0.0)
    z = (scale[:, None] * eigvec.T) @ x

    def _decorrelate(w):
        s, u = np.linalg.eigh(w @ w.T)
        s = np.maximum(s, _EPS)
        return (u @ np.diag(1.0 / np.sqrt(s)) @ u.T) @ w

    # Symmetric FastICA with tanh contrast and fixed identity start, so two
    # runs on the same trace are bit-identical. The update is damped: the
    # undamped symmetric iteration oscillates on near-Gaussian sources, and
    # damping stabilizes it without moving the fixed points.
    w = _decorrelate(np.eye(3))
    for _ in range(max_iter):
        wx = w @ z
        g = np.tanh(wx)
        g_prime = 1.0 - g ** 2
        w_star = (g @ z.T) / n - np.diag(g_prime.mean(axis=1)) @ w
        w_new = _decorrelate(0.5 * w + 0.5 * w_star)
        delta = np.max(np.abs(np.abs(np.einsum("ij,ij->i", w_new, w)) - 1.0))
        w = w_new
        if delta < tol:
            break

    comps = w @ z
    ratios = [_periodogram_band_ratio(comp) for comp in comps]
    return comps[int(np.argmax(ratios))]


_METHOD_FUNCS = {
    "green": _green,
    "ica": _ica,
    "chrom": _chrom,
    "lgi": _lgi,
    "pbv": _pbv,
    "pos": _pos,
    "omit": _omit,
}


def _check_canonical(trace: RgbTrace) -> None:
    dt = np.diff(trace.timestamps_s)
    if np.max(np.abs(dt - 1.0 / CANONICAL_FPS)) > 1e-6:
        raise ValueError("trace is not uniform at 30 Hz; resample_30fps it first")


def extract(trace: RgbTrace, method: str, video_id: str = "") -> PulseSignal:
    """Run one extraction method on a canonical-rate trace.

    The result has the trace's length, exactly zero mean, and is flagged
    degenerate (all zeros) when the method's guards fired everywhere, e.g.
    on a constant trace.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if len(trace) < MIN_SAMPLES:
        raise TraceTooShortError(
            f"trace has {len(trace)} samples; need >= {MIN_SAMPLES}"
        )
    _check_canonical(trace)

    try:
        raw = _METHOD_FUNCS[method](trace.channels())
    except np.linalg.LinAlgError:
        raw = None
    if raw is None or not np.all(np.isfinite(raw)):
        return PulseSignal(np.zeros(len(trace)), method, video_id, degenerate=True)

    filtered = sps.sosfiltfilt(_BANDPASS_SOS, raw)
    if not np.all(np.isfinite(filtered)) or filtered.std() <= _EPS:
        return PulseSignal(np.zeros(len(trace)), method, video_id, degenerate=True)
    return PulseSignal(filtered - filtered.mean(), method, video_id)


def extract_all(trace: RgbTrace, methods=None, video_id: str = "") -> list:
    """Apply a method set in order; per-method failures become degenerate signals."""
    out = []
    for m in normalize_methods(methods):
        try:
            out.append(extract(trace, m, video_id))
        except (FloatingPointError, np.linalg.LinAlgError):
            out.append(PulseSignal(np.zeros(len(trace)), m, video_id, degenerate=True))
    return out
