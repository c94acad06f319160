"""Corpus-level score normalization and the unified quality score.

Both branch scores are normalized over the whole scored corpus: outliers
are first clamped to the Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR]
(clamped, not dropped -- discarding videos is the sampler's job), then
min-max scaled to [0, 1]. The unified score is the alpha-weighted average
of the two normalized branch scores, so it is monotone in each branch and
always lies in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_ALPHA

IQR_FENCE = 1.5


@dataclass
class QualityRecord:
    """Per-video quality summary plus per-branch detail for the scores file."""

    video_id: str
    q_sig_raw: float
    q_sce_raw: float
    q_sig_norm: float = 0.0
    q_sce_norm: float = 0.0
    q_unified: float = 0.0
    flags: list = field(default_factory=list)
    source_tag: str = ""
    duration_s: float = 0.0
    native_fps: float = 0.0
    signal: dict = field(default_factory=dict)
    scene: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "source_tag": self.source_tag,
            "duration_s": self.duration_s,
            "native_fps": self.native_fps,
            "q_sig_raw": self.q_sig_raw,
            "q_sce_raw": self.q_sce_raw,
            "q_sig_norm": self.q_sig_norm,
            "q_sce_norm": self.q_sce_norm,
            "q_unified": self.q_unified,
            "flags": sorted(self.flags),
            "signal": self.signal,
            "scene": self.scene,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QualityRecord":
        return cls(
            video_id=d["video_id"],
            q_sig_raw=float(d["q_sig_raw"]),
            q_sce_raw=float(d["q_sce_raw"]),
            q_sig_norm=float(d.get("q_sig_norm", 0.0)),
            q_sce_norm=float(d.get("q_sce_norm", 0.0)),
            q_unified=float(d.get("q_unified", 0.0)),
            flags=list(d.get("flags", [])),
            source_tag=d.get("source_tag", ""),
            duration_s=float(d.get("duration_s", 0.0)),
            native_fps=float(d.get("native_fps", 0.0)),
            signal=d.get("signal", {}),
            scene=d.get("scene", {}),
        )


def iqr_truncate(values) -> np.ndarray:
    """Clamp values to the Tukey fences (linear-interpolation percentiles)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty value list")
    q1, q3 = np.percentile(values, [25.0, 75.0])
    iqr = q3 - q1
    return np.clip(values, q1 - IQR_FENCE * iqr, q3 + IQR_FENCE * iqr)


def minmax_norm(values) -> np.ndarray:
    """Min-max scale to [0, 1]; a zero-range input maps everything to 0.5."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty value list")
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full(values.shape, 0.5)
    return (values - lo) / (hi - lo)


def unify(records, alpha: float = DEFAULT_ALPHA) -> list:
    """Fill each record's normalized branch scores and unified score in place.

    Normalization is corpus-wide per branch (truncate, then min-max over
    all records together), so scores are comparable across videos.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    records = list(records)
    if not records:
        raise ValueError("empty corpus")
    sig_norm = minmax_norm(iqr_truncate([r.q_sig_raw for r in records]))
    sce_norm = minmax_norm(iqr_truncate([r.q_sce_raw for r in records]))
    for record, s, c in zip(records, sig_norm, sce_norm):
        record.q_sig_norm = float(s)
        record.q_sce_norm = float(c)
        record.q_unified = float(alpha * s + (1.0 - alpha) * c)
    return records
