"""Training-set curation from scored videos.

The adaptive strategy (``tas``) works in two stages: a ranking filter keeps
the top ceil(eta * target_size) videos by unified score, then videos are
drawn by a duration-aware softmax -- each candidate's logit is its score
times log(1 + T/T_mean), so longer videos are favored sublinearly -- with
stochastic rounding turning expected counts into integer selection counts.
Each selection cuts an independent uniform-random clip window.

Baselines: ``wrs`` (softmax over scores alone, whole corpus, no duration
factor), ``topk``/``bottomk`` (hard cutoff, whole videos), ``random``
(uniform without replacement, whole videos). Every strategy is a pure
function of (records, config, seed).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import SamplingConfig


class CurationError(ValueError):
    pass


@dataclass
class ClipEntry:
    video_id: str
    clip_start_s: float
    clip_end_s: float

    def to_json_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "clip_start_s": self.clip_start_s,
            "clip_end_s": self.clip_end_s,
        }


@dataclass
class CurationManifest:
    entries: list  # of ClipEntry
    strategy: str
    seed: int
    source_scores_digest: str
    flags: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def to_json_dict(self) -> dict:
        return {
            "entries": [e.to_json_dict() for e in self.entries],
            "strategy": self.strategy,
            "seed": self.seed,
            "source_scores_digest": self.source_scores_digest,
            "flags": self.flags,
        }


def scores_digest(records) -> str:
    """Content hash of the scored records backing a manifest."""
    payload = json.dumps(
        [r.to_json_dict() for r in sorted(records, key=lambda r: r.video_id)],
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _sorted_by_quality(records) -> list:
    # Descending unified score; id breaks ties so runs are reproducible.
    return sorted(records, key=lambda r: (-r.q_unified, r.video_id))


def rank_filter(records, eta: float, target_size: int) -> list:
    """Top ceil(eta * target_size) videos by unified score."""
    n_cand = math.ceil(eta * target_size)
    records = list(records)
    if len(records) < n_cand:
        raise CurationError(
            f"corpus has {len(records)} scored videos; candidate pool needs {n_cand}"
        )
    return _sorted_by_quality(records)[:n_cand]


def duration_factor(duration_s: float, mean_duration_s: float) -> float:
    """Sublinear duration boost log(1 + T/T_mean)."""
    if mean_duration_s <= 0:
        raise ValueError("mean_duration_s must be > 0")
    return math.log1p(duration_s / mean_duration_s)


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = np.exp(logits - logits.max())
    return z / z.sum()


def tas_probabilities(candidates, tau: float) -> np.ndarray:
    """Duration-aware softmax over (quality, duration) candidate pairs.

    candidates is a sequence of records with q_unified and duration_s.
    """
    if len(candidates) == 0:
        raise ValueError("no candidates")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    durations = np.array([c.duration_s for c in candidates], dtype=float)
    quality = np.array([c.q_unified for c in candidates], dtype=float)
    mean_t = durations.mean()
    lam = np.log1p(durations / mean_t)
    return _softmax(lam * quality / tau)


def wrs_probabilities(records, tau: float) -> np.ndarray:
    """Quality-only softmax over the full scored corpus (duration-blind)."""
    if len(records) == 0:
        raise ValueError("no records")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    quality = np.array([r.q_unified for r in records], dtype=float)
    return _softmax(quality / tau)


def stochastic_round_counts(p, target_size: int, rng) -> np.ndarray:
    """Integer selection counts with expectation p * target_size.

    floor(r) guaranteed selections plus one Bernoulli(frac(r)) extra, so the
    expected manifest size is exactly target_size.
    """
    p = np.asarray(p, dtype=float)
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    expected = p * target_size
    base = np.floor(expected)
    frac = expected - base
    extra = rng.random(len(p)) < frac
    return (base + extra).astype(int)


def _clip_window(record, clip_len_s: float, rng) -> ClipEntry:
    # Videos shorter than the clip length contribute their full span.
    length = min(clip_len_s, record.duration_s)
    start = float(rng.uniform(0.0, record.duration_s - length)) \
        if record.duration_s > length else 0.0
    return ClipEntry(record.video_id, start, start + length)


def _whole_video(record) -> ClipEntry:
    return ClipEntry(record.video_id, 0.0, record.duration_s)


def curate(records, config: SamplingConfig, digest: str | None = None) -> CurationManifest:
    """Build the target training manifest with the configured strategy."""
    records = list(records)
    if not records:
        raise CurationError("no scored videos")
    rng = np.random.default_rng(config.seed)
    entries: list = []

    if config.strategy == "tas":
        candidates = rank_filter(records, config.eta, config.target_size)
        p = tas_probabilities(candidates, config.tau)
        counts = stochastic_round_counts(p, config.target_size, rng)
        for record, count in zip(candidates, counts):
            for _ in range(count):
                entries.append(_clip_window(record, config.clip_len_s, rng))
    elif config.strategy == "wrs":
        p = wrs_probabilities(records, config.tau)
        counts = stochastic_round_counts(p, config.target_size, rng)
        for record, count in zip(records, counts):
            for _ in range(count):
                entries.append(_clip_window(record, config.clip_len_s, rng))
    elif config.strategy in ("topk", "bottomk"):
        if len(records) < config.target_size:
            raise CurationError(
                f"corpus has {len(records)} videos; need {config.target_size}"
            )
        ordered = _sorted_by_quality(records)
        chosen = ordered[:config.target_size] if config.strategy == "topk" \
            else ordered[-config.target_size:]
        entries = [_whole_video(r) for r in chosen]
    elif config.strategy == "random":
        if len(records) < config.target_size:
            raise CurationError(
                f"corpus has {len(records)} videos; need {config.target_size}"
            )
        ordered = sorted(records, key=lambda r: r.video_id)
        idx = rng.choice(len(ordered), size=config.target_size, replace=False)
        entries = [_whole_video(ordered[i]) for i in sorted(idx)]
    else:  # unreachable; SamplingConfig validates
        raise CurationError(f"unknown strategy {config.strategy!r}")

    flags = []
    seen = {}
    for e in entries:
        key = (e.video_id, round(e.clip_start_s, 9), round(e.clip_end_s, 9))
        if key in seen and f"duplicate-clip:{e.video_id}" not in flags:
            flags.append(f"duplicate-clip:{e.video_id}")
        seen[key] = True
    # Stochastic rounding keeps E[size] = target; a realized size beyond
    # 2 sqrt(target) of it deserves a second look.
    if config.strategy in ("tas", "wrs") and \
            abs(len(entries) - config.target_size) > 2 * math.sqrt(config.target_size):
        flags.append(f"size-deviation:{len(entries)}")

    return CurationManifest(
        entries=entries,
        strategy=config.strategy,
        seed=config.seed,
        source_scores_digest=digest if digest is not None else scores_digest(records),
        flags=flags,
    )
