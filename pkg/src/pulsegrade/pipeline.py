"""Corpus-level scoring: fan out per-video work, fuse, and serialize.

One JSON record per video goes to the scores file (JSONL, sorted by video
id so the output is identical regardless of worker scheduling). Videos that
hit a per-method degeneracy or an unscorable scene are kept, scored
conservatively, and flagged; unreadable inputs abort the run.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import DEFAULT_ALPHA, DEFAULT_SEED, ScorerConfig
from .consensus import assess_signal
from .fusion import QualityRecord, unify
from .scene import make_scorer
from .trace_io import CorpusManifest, VideoEntry, load_trace, resample_30fps

log = logging.getLogger("pulsegrade")


def score_video(entry: VideoEntry, scorer, methods=None,
                seed: int = DEFAULT_SEED) -> QualityRecord:
    """Run both branches for one video; raw scores only (normalize later)."""
    trace = resample_30fps(load_trace(entry))
    signal_report = assess_signal(trace, methods=methods, seed=seed,
                                  video_id=entry.id)
    scene_scores = scorer.score_video(entry)

    flags = [f"degenerate:{m.method}" for m in signal_report.per_method
             if m.degenerate]
    if scene_scores.unscored:
        flags.append("scene-unscored")

    return QualityRecord(
        video_id=entry.id,
        q_sig_raw=signal_report.q_sig_raw,
        q_sce_raw=scene_scores.q_sce_raw,
        flags=flags,
        source_tag=entry.source_tag,
        duration_s=entry.duration_s,
        native_fps=entry.native_fps,
        signal=signal_report.to_json_dict(),
        scene=scene_scores.to_json_dict(),
    )


def score_corpus(manifest: CorpusManifest, methods=None,
                 alpha: float = DEFAULT_ALPHA,
                 scorer_config: ScorerConfig | None = None,
                 parallelism: int = 1, seed: int = DEFAULT_SEED) -> list:
    """Score every video in a corpus and return unified QualityRecords.

    Records come back sorted by video id with normalized branch scores and
    the unified score filled in. Raises on empty corpora and on unreadable
    traces; flagged-but-scoreable videos are the caller's to inspect via
    record.flags.
    """
    if len(manifest) == 0:
        raise ValueError("corpus has no videos to score")
    scorer = make_scorer(scorer_config or ScorerConfig(kind="mock"))

    def work(entry):
        record = score_video(entry, scorer, methods=methods, seed=seed)
        log.info("scored %s: q_sig_raw=%.2f dB q_sce_raw=%.2f%s",
                 entry.id, record.q_sig_raw, record.q_sce_raw,
                 " [" + ",".join(record.flags) + "]" if record.flags else "")
        return record

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(work, manifest.videos))
    else:
        records = [work(entry) for entry in manifest.videos]

    records.sort(key=lambda r: r.video_id)
    return unify(records, alpha=alpha)


def write_scores(records, path) -> None:
    """Serialize records as one sorted, canonical JSON object per line."""
    lines = [json.dumps(r.to_json_dict(), sort_keys=True) for r in records]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_scores(path) -> list:
    records = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(QualityRecord.from_json_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: bad scores record: {exc}") from exc
    return records
