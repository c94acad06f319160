"""Corpus manifests and per-video RGB trace files.

A corpus is described by a JSON manifest listing one entry per video; the
actual observations live in one CSV per video with the columns
``frame,timestamp_s,r_mean,g_mean,b_mean`` (UTF-8, ``.`` decimal separator).
Trace paths in the manifest are relative to the manifest's directory.

Loading validates everything the downstream analysis relies on: unique ids,
existing trace files, strictly increasing timestamps, finite channel values.
Short NaN dropouts (up to two consecutive samples) are patched by linear
interpolation; longer gaps reject the video.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .config import CANONICAL_FPS

TRACE_HEADER = ["frame", "timestamp_s", "r_mean", "g_mean", "b_mean"]

# Dropouts longer than this many consecutive NaN samples reject the video.
MAX_NAN_RUN = 2


class TraceIoError(Exception):
    """Base class for manifest and trace loading failures."""


class ManifestParseError(TraceIoError):
    pass


class DuplicateVideoIdError(TraceIoError):
    def __init__(self, video_id):
        super().__init__(f"duplicate video id {video_id!r} in manifest")
        self.video_id = video_id


class MissingTraceFileError(TraceIoError):
    def __init__(self, video_id, path):
        super().__init__(f"trace file for video {video_id!r} not found: {path}")
        self.video_id = video_id
        self.path = path


class TraceFormatError(TraceIoError):
    """Malformed trace CSV (bad header, bad row, NaN run too long, ...)."""


@dataclass
class VideoEntry:
    id: str
    trace_path: str
    duration_s: float
    native_fps: float
    source_tag: str = ""
    # Absolute trace location, filled in by load_manifest; not serialized.
    resolved_path: Path | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.id:
            raise ManifestParseError("video entry with empty id")
        if self.duration_s <= 0:
            raise ManifestParseError(f"video {self.id!r}: duration_s must be > 0")
        if self.native_fps <= 0:
            raise ManifestParseError(f"video {self.id!r}: native_fps must be > 0")

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d.pop("resolved_path")
        return d


@dataclass
class CorpusManifest:
    corpus_id: str
    videos: list  # of VideoEntry
    root: Path | None = field(default=None, compare=False, repr=False)

    def __len__(self):
        return len(self.videos)

    def entry(self, video_id: str) -> VideoEntry:
        for v in self.videos:
            if v.id == video_id:
                return v
        raise KeyError(video_id)


@dataclass
class RgbTrace:
    """Per-frame mean skin-region RGB with timestamps, all length N >= 2."""

    timestamps_s: np.ndarray
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.timestamps_s = np.asarray(self.timestamps_s, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = len(self.timestamps_s)
        if n < 2:
            raise TraceFormatError("trace needs at least 2 samples")
        if not (len(self.r) == len(self.g) == len(self.b) == n):
            raise TraceFormatError("channel arrays must match timestamp length")
        if np.any(np.diff(self.timestamps_s) <= 0):
            bad = int(np.argmax(np.diff(self.timestamps_s) <= 0)) + 1
            raise TraceFormatError(f"timestamps not strictly increasing at sample {bad}")
        for name, ch in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not np.all(np.isfinite(ch)):
                raise TraceFormatError(f"non-finite values in channel {name}")
        if not np.all(np.isfinite(self.timestamps_s)):
            raise TraceFormatError("non-finite timestamps")

    def __len__(self):
        return len(self.timestamps_s)

    @property
    def span_s(self) -> float:
        return float(self.timestamps_s[-1] - self.timestamps_s[0])

    def channels(self) -> np.ndarray:
        """Stack channels as a (3, N) array ordered r, g, b."""
        return np.vstack([self.r, self.g, self.b])


def load_manifest(path) -> CorpusManifest:
    """Load and validate a corpus manifest JSON file.

    Raises ManifestParseError / DuplicateVideoIdError / MissingTraceFileError,
    each naming the offending entry.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestParseError(f"cannot parse manifest {path}: {exc}") from exc

    if not isinstance(raw, dict) or "videos" not in raw:
        raise ManifestParseError(f"manifest {path} missing 'videos' list")
    corpus_id = raw.get("corpus_id", "")
    videos = []
    seen = set()
    for item in raw["videos"]:
        try:
            entry = VideoEntry(
                id=str(item["id"]),
                trace_path=str(item["trace_path"]),
                duration_s=float(item["duration_s"]),
                native_fps=float(item["native_fps"]),
                source_tag=str(item.get("source_tag", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestParseError(f"bad video entry {item!r}: {exc}") from exc
        if entry.id in seen:
            raise DuplicateVideoIdError(entry.id)
        seen.add(entry.id)
        entry.resolved_path = (path.parent / entry.trace_path).resolve()
        if not entry.resolved_path.is_file():
            raise MissingTraceFileError(entry.id, entry.resolved_path)
        videos.append(entry)
    return CorpusManifest(corpus_id=corpus_id, videos=videos, root=path.parent)


def save_manifest(manifest: CorpusManifest, path) -> None:
    """Write a manifest back to JSON. Round-trips load_manifest field-for-field."""
    payload = {
        "corpus_id": manifest.corpus_id,
        "videos": [v.to_json_dict() for v in manifest.videos],
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _patch_nan_runs(values: np.ndarray, column: str) -> np.ndarray:
    """Linearly interpolate NaN runs of length <= MAX_NAN_RUN; reject longer."""
    isnan = ~np.isfinite(values)
    if not isnan.any():
        return values
    # Locate maximal runs of consecutive NaNs.
    idx = np.flatnonzero(isnan)
    run_start = idx[np.r_[True, np.diff(idx) > 1]]
    run_end = idx[np.r_[np.diff(idx) > 1, True]]
    for s, e in zip(run_start, run_end):
        if e - s + 1 > MAX_NAN_RUN:
            raise TraceFormatError(
                f"column {column}: {e - s + 1} consecutive missing samples "
                f"at rows {s}..{e} (max {MAX_NAN_RUN})"
            )
        if s == 0 or e == len(values) - 1:
            raise TraceFormatError(
                f"column {column}: missing samples at trace boundary (rows {s}..{e})"
            )
    good = np.flatnonzero(~isnan)
    patched = values.copy()
    patched[isnan] = np.interp(idx, good, values[good])
    return patched


def load_trace(entry: VideoEntry, root=None) -> RgbTrace:
    """Load one video's trace CSV and validate it against the entry.

    root is the manifest directory; unnecessary when the entry came from
    load_manifest (its resolved_path is already set).
    """
    if entry.resolved_path is not None:
        trace_file = entry.resolved_path
    elif root is not None:
        trace_file = Path(root) / entry.trace_path
    else:
        trace_file = Path(entry.trace_path)
    if not Path(trace_file).is_file():
        raise MissingTraceFileError(entry.id, trace_file)

    ts, rs, gs, bs = [], [], [], []
    with open(trace_file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{trace_file}: empty file") from None
        if [h.strip() for h in header] != TRACE_HEADER:
            raise TraceFormatError(
                f"{trace_file}: bad header {header!r}, expected {TRACE_HEADER}"
            )
        for rownum, row in enumerate(reader, start=1):
            if len(row) != 5:
                raise TraceFormatError(f"{trace_file}: row {rownum}: expected 5 fields")
            try:
                t = float(row[1])
                rgb = [float(x) if x.strip() != "" else math.nan for x in row[2:5]]
            except ValueError as exc:
                raise TraceFormatError(f"{trace_file}: row {rownum}: {exc}") from exc
            if not math.isfinite(t):
                raise TraceFormatError(f"{trace_file}: row {rownum}: bad timestamp")
            for v in rgb:
                if math.isfinite(v) and v < 0:
                    raise TraceFormatError(
                        f"{trace_file}: row {rownum}: negative channel value {v}"
                    )
            ts.append(t)
            rs.append(rgb[0])
            gs.append(rgb[1])
            bs.append(rgb[2])

    if len(ts) < 2:
        raise TraceFormatError(f"{trace_file}: fewer than 2 samples")
    ts = np.asarray(ts)
    steps = np.diff(ts)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 1
        raise TraceFormatError(
            f"{trace_file}: non-monotone timestamp at row {bad + 1}"
        )
    r = _patch_nan_runs(np.asarray(rs), "r_mean")
    g = _patch_nan_runs(np.asarray(gs), "g_mean")
    b = _patch_nan_runs(np.asarray(bs), "b_mean")
    trace = RgbTrace(timestamps_s=ts, r=r, g=g, b=b)

    # Cross-check the manifest's claimed duration: must agree with the
    # observed span to within one frame period.
    span = trace.span_s
    if abs(entry.duration_s - span) > 1.0 / entry.native_fps + 1e-9:
        raise TraceFormatError(
            f"{trace_file}: duration_s {entry.duration_s} disagrees with "
            f"trace span {span:.6f} by more than one frame period"
        )
    return trace


def save_trace(trace: RgbTrace, path) -> None:
    """Write a trace in the canonical CSV schema."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for i in range(len(trace)):
            writer.writerow(
                [i, repr(float(trace.timestamps_s[i])), repr(float(trace.r[i])),
                 repr(float(trace.g[i])), repr(float(trace.b[i]))]
            )


def resample_30fps(trace: RgbTrace) -> RgbTrace:
    """Resample a trace onto a uniform grid at the canonical 30 Hz rate.

    The output grid starts at the first input timestamp and covers the
    trace's nominal duration N * mean_spacing, so a uniform input at some
    other rate maps onto round(N * dt * 30) samples (a 10 s clip stays
    10 s worth of samples regardless of native rate). Channel values come
    from linear interpolation, held at the edges; linear interpolation
    never overshoots the per-channel min/max.

    Already-uniform 30 Hz input reproduces itself to float round-off.
    """
    n_in = len(trace)
    t0 = trace.timestamps_s[0]
    mean_dt = trace.span_s / (n_in - 1)
    n_out = int(round(n_in * mean_dt * CANONICAL_FPS))
    n_out = max(n_out, 2)
    grid = t0 + np.arange(n_out) / CANONICAL_FPS
    channels = [
        np.interp(grid, trace.timestamps_s, ch) for ch in (trace.r, trace.g, trace.b)
    ]
    return RgbTrace(timestamps_s=grid, r=channels[0], g=channels[1], b=channels[2])
