"""Scene-level interference scoring.

Four scene-noise dimensions are rated per video -- head movement (0-3),
illumination (0-3), skin visibility (0-2), camera artifacts (0-2) -- and
summed into a raw scene score after scaling the camera dimension by the
frame-rate compensation factor min(native_fps, 30)/30, which penalizes
material upsampled from low frame rates.

Ratings come from a pluggable scorer:

- ``mock``: reads a per-video sidecar JSON ``{"head": .., "illumination":
  .., "skin": .., "camera": ..}`` located next to the trace file
  (``<trace stem>.scene.json``). Pure and offline; what the test suite and
  CI use.
- ``remote``: one chat-completions-style HTTP request per dimension with
  sampled frame images attached (read from a ``<trace stem>.frames/``
  sidecar directory), retry/backoff, and a shared rate limit.

Any scorer failure marks the video ``scene-unscored`` with a raw score of 0
rather than guessing: unvetted videos are never promoted.
"""

from __future__ import annotations

import base64
import json
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .config import ScorerConfig
from .trace_io import VideoEntry

DIMENSIONS = {
    "head": (0, 3),
    "illumination": (0, 3),
    "skin": (0, 2),
    "camera": (0, 2),
}

_PROMPT_DIR = Path(__file__).parent / "prompts"

_INT_TOKEN = re.compile(r"-?\d+")

# Appended once when a reply could not be parsed, before the single retry.
_REFORMAT_SUFFIX = "\n\nYour previous reply was not a bare integer. Reply with the integer score only."


class SceneScoringError(Exception):
    pass


class ScoreParseError(SceneScoringError):
    pass


def gamma_factor(native_fps: float) -> float:
    """Frame-rate compensation factor min(fps, 30)/30, in (0, 1]."""
    if native_fps <= 0:
        raise ValueError("native_fps must be > 0")
    return min(native_fps, 30.0) / 30.0


@dataclass
class SceneScores:
    head: int
    illumination: int
    skin: int
    camera_raw: int
    gamma: float
    q_sce_raw: float
    scorer_id: str
    unscored: bool = False
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "head": self.head,
            "illumination": self.illumination,
            "skin": self.skin,
            "camera_raw": self.camera_raw,
            "gamma": self.gamma,
            "q_sce_raw": self.q_sce_raw,
            "scorer_id": self.scorer_id,
            "unscored": self.unscored,
            "note": self.note,
        }


def combine_scene_scores(head: int, illumination: int, skin: int,
                         camera_raw: int, native_fps: float,
                         scorer_id: str) -> SceneScores:
    """Validate sub-score ranges and assemble the raw scene score."""
    for name, value in (("head", head), ("illumination", illumination),
                        ("skin", skin), ("camera", camera_raw)):
        lo, hi = DIMENSIONS[name]
        if not isinstance(value, int) or not lo <= value <= hi:
            raise SceneScoringError(f"{name} score {value!r} outside {lo}..{hi}")
    gamma = gamma_factor(native_fps)
    return SceneScores(
        head=head,
        illumination=illumination,
        skin=skin,
        camera_raw=camera_raw,
        gamma=gamma,
        q_sce_raw=head + illumination + skin + gamma * camera_raw,
        scorer_id=scorer_id,
    )


def unscored(entry: VideoEntry, scorer_id: str, note: str) -> SceneScores:
    """Fail-closed record for a video the scorer could not rate."""
    return SceneScores(
        head=0, illumination=0, skin=0, camera_raw=0,
        gamma=gamma_factor(entry.native_fps),
        q_sce_raw=0.0, scorer_id=scorer_id, unscored=True, note=note,
    )


def parse_scorer_reply(text: str, dimension: str) -> int:
    """First integer token inside the dimension's valid range.

    Rejects replies whose integer tokens are all out of range ("3" for a
    0-2 dimension) and replies with no integer token at all ("two").
    """
    lo, hi = DIMENSIONS[dimension]
    for token in _INT_TOKEN.findall(text):
        value = int(token)
        if lo <= value <= hi:
            return value
    raise ScoreParseError(f"no integer in {lo}..{hi} found in reply {text!r}")


def default_prompts() -> dict:
    return {
        name: (_PROMPT_DIR / f"{name}.txt").read_text(encoding="utf-8")
        for name in DIMENSIONS
    }


def _sidecar_path(entry: VideoEntry, suffix: str) -> Path:
    trace = entry.resolved_path if entry.resolved_path else Path(entry.trace_path)
    return trace.with_suffix("").with_name(trace.stem + suffix)


def scene_sidecar_path(entry: VideoEntry) -> Path:
    return _sidecar_path(entry, ".scene.json")


def frames_sidecar_dir(entry: VideoEntry) -> Path:
    return _sidecar_path(entry, ".frames")


class MockScorer:
    """Deterministic offline scorer reading per-video sidecar score files."""

    scorer_id = "mock"

    def __init__(self, config: ScorerConfig | None = None):
        self.config = config or ScorerConfig(kind="mock")

    def score_video(self, entry: VideoEntry, frames=None) -> SceneScores:
        sidecar = scene_sidecar_path(entry)
        try:
            raw = json.loads(sidecar.read_text(encoding="utf-8"))
            return combine_scene_scores(
                head=int(raw["head"]),
                illumination=int(raw["illumination"]),
                skin=int(raw["skin"]),
                camera_raw=int(raw["camera"]),
                native_fps=entry.native_fps,
                scorer_id=self.scorer_id,
            )
        except (OSError, ValueError, KeyError, TypeError, SceneScoringError) as exc:
            return unscored(entry, self.scorer_id, f"sidecar {sidecar.name}: {exc}")


class _RateLimiter:
    """Minimum-interval limiter shared across scoring workers."""

    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self):
        if self.interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self.interval
        if delay > 0:
            time.sleep(delay)


class RemoteScorer:
    """Chat-completions-style vision endpoint client.

    One request per dimension; image evidence is attached as base64 data
    URLs. HTTP failures retry with exponential backoff up to max_retries;
    an unparseable reply gets exactly one stricter re-ask. Anything still
    failing flags the video instead of raising.
    """

    def __init__(self, config: ScorerConfig, session=None, sleep=time.sleep):
        import os

        import requests

        if not config.endpoint_url:
            raise ValueError("remote scorer needs endpoint_url")
        self.config = config
        self.scorer_id = f"remote:{config.model_name or 'unnamed'}"
        self.prompts = dict(default_prompts())
        self.prompts.update(config.prompt_templates or {})
        missing = [d for d in DIMENSIONS if d not in self.prompts]
        if missing:
            raise ValueError(f"missing prompt templates for {missing}")
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep
        self._limiter = _RateLimiter(config.rate_limit)
        self._api_key = os.environ.get(config.api_key_env, "")

    def _gather_frames(self, entry: VideoEntry, frames) -> list:
        if frames:
            paths = [Path(f) for f in frames]
        else:
            directory = frames_sidecar_dir(entry)
            paths = sorted(directory.glob("*.jpg")) + sorted(directory.glob("*.png")) \
                if directory.is_dir() else []
        if not paths:
            return []
        budget = max(1, self.config.frame_budget)
        if len(paths) > budget:
            idx = [round(i * (len(paths) - 1) / (budget - 1)) for i in range(budget)]
            paths = [paths[i] for i in sorted(set(idx))]
        parts = []
        for p in paths:
            mime = "image/png" if p.suffix.lower() == ".png" else "image/jpeg"
            data = base64.b64encode(p.read_bytes()).decode("ascii")
            parts.append({
                "type": "image_url",
                "image_url": {"url": f"data:{mime};base64,{data}"},
            })
        return parts

    def _post(self, prompt: str, image_parts: list) -> str:
        import requests

        body = {
            "model": self.config.model_name,
            "messages": [{
                "role": "user",
                "content": [{"type": "text", "text": prompt}] + image_parts,
            }],
        }
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        last_error = None
        for attempt in range(self.config.max_retries + 1):
            self._limiter.wait()
            try:
                resp = self._session.post(
                    self.config.endpoint_url, json=body, headers=headers,
                    timeout=self.config.timeout_s,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < self.config.max_retries:
                    self._sleep(0.5 * 2 ** attempt)
        raise SceneScoringError(f"endpoint failed after retries: {last_error}")

    def _score_dimension(self, dimension: str, image_parts: list) -> int:
        prompt = self.prompts[dimension]
        reply = self._post(prompt, image_parts)
        try:
            return parse_scorer_reply(reply, dimension)
        except ScoreParseError:
            reply = self._post(prompt + _REFORMAT_SUFFIX, image_parts)
            return parse_scorer_reply(reply, dimension)

    def score_video(self, entry: VideoEntry, frames=None) -> SceneScores:
        image_parts = self._gather_frames(entry, frames)
        if not image_parts:
            return unscored(entry, self.scorer_id, "no frame evidence available")
        scores = {}
        try:
            for dimension in DIMENSIONS:
                scores[dimension] = self._score_dimension(dimension, image_parts)
        except (SceneScoringError, ScoreParseError) as exc:
            return unscored(entry, self.scorer_id, str(exc))
        return combine_scene_scores(
            head=scores["head"],
            illumination=scores["illumination"],
            skin=scores["skin"],
            camera_raw=scores["camera"],
            native_fps=entry.native_fps,
            scorer_id=self.scorer_id,
        )


def make_scorer(config: ScorerConfig, session=None):
    if config.kind == "mock":
        return MockScorer(config)
    return RemoteScorer(config, session=session)


def score_scene(entry: VideoEntry, frames, config: ScorerConfig) -> SceneScores:
    """Score one video's scene quality with the configured scorer."""
    return make_scorer(config).score_video(entry, frames)
