"""Pipeline defaults and run configuration.

All tunables live here so that library calls, the CLI, and the test suite
share one source of truth. Values can be overridden per run via a plain
``key = value`` config file (see :func:`parse_config_file`) or CLI flags;
flags win over the file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

# Canonical sampling rate every trace is resampled to before analysis.
CANONICAL_FPS = 30.0

# Heart-rate analysis band, Hz. All spectral accounting is restricted here.
BAND_MIN_HZ = 0.75
BAND_MAX_HZ = 2.5

# Half-width of the signal windows around the fundamental and its second
# harmonic when computing band-ratio SNR.
SNR_WINDOW_HZ = 0.1

# SNR is clamped to this range so degenerate spectra cannot dominate fusion.
SNR_FLOOR_DB = -20.0
SNR_CEIL_DB = 20.0

# Consensus of per-method heart-rate estimates: inlier tolerance (5 bpm)
# and iteration budget. 100 iterations far exceeds the <=21 distinct pairs
# available with at most 7 methods.
RANSAC_EPSILON_HZ = 5.0 / 60.0
RANSAC_ITERATIONS = 100

# Fallback peak reported for an empty spectrum: the analysis-band midpoint.
NO_PEAK_HZ = 0.5 * (BAND_MIN_HZ + BAND_MAX_HZ)

# Fusion weight between the signal branch and the scene branch.
DEFAULT_ALPHA = 0.8

DEFAULT_SEED = 0


@dataclass
class SamplingConfig:
    """Settings for training-set curation.

    eta is the candidate-pool multiplier (pool size = ceil(eta * target_size)),
    tau the softmax temperature, clip_len_s the length of the window cut from
    a video each time it is selected.
    """

    strategy: str = "tas"
    target_size: int = 140
    eta: float = 2.0
    tau: float = 1.0
    clip_len_s: float = 10.0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.strategy not in ("tas", "wrs", "topk", "bottomk", "random"):
            raise ValueError(f"unknown sampling strategy: {self.strategy!r}")
        if self.target_size < 1:
            raise ValueError("target_size must be >= 1")
        if self.eta <= 1.0:
            raise ValueError("eta must be > 1")
        if self.tau <= 0.0:
            raise ValueError("tau must be > 0")
        if self.clip_len_s <= 0.0:
            raise ValueError("clip_len_s must be > 0")


@dataclass
class ScorerConfig:
    """Scene-scorer selection and remote-endpoint settings.

    kind is ``mock`` (reads per-video sidecar JSON, fully offline) or
    ``remote`` (chat-completions-style HTTP endpoint with frame images).
    prompt_templates maps each scene dimension to its instruction text;
    defaults ship with the package (see :mod:`pulsegrade.scene`).
    """

    kind: str = "mock"
    endpoint_url: str = ""
    model_name: str = ""
    api_key_env: str = "PULSEGRADE_API_KEY"
    prompt_templates: dict = field(default_factory=dict)
    frame_budget: int = 8
    timeout_s: float = 30.0
    max_retries: int = 3
    rate_limit: float = 2.0  # requests per second, shared across workers

    def __post_init__(self):
        if self.kind not in ("mock", "remote"):
            raise ValueError(f"unknown scorer kind: {self.kind!r}")


@dataclass
class RunConfig:
    """Everything a full score/sample run needs."""

    manifest_path: str = ""
    scores_path: str = "scores.jsonl"
    methods: tuple = ()  # empty means all seven
    alpha: float = DEFAULT_ALPHA
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    parallelism: int = 1
    seed: int = DEFAULT_SEED
    log_level: str = "INFO"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


def parse_config_file(path) -> dict:
    """Parse a ``key = value`` config file into a string->string dict.

    Blank lines and lines starting with ``#`` are ignored. Keys use the
    same names as the CLI flags with dashes replaced by underscores
    (e.g. ``target_size = 200``). Values are kept as strings; the CLI
    layer coerces them alongside flag values.
    """
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out
