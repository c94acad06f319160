"""Synthetic RGB traces with known ground truth.

The generator is the oracle for the whole signal path: the pulse frequency,
noise level, and confounders are all chosen by the caller, so tests can
assert what every stage must recover. Construction:

- skin-tone DC levels r=0.7, g=0.5, b=0.4 (arbitrary linear units);
- a pulse waveform (fundamental + optional second harmonic) modulates each
  channel multiplicatively with gains g:r:b = 1 : 0.5 : 0.3, mirroring the
  stronger green absorption of hemoglobin;
- additive white Gaussian sensor noise, seeded;
- optional common-mode flicker: the same absolute sinusoid added to all
  three channels (an illumination confounder with no physiological basis);
- optional motion events: step discontinuities of 5% of each channel's DC
  level at random instants, random sign.

Identical spec + seed produces a bit-identical trace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .trace_io import CorpusManifest, RgbTrace, load_manifest, save_trace

DC_LEVELS = {"r": 0.7, "g": 0.5, "b": 0.4}
PULSE_GAINS = {"r": 0.5, "g": 1.0, "b": 0.3}
MOTION_STEP_FRACTION = 0.05

# Scene sidecar written for specs that do not override it: an unremarkable,
# clean recording.
PERFECT_SCENE = {"head": 3, "illumination": 3, "skin": 2, "camera": 2}


@dataclass
class SynthSpec:
    hr_bpm: float = 72.0
    pulse_amp: float = 0.01
    harmonic2_amp: float = 0.3  # relative to the fundamental
    noise_sigma: float = 0.005
    flicker_hz: float | None = None
    flicker_amp: float = 0.0
    motion_events: int = 0
    duration_s: float = 30.0
    fps: float = 30.0
    seed: int = 0
    name: str = ""
    source_tag: str = "synth"
    scene: dict = field(default_factory=lambda: dict(PERFECT_SCENE))

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be > 0")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be > 0")
        if self.pulse_amp > 0 and not 45.0 <= self.hr_bpm <= 150.0:
            raise ValueError("hr_bpm must lie in [45, 150] when a pulse is present")


def generate(spec: SynthSpec) -> RgbTrace:
    """Render a spec to an RGB trace; deterministic per (spec, seed)."""
    n = int(round(spec.duration_s * spec.fps))
    t = np.arange(n) / spec.fps
    rng = np.random.default_rng(spec.seed)

    wave = np.zeros(n)
    if spec.pulse_amp > 0:
        f0 = spec.hr_bpm / 60.0
        wave = np.sin(2 * np.pi * f0 * t) \
            + spec.harmonic2_amp * np.sin(2 * np.pi * 2 * f0 * t)

    channels = {}
    for name in ("r", "g", "b"):
        dc = DC_LEVELS[name]
        channels[name] = dc * (1.0 + spec.pulse_amp * PULSE_GAINS[name] * wave)

    # Noise is drawn channel by channel in a fixed order so the seed fully
    # determines the trace.
    if spec.noise_sigma > 0:
        for name in ("r", "g", "b"):
            channels[name] = channels[name] + rng.normal(0.0, spec.noise_sigma, n)

    if spec.flicker_hz is not None and spec.flicker_amp > 0:
        flicker = spec.flicker_amp * np.sin(2 * np.pi * spec.flicker_hz * t)
        for name in ("r", "g", "b"):
            channels[name] = channels[name] + flicker

    for _ in range(spec.motion_events):
        at = int(rng.integers(1, n))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        for name in ("r", "g", "b"):
            step = np.zeros(n)
            step[at:] = sign * MOTION_STEP_FRACTION * DC_LEVELS[name]
            channels[name] = channels[name] + step

    return RgbTrace(
        timestamps_s=t,
        r=np.maximum(channels["r"], 0.0),
        g=np.maximum(channels["g"], 0.0),
        b=np.maximum(channels["b"], 0.0),
    )


def make_corpus(specs, out_dir, corpus_id: str = "synth") -> CorpusManifest:
    """Write trace CSVs, scene sidecars, and a manifest; return it validated.

    Every spec becomes one video (ids default to v000, v001, ...). The
    result round-trips through the normal loaders, so a generated corpus is
    indistinguishable from a real one to the rest of the pipeline.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, spec in enumerate(specs):
        vid = spec.name or f"v{i:03d}"
        trace = generate(spec)
        trace_name = f"{vid}.csv"
        save_trace(trace, out_dir / trace_name)
        sidecar = dict(PERFECT_SCENE)
        sidecar.update(spec.scene or {})
        (out_dir / f"{vid}.scene.json").write_text(
            json.dumps(sidecar, sort_keys=True) + "\n", encoding="utf-8"
        )
        entries.append({
            "id": vid,
            "trace_path": trace_name,
            "duration_s": len(trace) / spec.fps,
            "native_fps": spec.fps,
            "source_tag": spec.source_tag,
        })
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps({"corpus_id": corpus_id, "videos": entries},
                   indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return load_manifest(manifest_path)


# Stress-scenario factories. These pin down the regimes the test suite and
# the synth CLI exercise; amplitudes are chosen so each scenario lands
# clearly on its intended side of the quality scale.

def clean_spec(hr_bpm: float = 72.0, seed: int = 0, **kw) -> SynthSpec:
    """Healthy recording: visible pulse, mild sensor noise, clean scene."""
    return SynthSpec(hr_bpm=hr_bpm, pulse_amp=0.01, noise_sigma=0.005,
                     seed=seed, **kw)


def pure_noise_spec(seed: int = 0, **kw) -> SynthSpec:
    """No pulse at all, only sensor noise; the signal branch must score it low."""
    return SynthSpec(pulse_amp=0.0, noise_sigma=0.01, seed=seed, **kw)


def flicker_spec(seed: int = 0, flicker_hz: float = 1.5,
                 flicker_amp: float = 0.005, **kw) -> SynthSpec:
    """Periodic illumination with no pulse: fools the signal branch.

    The sidecar marks the unstable lighting so the scene branch can catch
    what the spectral analysis cannot.
    """
    kw.setdefault("scene", {"head": 3, "illumination": 0, "skin": 2, "camera": 2})
    return SynthSpec(pulse_amp=0.0, noise_sigma=0.005, flicker_hz=flicker_hz,
                     flicker_amp=flicker_amp, seed=seed, **kw)


def synthetic_face_spec(seed: int = 0, **kw) -> SynthSpec:
    """Visually perfect but physiologically empty (e.g. an AI-generated face)."""
    kw.setdefault("scene", {"head": 3, "illumination": 3, "skin": 2, "camera": 2})
    return SynthSpec(pulse_amp=0.0, noise_sigma=0.005, seed=seed, **kw)


def motion_spec(seed: int = 0, events: int = 6, **kw) -> SynthSpec:
    """Pulse present but repeatedly disrupted by step artifacts."""
    kw.setdefault("scene", {"head": 0, "illumination": 3, "skin": 2, "camera": 2})
    return SynthSpec(pulse_amp=0.01, noise_sigma=0.005, motion_events=events,
                     seed=seed, **kw)
