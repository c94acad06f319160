#!/usr/bin/env python3
"""End-to-end tour: generate a synthetic corpus, score it, inspect rankings.

Builds a small corpus with four kinds of videos (clean pulse, pure sensor
noise, periodic-illumination flicker, synthetic faces), runs both quality
branches with the offline mock scene scorer, and prints the fused ranking.
The flicker videos fool the signal branch (positive SNR with no pulse) and
the synthetic faces fool the scene branch (perfect scene, no pulse); each
is caught by the other branch in the unified score.

Usage: python demos/01_score_synthetic_corpus.py [workdir]
"""

import sys
import tempfile
from pathlib import Path

from pulsegrade import synth
from pulsegrade.pipeline import score_corpus, write_scores


def main(workdir=None):
    workdir = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="pulsegrade_"))
    print(f"working in {workdir}\n")

    scenes = [
        {"head": 3, "illumination": 3, "skin": 2, "camera": 2},
        {"head": 2, "illumination": 3, "skin": 2, "camera": 1},
        {"head": 3, "illumination": 2, "skin": 2, "camera": 2},
    ]
    specs = [synth.clean_spec(hr_bpm=60 + 6 * s, seed=s, name=f"clean{s}",
                              scene=scenes[s % 3]) for s in range(6)]
    specs += [synth.pure_noise_spec(seed=s, name=f"noise{s}",
                                    scene=scenes[s % 3]) for s in range(3)]
    specs += [synth.flicker_spec(seed=s, name=f"flicker{s}") for s in range(3)]
    specs += [synth.synthetic_face_spec(seed=s, name=f"synthface{s}")
              for s in range(3)]

    manifest = synth.make_corpus(specs, workdir / "corpus")
    print(f"generated {len(manifest)} videos -> {workdir/'corpus'}")

    records = score_corpus(manifest)
    write_scores(records, workdir / "scores.jsonl")
    print(f"scored -> {workdir/'scores.jsonl'}\n")

    print(f"{'video':12s} {'q_sig_raw':>9s} {'q_sce_raw':>9s} {'Q':>6s}  notes")
    for r in sorted(records, key=lambda r: -r.q_unified):
        consensus_bpm = r.signal["consensus_hz"] * 60
        print(f"{r.video_id:12s} {r.q_sig_raw:9.2f} {r.q_sce_raw:9.2f} "
              f"{r.q_unified:6.3f}  consensus {consensus_bpm:5.1f} bpm"
              + (f"  [{','.join(r.flags)}]" if r.flags else ""))

    print("\nNote how flicker* videos carry positive q_sig_raw (the signal")
    print("branch is fooled by the periodic light) yet rank below every")
    print("clean* video once the scene score is fused in; synthface* videos")
    print("show the mirror-image failure.")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
