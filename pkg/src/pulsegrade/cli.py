"""Command-line entry point: score, sample, report, synth.

Exit codes: 0 full success, 2 run completed but some videos were flagged
(degenerate extraction or unscorable scene), 1 fatal error. Options can
also come from a ``key = value`` config file via --config; explicit flags
win over the file.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import curation, pipeline, synth
from .config import (
    DEFAULT_ALPHA,
    DEFAULT_SEED,
    RunConfig,
    SamplingConfig,
    ScorerConfig,
    parse_config_file,
)
from .curation import CurationError
from .methods import normalize_methods
from .trace_io import TraceIoError, load_manifest

log = logging.getLogger("pulsegrade")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_FLAGGED = 2


def _pick(args, file_cfg, key, default, cast=str):
    """Resolve one option: CLI flag > config file > built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_cfg:
        return cast(file_cfg[key])
    return default


def _setup_logging(level: str):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def cmd_score(args) -> int:
    file_cfg = parse_config_file(args.config) if args.config else {}
    _setup_logging(_pick(args, file_cfg, "log_level", "INFO"))

    methods_raw = _pick(args, file_cfg, "methods", "")
    methods = normalize_methods(
        tuple(m.strip() for m in methods_raw.split(",") if m.strip())
        if methods_raw else None
    )
    scorer_config = ScorerConfig(
        kind=_pick(args, file_cfg, "scorer", "mock"),
        endpoint_url=_pick(args, file_cfg, "endpoint_url", ""),
        model_name=_pick(args, file_cfg, "model_name", ""),
        api_key_env=_pick(args, file_cfg, "api_key_env", "PULSEGRADE_API_KEY"),
        frame_budget=_pick(args, file_cfg, "frame_budget", 8, int),
        timeout_s=_pick(args, file_cfg, "timeout_s", 30.0, float),
        max_retries=_pick(args, file_cfg, "max_retries", 3, int),
        rate_limit=_pick(args, file_cfg, "rate_limit", 2.0, float),
    )

    manifest_path = _pick(args, file_cfg, "manifest", None)
    if not manifest_path:
        log.error("score: no manifest given (--manifest or config file)")
        return EXIT_FATAL
    try:
        run = RunConfig(
            manifest_path=str(manifest_path),
            scores_path=_pick(args, file_cfg, "out", "scores.jsonl"),
            methods=methods,
            alpha=_pick(args, file_cfg, "alpha", DEFAULT_ALPHA, float),
            scorer=scorer_config,
            parallelism=_pick(args, file_cfg, "parallelism", 1, int),
            seed=_pick(args, file_cfg, "seed", DEFAULT_SEED, int),
        )
        manifest = load_manifest(run.manifest_path)
        records = pipeline.score_corpus(
            manifest,
            methods=run.methods,
            alpha=run.alpha,
            scorer_config=run.scorer,
            parallelism=run.parallelism,
            seed=run.seed,
        )
    except (TraceIoError, ValueError) as exc:
        log.error("score failed: %s", exc)
        return EXIT_FATAL

    out = run.scores_path
    pipeline.write_scores(records, out)
    flagged = [r.video_id for r in records if r.flags]
    log.info("wrote %d records to %s (%d flagged)", len(records), out, len(flagged))
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_sample(args) -> int:
    file_cfg = parse_config_file(args.config) if args.config else {}
    _setup_logging(_pick(args, file_cfg, "log_level", "INFO"))

    scores_path = _pick(args, file_cfg, "scores", None)
    if not scores_path or not Path(scores_path).is_file():
        log.error("sample: scores file not found: %s", scores_path)
        return EXIT_FATAL
    try:
        sampling = SamplingConfig(
            strategy=_pick(args, file_cfg, "strategy", "tas"),
            target_size=_pick(args, file_cfg, "target_size", 140, int),
            eta=_pick(args, file_cfg, "eta", 2.0, float),
            tau=_pick(args, file_cfg, "tau", 1.0, float),
            clip_len_s=_pick(args, file_cfg, "clip_len", 10.0, float),
            seed=_pick(args, file_cfg, "seed", DEFAULT_SEED, int),
        )
        records = pipeline.read_scores(scores_path)
        digest = hashlib.sha256(Path(scores_path).read_bytes()).hexdigest()
        manifest = curation.curate(records, sampling, digest=digest)
    except (CurationError, ValueError) as exc:
        log.error("sample failed: %s", exc)
        return EXIT_FATAL

    out = _pick(args, file_cfg, "out", "curation.json")
    Path(out).write_text(
        json.dumps(manifest.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    by_tag: dict = {}
    tag_of = {r.video_id: r.source_tag for r in records}
    for entry in manifest.entries:
        tag = tag_of.get(entry.video_id, "")
        by_tag[tag] = by_tag.get(tag, 0) + 1
    print(f"strategy={manifest.strategy} realized_size={len(manifest)} "
          f"target={sampling.target_size} seed={sampling.seed}")
    for tag in sorted(by_tag):
        print(f"  source_tag={tag or '(none)'}: {by_tag[tag]} clips")
    if manifest.flags:
        print(f"  flags: {', '.join(manifest.flags)}")
    log.info("wrote curation manifest to %s", out)
    return EXIT_OK


def _report_rows(records) -> list:
    """Long-format CSV rows: record_type, source_tag, key, value."""
    rows = []
    tags = sorted({r.source_tag for r in records})
    edges = np.linspace(0.0, 1.0, 21)
    for tag in tags:
        group = [r for r in records if r.source_tag == tag]
        q = np.array([r.q_unified for r in group])
        hist, _ = np.histogram(q, bins=edges)
        for lo, hi, count in zip(edges[:-1], edges[1:], hist):
            rows.append(("histogram", tag, f"{lo:.2f}-{hi:.2f}", int(count)))
        for name, values in (
            ("q_sig_raw", [r.q_sig_raw for r in group]),
            ("q_sce_raw", [r.q_sce_raw for r in group]),
            ("q_unified", [r.q_unified for r in group]),
        ):
            arr = np.array(values)
            rows.append(("stats", tag, f"{name}_count", len(arr)))
            rows.append(("stats", tag, f"{name}_mean", float(arr.mean())))
            rows.append(("stats", tag, f"{name}_min", float(arr.min())))
            rows.append(("stats", tag, f"{name}_max", float(arr.max())))
        flag_counts: dict = {}
        for r in group:
            for flag in r.flags:
                flag_counts[flag] = flag_counts.get(flag, 0) + 1
        rows.append(("flags", tag, "videos_flagged",
                     sum(1 for r in group if r.flags)))
        for flag in sorted(flag_counts):
            rows.append(("flags", tag, flag, flag_counts[flag]))
    return rows


def cmd_report(args) -> int:
    _setup_logging(args.log_level or "INFO")
    if not Path(args.scores).is_file():
        log.error("report: scores file not found: %s", args.scores)
        return EXIT_FATAL
    try:
        records = pipeline.read_scores(args.scores)
    except ValueError as exc:
        log.error("report failed: %s", exc)
        return EXIT_FATAL
    if not records:
        log.error("report: scores file is empty")
        return EXIT_FATAL

    lines = ["record_type,source_tag,key,value"]
    lines += [f"{t},{tag},{key},{value}" for t, tag, key, value in _report_rows(records)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("wrote report to %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args) -> int:
    _setup_logging(args.log_level or "INFO")
    specs = []
    idx = 0

    def add(factory, count, **kw):
        nonlocal idx
        for _ in range(count):
            specs.append(factory(seed=args.seed + idx,
                                 duration_s=args.duration, **kw))
            idx += 1

    add(synth.clean_spec, args.clean)
    add(synth.pure_noise_spec, args.noise)
    add(synth.flicker_spec, args.flicker)
    add(synth.synthetic_face_spec, args.synthface)
    add(synth.motion_spec, args.motion)
    if args.mixed_fps:
        for fps in (15.0, 30.0, 60.0):
            specs.append(synth.clean_spec(seed=args.seed + idx,
                                          duration_s=args.duration, fps=fps))
            idx += 1
    if not specs:
        log.error("synth: nothing to generate (all counts zero)")
        return EXIT_FATAL
    manifest = synth.make_corpus(specs, args.out)
    print(f"wrote {len(manifest)} videos to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsegrade",
        description="Score facial-video corpora for rPPG training suitability "
                    "and curate training manifests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="score every video in a corpus")
    p_score.add_argument("--manifest", help="corpus manifest JSON")
    p_score.add_argument("--out", help="scores output path (JSONL)")
    p_score.add_argument("--scorer", choices=["mock", "remote"])
    p_score.add_argument("--alpha", type=float, help="signal/scene fusion weight")
    p_score.add_argument("--methods", help="comma-separated method subset")
    p_score.add_argument("--parallelism", type=int)
    p_score.add_argument("--seed", type=int)
    p_score.add_argument("--endpoint-url", dest="endpoint_url")
    p_score.add_argument("--model-name", dest="model_name")
    p_score.add_argument("--api-key-env", dest="api_key_env")
    p_score.add_argument("--frame-budget", dest="frame_budget", type=int)
    p_score.add_argument("--timeout-s", dest="timeout_s", type=float)
    p_score.add_argument("--max-retries", dest="max_retries", type=int)
    p_score.add_argument("--rate-limit", dest="rate_limit", type=float)
    p_score.add_argument("--config", help="key = value config file")
    p_score.add_argument("--log-level", dest="log_level")
    p_score.set_defaults(func=cmd_score)

    p_sample = sub.add_parser("sample", help="curate a training manifest")
    p_sample.add_argument("--scores", help="scores JSONL from `score`")
    p_sample.add_argument("--out", help="curation manifest output path")
    p_sample.add_argument("--strategy",
                          choices=["tas", "wrs", "topk", "bottomk", "random"])
    p_sample.add_argument("--target-size", dest="target_size", type=int)
    p_sample.add_argument("--eta", type=float)
    p_sample.add_argument("--tau", type=float)
    p_sample.add_argument("--clip-len", dest="clip_len", type=float)
    p_sample.add_argument("--seed", type=int)
    p_sample.add_argument("--config", help="key = value config file")
    p_sample.add_argument("--log-level", dest="log_level")
    p_sample.set_defaults(func=cmd_sample)

    p_report = sub.add_parser("report", help="summarize a scores file as CSV")
    p_report.add_argument("--scores", required=True)
    p_report.add_argument("--out", help="CSV output path (default: stdout)")
    p_report.add_argument("--log-level", dest="log_level")
    p_report.set_defaults(func=cmd_report)

    p_synth = sub.add_parser("synth", help="generate a synthetic test corpus")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--clean", type=int, default=10,
                         help="videos with a clean pulse (default 10)")
    p_synth.add_argument("--noise", type=int, default=0,
                         help="pulse-free noise videos")
    p_synth.add_argument("--flicker", type=int, default=0,
                         help="flicker-confounder videos")
    p_synth.add_argument("--synthface", type=int, default=0,
                         help="pulse-free videos with perfect scene scores")
    p_synth.add_argument("--motion", type=int, default=0,
                         help="videos with step artifacts")
    p_synth.add_argument("--mixed-fps", action="store_true",
                         help="add clean videos at 15/30/60 fps")
    p_synth.add_argument("--duration", type=float, default=30.0)
    p_synth.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_synth.add_argument("--log-level", dest="log_level")
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
