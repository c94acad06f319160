import json

import numpy as np
import pytest

from pulsegrade import trace_io
from pulsegrade.trace_io import (
    DuplicateVideoIdError,
    ManifestParseError,
    MissingTraceFileError,
    RgbTrace,
    TraceFormatError,
    VideoEntry,
    load_manifest,
    load_trace,
    resample_30fps,
    save_manifest,
    save_trace,
)


def write_trace_csv(path, timestamps, r, g, b):
    rows = ["frame,timestamp_s,r_mean,g_mean,b_mean"]
    for i, (t, rv, gv, bv) in enumerate(zip(timestamps, r, g, b)):
        rows.append(f"{i},{t},{rv},{gv},{bv}")
    path.write_text("\n".join(rows) + "\n")


def write_manifest(path, videos, corpus_id="test"):
    path.write_text(json.dumps({"corpus_id": corpus_id, "videos": videos}))


def uniform_trace(n=300, fps=30.0, value=1.0):
    t = np.arange(n) / fps
    c = np.full(n, value)
    return t, c


@pytest.fixture
def corpus_dir(tmp_path):
    t, c = uniform_trace()
    for name in ("a.csv", "b.csv"):
        write_trace_csv(tmp_path / name, t, c, c, c)
    return tmp_path


class TestLoadManifest:
    def test_two_entries(self, corpus_dir):
        write_manifest(corpus_dir / "m.json", [
            {"id": "v1", "trace_path": "a.csv", "duration_s": 10.0, "native_fps": 30.0,
             "source_tag": "labA"},
            {"id": "v2", "trace_path": "b.csv", "duration_s": 10.0, "native_fps": 30.0,
             "source_tag": "labB"},
        ])
        manifest = load_manifest(corpus_dir / "m.json")
        assert len(manifest) == 2
        assert manifest.entry("v1").source_tag == "labA"
        assert manifest.entry("v2").resolved_path.is_file()

    def test_duplicate_id_named(self, corpus_dir):
        write_manifest(corpus_dir / "m.json", [
            {"id": "v1", "trace_path": "a.csv", "duration_s": 10.0, "native_fps": 30.0},
            {"id": "v1", "trace_path": "b.csv", "duration_s": 10.0, "native_fps": 30.0},
        ])
        with pytest.raises(DuplicateVideoIdError, match="v1"):
            load_manifest(corpus_dir / "m.json")

    def test_empty_videos_list(self, tmp_path):
        write_manifest(tmp_path / "m.json", [])
        assert len(load_manifest(tmp_path / "m.json")) == 0

    def test_missing_trace_file_named(self, tmp_path):
        write_manifest(tmp_path / "m.json", [
            {"id": "ghost", "trace_path": "nope.csv", "duration_s": 10.0,
             "native_fps": 30.0},
        ])
        with pytest.raises(MissingTraceFileError, match="ghost"):
            load_manifest(tmp_path / "m.json")

    def test_parse_failure(self, tmp_path):
        (tmp_path / "m.json").write_text("{not json")
        with pytest.raises(ManifestParseError):
            load_manifest(tmp_path / "m.json")

    def test_bad_entry_fields(self, corpus_dir):
        write_manifest(corpus_dir / "m.json", [
            {"id": "v1", "trace_path": "a.csv", "duration_s": -1.0, "native_fps": 30.0},
        ])
        with pytest.raises(ManifestParseError):
            load_manifest(corpus_dir / "m.json")

    def test_round_trip(self, corpus_dir):
        write_manifest(corpus_dir / "m.json", [
            {"id": "v1", "trace_path": "a.csv", "duration_s": 10.0, "native_fps": 30.0,
             "source_tag": "x"},
            {"id": "v2", "trace_path": "b.csv", "duration_s": 10.0, "native_fps": 25.0,
             "source_tag": "y"},
        ])
        first = load_manifest(corpus_dir / "m.json")
        save_manifest(first, corpus_dir / "m2.json")
        second = load_manifest(corpus_dir / "m2.json")
        assert first.corpus_id == second.corpus_id
        assert [v.to_json_dict() for v in first.videos] == \
               [v.to_json_dict() for v in second.videos]


class TestLoadTrace:
    def entry(self, tmp_path, duration=299 / 30, fps=30.0, name="t.csv"):
        return VideoEntry(id="v", trace_path=name, duration_s=duration,
                          native_fps=fps, resolved_path=tmp_path / name)

    def test_well_formed_300_rows(self, tmp_path):
        t, c = uniform_trace(300)
        write_trace_csv(tmp_path / "t.csv", t, c, c, c)
        trace = load_trace(self.entry(tmp_path))
        assert len(trace) == 300
        assert trace.span_s == pytest.approx(9.9667, abs=1e-3)

    def test_non_monotone_names_row(self, tmp_path):
        t, c = uniform_trace(10)
        t = t.copy()
        t[5] = t[4] - 0.01
        write_trace_csv(tmp_path / "t.csv", t, c[:10], c[:10], c[:10])
        with pytest.raises(TraceFormatError, match="row"):
            load_trace(self.entry(tmp_path, duration=0.3))

    def test_single_row_too_short(self, tmp_path):
        write_trace_csv(tmp_path / "t.csv", [0.0], [1.0], [1.0], [1.0])
        with pytest.raises(TraceFormatError, match="fewer than 2"):
            load_trace(self.entry(tmp_path, duration=1.0))

    def test_malformed_row(self, tmp_path):
        (tmp_path / "t.csv").write_text(
            "frame,timestamp_s,r_mean,g_mean,b_mean\n0,0.0,1,1,1\n1,oops,1,1,1\n"
        )
        with pytest.raises(TraceFormatError, match="row 2"):
            load_trace(self.entry(tmp_path, duration=1.0))

    def test_bad_header(self, tmp_path):
        (tmp_path / "t.csv").write_text("a,b,c,d,e\n0,0.0,1,1,1\n")
        with pytest.raises(TraceFormatError, match="header"):
            load_trace(self.entry(tmp_path, duration=1.0))

    def test_negative_channel_rejected(self, tmp_path):
        t, c = uniform_trace(10)
        r = c[:10].copy()
        r[3] = -0.5
        write_trace_csv(tmp_path / "t.csv", t[:10], r, c[:10], c[:10])
        with pytest.raises(TraceFormatError, match="negative"):
            load_trace(self.entry(tmp_path, duration=0.3))

    def test_short_nan_run_interpolated(self, tmp_path):
        t, _ = uniform_trace(10)
        g = np.linspace(1.0, 2.0, 10)
        rows = ["frame,timestamp_s,r_mean,g_mean,b_mean"]
        for i in range(10):
            gv = "" if i in (4, 5) else repr(float(g[i]))
            rows.append(f"{i},{t[i]},1.0,{gv},1.0")
        (tmp_path / "t.csv").write_text("\n".join(rows) + "\n")
        trace = load_trace(self.entry(tmp_path, duration=0.3))
        assert trace.g[4] == pytest.approx(g[4])
        assert trace.g[5] == pytest.approx(g[5])

    def test_long_nan_run_rejected(self, tmp_path):
        t, _ = uniform_trace(10)
        rows = ["frame,timestamp_s,r_mean,g_mean,b_mean"]
        for i in range(10):
            gv = "" if i in (4, 5, 6) else "1.0"
            rows.append(f"{i},{t[i]},1.0,{gv},1.0")
        (tmp_path / "t.csv").write_text("\n".join(rows) + "\n")
        with pytest.raises(TraceFormatError, match="consecutive"):
            load_trace(self.entry(tmp_path, duration=0.3))

    def test_duration_mismatch_rejected(self, tmp_path):
        t, c = uniform_trace(300)
        write_trace_csv(tmp_path / "t.csv", t, c, c, c)
        with pytest.raises(TraceFormatError, match="duration"):
            load_trace(self.entry(tmp_path, duration=20.0))

    def test_save_load_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        t = np.arange(60) / 30.0
        trace = RgbTrace(t, rng.uniform(0.1, 1, 60), rng.uniform(0.1, 1, 60),
                         rng.uniform(0.1, 1, 60))
        save_trace(trace, tmp_path / "t.csv")
        back = load_trace(self.entry(tmp_path, duration=2.0))
        assert np.array_equal(back.timestamps_s, trace.timestamps_s)
        assert np.array_equal(back.g, trace.g)


class TestResample30fps:
    def test_identity_on_30fps(self):
        rng = np.random.default_rng(0)
        t = np.arange(300) / 30.0
        vals = rng.uniform(0.2, 1.0, 300)
        trace = RgbTrace(t, vals, vals, vals)
        out = resample_30fps(trace)
        assert len(out) == 300
        assert np.allclose(out.g, vals, rtol=1e-9)
        # idempotence
        again = resample_30fps(out)
        assert np.allclose(again.g, out.g, rtol=1e-9)

    def test_constant_15fps_10s(self):
        t = np.arange(150) / 15.0
        one = np.ones(150)
        out = resample_30fps(RgbTrace(t, one, one, one))
        assert len(out) == 300
        assert np.all(out.r == 1.0) and np.all(out.g == 1.0) and np.all(out.b == 1.0)

    def test_sinusoid_peak_preserved(self):
        # Oracle: an independent FFT locates the dominant frequency before
        # and after resampling; both must sit at 1.2 Hz within one bin.
        fps_in = 60.0
        t = np.arange(int(20 * fps_in)) / fps_in
        g = 1.0 + 0.01 * np.sin(2 * np.pi * 1.2 * t)
        one = np.ones_like(g)

        def fft_peak(x, fs):
            spec = np.abs(np.fft.rfft(x - x.mean())) ** 2
            freqs = np.fft.rfftfreq(len(x), d=1.0 / fs)
            return freqs[np.argmax(spec)], freqs[1] - freqs[0]

        before, _ = fft_peak(g, fps_in)
        out = resample_30fps(RgbTrace(t, one, g, one))
        after, bin_width = fft_peak(out.g, 30.0)
        assert before == pytest.approx(1.2, abs=1 / 20)
        assert abs(after - 1.2) <= bin_width

    def test_bounds_preserved(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = rng.integers(10, 200)
            fps = rng.uniform(10, 90)
            t = np.arange(n) / fps
            vals = rng.uniform(0.0, 2.0, n)
            out = resample_30fps(RgbTrace(t, vals, vals, vals))
            assert out.g.min() >= vals.min() - 1e-12
            assert out.g.max() <= vals.max() + 1e-12


class TestRgbTraceInvariants:
    def test_needs_two_samples(self):
        with pytest.raises(TraceFormatError):
            RgbTrace(np.array([0.0]), np.ones(1), np.ones(1), np.ones(1))

    def test_channel_length_mismatch(self):
        with pytest.raises(TraceFormatError):
            RgbTrace(np.array([0.0, 0.1]), np.ones(2), np.ones(3), np.ones(2))

    def test_nonfinite_rejected(self):
        t = np.array([0.0, 0.1, 0.2])
        bad = np.array([1.0, np.nan, 1.0])
        with pytest.raises(TraceFormatError):
            RgbTrace(t, bad, np.ones(3), np.ones(3))
