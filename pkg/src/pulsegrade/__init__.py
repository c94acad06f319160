"""pulsegrade: rPPG training-suitability scoring and corpus curation.

Two quality branches -- a multi-method physiological-SNR consensus over the
extracted pulse signal, and scene-level interference ratings -- are fused
into one unified per-video score, which drives adaptive sampling of a
target training set from a large unlabeled corpus.
"""

from .config import RunConfig, SamplingConfig, ScorerConfig
from .consensus import ConsensusReport, assess_signal
from .curation import CurationManifest, curate
from .fusion import QualityRecord, unify
from .methods import METHODS, PulseSignal, extract, extract_all
from .pipeline import read_scores, score_corpus, write_scores
from .scene import SceneScores, gamma_factor, score_scene
from .spectral import Spectrum, find_peak, snr, welch_psd
from .synth import SynthSpec, generate, make_corpus
from .trace_io import (
    CorpusManifest,
    RgbTrace,
    VideoEntry,
    load_manifest,
    load_trace,
    resample_30fps,
    save_manifest,
)

__version__ = "0.1.0"
