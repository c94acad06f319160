import pytest

from pulsegrade import synth
from pulsegrade.config import ScorerConfig
from pulsegrade.pipeline import score_corpus


def separation_specs():
    """25 clean + 25 pure-noise specs, identical perfect scenes."""
    specs = [synth.clean_spec(seed=s, name=f"clean{s:02d}") for s in range(25)]
    specs += [synth.pure_noise_spec(seed=s, name=f"noise{s:02d}") for s in range(25)]
    return specs


def failure_case_specs():
    """Clean / flicker / synthetic-face mix with varied scene sidecars.

    Scene scores are spread out (real corpora are not uniformly pristine) so
    the corpus-level IQR fences do not collapse onto a single value.
    """
    scenes = [
        {"head": 3, "illumination": 3, "skin": 2, "camera": 2},
        {"head": 2, "illumination": 3, "skin": 2, "camera": 2},
        {"head": 3, "illumination": 2, "skin": 2, "camera": 1},
        {"head": 2, "illumination": 2, "skin": 2, "camera": 2},
        {"head": 3, "illumination": 3, "skin": 1, "camera": 2},
    ]
    specs = [
        synth.clean_spec(seed=s, name=f"clean{s:02d}", scene=scenes[s % len(scenes)])
        for s in range(10)
    ]
    specs += [synth.flicker_spec(seed=100 + s, name=f"flicker{s:02d}") for s in range(5)]
    specs += [synth.synthetic_face_spec(seed=200 + s, name=f"synthface{s:02d}")
              for s in range(5)]
    specs += [
        synth.pure_noise_spec(seed=300 + s, name=f"noise{s:02d}",
                              scene=scenes[s % len(scenes)])
        for s in range(5)
    ]
    return specs


@pytest.fixture(scope="session")
def separation_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("separation_corpus")
    return synth.make_corpus(separation_specs(), out, corpus_id="separation")


@pytest.fixture(scope="session")
def separation_records(separation_corpus):
    return score_corpus(separation_corpus, scorer_config=ScorerConfig(kind="mock"))


@pytest.fixture(scope="session")
def failure_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("failure_corpus")
    return synth.make_corpus(failure_case_specs(), out, corpus_id="failure-cases")


@pytest.fixture(scope="session")
def failure_records(failure_corpus):
    return score_corpus(failure_corpus, scorer_config=ScorerConfig(kind="mock"))


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """10 mixed videos for cheap CLI-level tests."""
    out = tmp_path_factory.mktemp("small_corpus")
    specs = [synth.clean_spec(seed=s, name=f"v{s:02d}", duration_s=15.0)
             for s in range(6)]
    specs += [synth.pure_noise_spec(seed=50 + s, name=f"w{s:02d}", duration_s=15.0)
              for s in range(4)]
    return synth.make_corpus(specs, out, corpus_id="small")
