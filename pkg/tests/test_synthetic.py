import numpy as np
import pytest
from pydantic import ValidationError

from convembed.corpus.normalize import normalize_per_speaker
from convembed.corpus.synthetic import SynthSpec, dyad_scores, generate_synthetic, signal_direction

from tests.conftest import small_synth_spec


@pytest.fixture(scope="module")
def default_corpus():
    return generate_synthetic(SynthSpec())


def test_same_seed_is_bit_identical():
    a = generate_synthetic(small_synth_spec())
    b = generate_synthetic(small_synth_spec())
    assert a.ids == b.ids
    for x, y in zip(a, b):
        assert x.score == y.score
        assert x.speakers == y.speakers
        assert np.array_equal(x.features, y.features)


def test_seed_changes_the_corpus():
    a = generate_synthetic(small_synth_spec(seed=1))
    b = generate_synthetic(small_synth_spec(seed=2))
    assert not np.array_equal(a[0].features[:3], b[0].features[:3])


def test_default_structure(default_corpus):
    assert len(default_corpus) == 156
    assert len(default_corpus.dyads) == 39
    per_dyad = {}
    for conv in default_corpus:
        per_dyad[conv.dyad_id] = per_dyad.get(conv.dyad_id, 0) + 1
        assert len(set(conv.speakers)) == 2
        assert conv.speakers[0].endswith("-therapist")
    assert set(per_dyad.values()) == {4}
    assert default_corpus.feat_dim == 88


def test_score_and_turn_statistics(default_corpus):
    scores = default_corpus.scores
    assert abs(scores.mean() - 38.8) < 2.0
    assert scores.min() >= 18.0 and scores.max() <= 56.5
    assert np.all(scores * 2 == np.round(scores * 2))
    turns = [c.n_turns for c in default_corpus]
    assert min(turns) >= 54 and max(turns) <= 781


def test_signal_direction_is_a_sparse_unit_vector():
    spec = small_synth_spec()
    w = signal_direction(spec)
    assert np.isclose(np.linalg.norm(w), 1.0)
    assert np.count_nonzero(w) == spec.signal_dims


def test_therapist_projection_tracks_score(default_corpus):
    w = signal_direction(SynthSpec())
    projections = [conv.features[0::2].mean(axis=0) @ w for conv in default_corpus]
    rho = np.corrcoef(projections, default_corpus.scores)[0, 1]
    assert rho > 0.9


def test_client_turns_carry_no_signal(default_corpus):
    w = signal_direction(SynthSpec())
    projections = [conv.features[1::2].mean(axis=0) @ w for conv in default_corpus]
    rho = np.corrcoef(projections, default_corpus.scores)[0, 1]
    assert abs(rho) < 0.5


def test_half_scale():
    spec = SynthSpec.half_scale(seed=5)
    assert spec.n_conversations == 78 and spec.n_dyads == 26 and spec.conversations_per_dyad == 3
    assert spec.turns_max == 390 and spec.seed == 5


def dyad_mean_spread(corpus):
    by_dyad = {}
    for conv in corpus:
        by_dyad.setdefault(conv.dyad_id, []).append(conv.score)
    return np.std([np.mean(scores) for scores in by_dyad.values()])


def test_every_dyad_gets_one_score_per_stratum():
    spec = SynthSpec(seed=11)
    scores = dyad_scores(spec, np.random.default_rng(0))
    assert scores.shape == (39, 4)
    strata = np.sort(scores.ravel()).reshape(4, 39)
    for d in range(39):
        for s in range(4):
            assert strata[s].min() <= np.sort(scores[d])[s] <= strata[s].max()


def test_stratified_dyads_have_close_mean_scores(default_corpus):
    independent = generate_synthetic(SynthSpec(stratify_dyads=False))
    assert dyad_mean_spread(default_corpus) < 0.75 * dyad_mean_spread(independent)


def test_therapist_signal_survives_speaker_normalization(default_corpus):
    w = signal_direction(SynthSpec())
    normalized = normalize_per_speaker(default_corpus)
    projections = np.array([conv.features[0::2].mean(axis=0) @ w for conv in normalized])
    scores = normalized.scores
    assert np.corrcoef(projections, scores)[0, 1] > 0.85
    middle = slice(30, 126)
    assert np.corrcoef(projections[middle], scores[middle])[0, 1] > 0.6


def test_event_probability_range():
    spec = SynthSpec()
    assert spec.event_probability(18.0) == pytest.approx(0.1)
    assert spec.event_probability(56.5) == pytest.approx(0.7)


@pytest.mark.parametrize(
    "values",
    [
        {"n_conversations": 100},
        {"score_min": 60.0},
        {"signal_dims": 89},
        {"turns_min": 0},
    ],
)
def test_invalid_spec(values):
    with pytest.raises(ValidationError):
        SynthSpec(**values)
