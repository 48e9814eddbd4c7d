import json

import pytest

from convembed.cli.config import (
    ExperimentConfig,
    drop_none,
    load_experiment_config,
    merge_dicts,
    read_config_file,
)
from convembed.corpus.normalize import NormalizationMode
from convembed.utils.errors import ConfigError


def test_merge_dicts_recurses_and_later_wins():
    merged = merge_dicts({"a": 1, "b": {"c": 2, "d": 3}}, {"b": {"c": 4}, "e": 5})
    assert merged == {"a": 1, "b": {"c": 4, "d": 3}, "e": 5}


def test_merge_into_null_section():
    assert merge_dicts({"a": None}, {"a": {"b": 1}}) == {"a": {"b": 1}}


def test_drop_none():
    assert drop_none({"a": None, "b": {"c": None}, "d": {"e": 0}}) == {"d": {"e": 0}}


def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.selection.k == 20
    assert cfg.encoder.turns_per_section == 4 and cfg.encoder.sections == 200
    assert cfg.train.margin == 2.0 and cfg.train.epochs == 30
    assert cfg.normalize == NormalizationMode.SPEAKER


def test_root_seed_determines_derived_seeds():
    a = ExperimentConfig(seed=7).seeded()
    b = ExperimentConfig(seed=7).seeded()
    c = ExperimentConfig(seed=8).seeded()
    assert (a.synth.seed, a.train.seed) == (b.synth.seed, b.train.seed)
    assert (a.synth.seed, a.train.seed) != (c.synth.seed, c.train.seed)
    assert a.synth.seed != a.train.seed


def test_without_root_seed_nothing_changes():
    cfg = ExperimentConfig(train={"seed": 3})
    assert cfg.seeded() is cfg


def test_file_then_flags(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"selection": {"k": 10}, "train": {"epochs": 5, "margin": 1.5}}))
    cfg = load_experiment_config(str(path), {"train": {"epochs": 2, "margin": None}, "out": "x"})
    assert cfg.selection.k == 10
    assert cfg.train.epochs == 2
    assert cfg.train.margin == 1.5
    assert cfg.out == "x"


def test_resolved_config_round_trips(tmp_path):
    cfg = load_experiment_config(None, {"seed": 5, "out": str(tmp_path)})
    path = cfg.save_resolved()
    assert ExperimentConfig.parse_file(path) == cfg


def test_invalid_values_become_config_errors():
    with pytest.raises(ConfigError, match="invalid configuration"):
        load_experiment_config(None, {"train": {"margin": -1.0}})


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    with pytest.raises(ConfigError, match="malformed"):
        read_config_file(str(bad))
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="object"):
        read_config_file(str(listed))
