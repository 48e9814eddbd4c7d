import json
import os
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from convembed.corpus.normalize import NormalizationMode
from convembed.corpus.selection import SelectionSpec
from convembed.corpus.synthetic import SynthSpec
from convembed.encoder.config import EncoderConfig
from convembed.eval.report import EvalConfig
from convembed.trainer.config import TrainConfig
from convembed.utils.errors import ConfigError
from convembed.utils.files import atomic_write_text

RESOLVED_CONFIG_NAME = "config.resolved.json"


class ExperimentConfig(BaseModel):
    """Everything one run needs. A run's config.resolved.json parses back into
    an identical ExperimentConfig.
    """

    corpus: Optional[str] = Field(None, description="JSON Lines corpus; None generates one from synth.")
    synth: SynthSpec = Field(default_factory=SynthSpec)
    normalize: Optional[NormalizationMode] = Field(
        NormalizationMode.SPEAKER, description="Per-speaker feature normalization; None keeps raw features."
    )
    selection: SelectionSpec = Field(default_factory=SelectionSpec)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    out: str = Field("runs/default", description="Output directory.")
    seed: Optional[int] = Field(None, description="Root seed; when set it determines every other seed.")

    class Config:
        allow_mutation = False

    def seeded(self) -> "ExperimentConfig":
        """Copy with the synthetic and training seeds derived from the root seed."""
        if self.seed is None:
            return self
        synth_seed, train_seed = (int(s) for s in np.random.SeedSequence(self.seed).generate_state(2))
        return self.copy(
            update={
                "synth": self.synth.copy(update={"seed": synth_seed}),
                "train": self.train.copy(update={"seed": train_seed}),
            }
        )

    def to_json_dict(self) -> Dict[str, Any]:
        return json.loads(self.json())

    def save_resolved(self, directory: Optional[str] = None) -> str:
        path = os.path.join(directory or self.out, RESOLVED_CONFIG_NAME)
        return atomic_write_text(path, json.dumps(self.to_json_dict(), indent=2) + "\n")


def merge_dicts(d1: Dict[str, Any], d2: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge d2 into d1; values from d2 win."""
    for key, value in d2.items():
        if isinstance(value, dict):
            # get node or create one
            node = d1.setdefault(key, {})
            if node is None:
                node = d1[key] = {}
            merge_dicts(node, value)
        else:
            d1[key] = value

    return d1


def drop_none(d: Dict[str, Any]) -> Dict[str, Any]:
    """Remove unset flags, recursively, and any section left empty."""
    cleaned = {}
    for key, value in d.items():
        if isinstance(value, dict):
            value = drop_none(value)
            if value:
                cleaned[key] = value
        elif value is not None:
            cleaned[key] = value
    return cleaned


def read_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def load_experiment_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Config file (if any) with flag overrides merged on top, validated and seeded."""
    base = read_config_file(path) if path else {}
    merged = merge_dicts(base, drop_none(overrides or {}))
    try:
        return ExperimentConfig.parse_obj(merged).seeded()
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
