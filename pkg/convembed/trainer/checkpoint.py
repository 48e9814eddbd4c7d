"""Checkpoint file: configs plus every parameter array as hex floats.

Layout (JSON):
    {"format_version": 1,
     "encoder_config": {...}, "train_config": {...},
     "training_groups": {"low": [...], "high": [...]} | null,
     "params": {"<name>": {"shape": [...], "data": ["0x1.8p-1", ...]}, ...}}
"""

import json
import os
from typing import Dict, List, Optional

import numpy as np
from jsonschema import Draft7Validator, ValidationError as SchemaValidationError
from pydantic import BaseModel, Field, ValidationError

from convembed.encoder.config import EncoderConfig
from convembed.encoder.params import EncoderParams
from convembed.trainer.config import TrainConfig
from convembed.utils.errors import CheckpointError, ShapeError
from convembed.utils.files import atomic_write_text
from convembed.utils.logging_factory import LoggingFactory

FORMAT_VERSION = 1

CHECKPOINT_SCHEMA = {
    "title": "Checkpoint",
    "type": "object",
    "required": ["format_version", "encoder_config", "train_config", "params"],
    "properties": {
        "format_version": {"type": "integer"},
        "encoder_config": {"type": "object"},
        "train_config": {"type": "object"},
        "training_groups": {
            "type": ["object", "null"],
            "properties": {
                "low": {"type": "array", "items": {"type": "string"}},
                "high": {"type": "array", "items": {"type": "string"}},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["shape", "data"],
                "properties": {
                    "shape": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "data": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}

checkpoint_validator = Draft7Validator(CHECKPOINT_SCHEMA)


class Checkpoint(BaseModel):
    encoder_config: EncoderConfig = Field(..., description="Encoder shape the parameters belong to.")
    train_config: TrainConfig = Field(..., description="Hyperparameters the parameters were trained with.")
    params: EncoderParams = Field(..., description="Trained encoder weights.")
    training_groups: Optional[Dict[str, List[str]]] = Field(
        None, description="Conversation ids of the low and high training groups."
    )

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


def _encode_array(a: np.ndarray) -> Dict:
    return {"shape": list(a.shape), "data": [float(v).hex() for v in a.ravel()]}


def _decode_array(name: str, entry: Dict) -> np.ndarray:
    shape = tuple(entry["shape"])
    try:
        flat = np.array([float.fromhex(v) for v in entry["data"]], dtype=np.float64)
    except ValueError as e:
        raise CheckpointError(f"{name}: malformed hex float ({e})") from e
    if flat.size != int(np.prod(shape)):
        raise CheckpointError(f"{name}: {flat.size} values cannot fill shape {shape}")
    return flat.reshape(shape)


def save_checkpoint(path: str, checkpoint: Checkpoint) -> str:
    document = {
        "format_version": FORMAT_VERSION,
        "encoder_config": checkpoint.encoder_config.dict(),
        "train_config": checkpoint.train_config.dict(),
        "training_groups": checkpoint.training_groups,
        "params": {name: _encode_array(a) for name, a in checkpoint.params},
    }
    atomic_write_text(path, json.dumps(document, indent=1) + "\n")
    LoggingFactory.get_logger("checkpoint").info(
        f"Saved {checkpoint.params.count} parameters to {path}"
    )
    return path


def load_checkpoint(path: str) -> Checkpoint:
    """Read and fully validate a checkpoint; nothing is returned unless every check passes."""
    if not os.path.exists(path):
        raise CheckpointError(f"checkpoint {path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from e
    try:
        checkpoint_validator.validate(document)
    except SchemaValidationError as e:
        raise CheckpointError(f"{path}: {e.message}") from e
    if document["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format_version {document['format_version']} is not supported (expected {FORMAT_VERSION})"
        )

    try:
        encoder_config = EncoderConfig.parse_obj(document["encoder_config"])
        train_config = TrainConfig.parse_obj(document["train_config"])
    except ValidationError as e:
        raise CheckpointError(f"{path}: invalid config: {e}") from e

    arrays = {name: _decode_array(name, entry) for name, entry in document["params"].items()}
    try:
        params = EncoderParams(encoder_config, arrays)
    except ShapeError as e:
        raise CheckpointError(f"{path}: parameters inconsistent with encoder_config: {e}") from e

    return Checkpoint(
        encoder_config=encoder_config,
        train_config=train_config,
        params=params,
        training_groups=document.get("training_groups"),
    )
