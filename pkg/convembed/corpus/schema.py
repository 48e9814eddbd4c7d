from typing import Any, Dict

from jsonschema import Draft7Validator

CONVERSATION_SCHEMA: Dict[str, Any] = {
    "title": "Conversation",
    "type": "object",
    "required": ["conv_id", "dyad_id", "score", "turns"],
    "properties": {
        "conv_id": {"type": "string"},
        "dyad_id": {"type": "string"},
        "score": {"type": "number"},
        "turns": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["speaker", "features"],
                "properties": {
                    "speaker": {"type": "string"},
                    "features": {"type": "array", "minItems": 1},
                },
            },
        },
    },
}

MANIFEST_SCHEMA: Dict[str, Any] = {
    "title": "CorpusManifest",
    "type": "object",
    "required": ["feat_dim", "count"],
    "properties": {
        "feat_dim": {"type": "integer", "minimum": 1},
        "count": {"type": "integer", "minimum": 1},
        "generation_spec": {"type": ["object", "null"]},
    },
}

conversation_validator = Draft7Validator(CONVERSATION_SCHEMA)
manifest_validator = Draft7Validator(MANIFEST_SCHEMA)
