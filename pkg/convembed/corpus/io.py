import json
import os
from typing import Any, Dict, Optional

from jsonschema import ValidationError

from convembed.corpus.models import Conversation, Corpus
from convembed.corpus.schema import conversation_validator, manifest_validator
from convembed.utils.errors import CorpusFormatError
from convembed.utils.files import atomic_write_json, atomic_write_text, format_float
from convembed.utils.logging_factory import LoggingFactory

MANIFEST_NAME = "manifest.json"


def load_corpus(path: str, feat_dim: Optional[int] = None) -> Corpus:
    """Read a JSON Lines corpus; conversations come back in ascending score order.

    The expected feature length is taken from feat_dim, else from the sidecar
    manifest, else from the first conversation.
    """
    logger = LoggingFactory.get_logger("corpus")
    if not os.path.exists(path):
        raise CorpusFormatError(f"corpus file {path} does not exist")
    if feat_dim is None:
        manifest = read_manifest(path)
        feat_dim = manifest["feat_dim"] if manifest else None

    conversations = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                conversation_validator.validate(record)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"malformed JSON: {e.msg}", line_number) from e
            except ValidationError as e:
                raise CorpusFormatError(f"invalid conversation: {e.message}", line_number) from e

            turns = record["turns"]
            for k, turn in enumerate(turns, start=1):
                values = turn["features"]
                if feat_dim is None:
                    feat_dim = len(values)
                if len(values) != feat_dim:
                    raise CorpusFormatError(
                        f"turn {k} has {len(values)} features, expected {feat_dim}", line_number
                    )
                if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
                    raise CorpusFormatError(f"turn {k} has non-numeric features", line_number)
            if record["conv_id"] in seen:
                raise CorpusFormatError(f"duplicate conv_id {record['conv_id']!r}", line_number)
            seen.add(record["conv_id"])
            try:
                conversations.append(
                    Conversation(
                        conv_id=record["conv_id"],
                        dyad_id=record["dyad_id"],
                        score=record["score"],
                        speakers=tuple(t["speaker"] for t in turns),
                        features=[t["features"] for t in turns],
                    )
                )
            except ValueError as e:
                raise CorpusFormatError(str(e), line_number) from e

    corpus = Corpus(conversations)
    logger.info(f"Loaded {len(corpus)} conversations ({corpus.feat_dim}-dim turns) from {path}")
    return corpus


def conversation_to_line(conv: Conversation) -> str:
    turns = ",".join(
        '{"speaker":'
        + json.dumps(speaker)
        + ',"features":['
        + ",".join(format_float(v) for v in row)
        + "]}"
        for speaker, row in zip(conv.speakers, conv.features)
    )
    return (
        '{"conv_id":'
        + json.dumps(conv.conv_id)
        + ',"dyad_id":'
        + json.dumps(conv.dyad_id)
        + ',"score":'
        + format_float(conv.score)
        + ',"turns":['
        + turns
        + "]}"
    )


def save_corpus(corpus: Corpus, path: str, generation_spec: Optional[Dict[str, Any]] = None) -> str:
    """Write the corpus as JSON Lines plus its manifest.json sidecar."""
    atomic_write_text(path, "".join(conversation_to_line(c) + "\n" for c in corpus))
    atomic_write_json(
        manifest_path(path),
        {"feat_dim": corpus.feat_dim, "count": len(corpus), "generation_spec": generation_spec},
    )
    return path


def manifest_path(corpus_path: str) -> str:
    return os.path.join(os.path.dirname(os.path.abspath(corpus_path)), MANIFEST_NAME)


def read_manifest(corpus_path: str) -> Optional[Dict[str, Any]]:
    path = manifest_path(corpus_path)
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        manifest_validator.validate(manifest)
    except (json.JSONDecodeError, ValidationError) as e:
        raise CorpusFormatError(f"invalid manifest {path}: {e}") from e
    return manifest
