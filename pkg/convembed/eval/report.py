"""The evaluation protocol: reference-distance correlations, leave-one-dyad-out
regression, absolute prediction errors and a 2-D PCA projection.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator
from threadpoolctl import threadpool_limits

from convembed.corpus.models import Corpus
from convembed.corpus.selection import Selection
from convembed.encoder.encoder import ConversationEncoder
from convembed.eval.pca import pca2
from convembed.eval.references import build_reference_sets, reference_distance
from convembed.eval.regression import RegressorConfig, lodo_regression
from convembed.eval.statistics import mae_stats, pearson
from convembed.trainer.checkpoint import Checkpoint
from convembed.utils.files import atomic_write_csv, atomic_write_text
from convembed.utils.logging_factory import LoggingFactory

EMBED_CHUNK = 16


class EvalConfig(BaseModel):
    n_references: int = Field(10, description="Reference conversations taken at each end of the score range.")
    regressor: RegressorConfig = Field(default_factory=RegressorConfig)
    workers: int = Field(1, description="Threads for embedding and fold fitting.")

    class Config:
        allow_mutation = False

    @validator("n_references", "workers")
    def positive(cls, v, field):
        if v < 1:
            raise ValueError(f"{field.name} must be at least 1, got {v}")
        return v


class PredictionRow(BaseModel):
    conv_id: str
    dyad_id: str
    truth: float
    prediction: float
    abs_diff: float


class PCARow(BaseModel):
    conv_id: str
    score: float
    group: str
    pc1: float
    pc2: float


class EvalReport(BaseModel):
    """One row of the results table plus its per-conversation detail."""

    label: str = Field("", description="Selection label such as 20 or 20(5).")
    low_range: Tuple[float, float] = Field(..., description="Score range of the low training group.")
    high_range: Tuple[float, float] = Field(..., description="Score range of the high training group.")
    n_test: int
    rho_low: float
    p_low: float
    rho_high: float
    p_high: float
    r2: Optional[float] = Field(None, description="None when the test scores are constant.")
    n_folds: int
    mae_mean: float
    mae_sd: float
    predictions: List[PredictionRow]
    pca: List[PCARow]
    pca_eigenvalues: Tuple[float, float]

    @property
    def range_label(self) -> str:
        return (
            f"({_g(self.low_range[0])} − {_g(self.low_range[1])}) vs. "
            f"({_g(self.high_range[0])} − {_g(self.high_range[1])})"
        )

    def save_json(self, path: str) -> str:
        return atomic_write_text(path, self.json(indent=2) + "\n")

    def save_predictions_csv(self, path: str) -> str:
        return atomic_write_csv(
            path,
            ("conv_id", "truth", "prediction", "abs_diff"),
            ([r.conv_id, r.truth, r.prediction, r.abs_diff] for r in self.predictions),
        )

    def save_pca_csv(self, path: str) -> str:
        return atomic_write_csv(
            path,
            ("conv_id", "score", "group", "pc1", "pc2"),
            ([r.conv_id, r.score, r.group, r.pc1, r.pc2] for r in self.pca),
        )


def _g(value: float) -> str:
    return format(value, "g")


def embed_corpus(checkpoint: Checkpoint, corpus: Corpus, workers: int = 1) -> Dict[str, np.ndarray]:
    """Embeddings of every conversation, keyed by conv_id in corpus order."""
    cfg = checkpoint.encoder_config.resolved(corpus.max_turns)
    encoder = ConversationEncoder(cfg, checkpoint.params)
    conversations = list(corpus)
    chunks = [conversations[i : i + EMBED_CHUNK] for i in range(0, len(conversations), EMBED_CHUNK)]

    def embed_chunk(chunk):
        encoding, _ = encoder.encode_batch(chunk)
        return encoding.embeddings.value

    with threadpool_limits(limits=1), ThreadPoolExecutor(max_workers=workers) as pool:
        blocks = list(pool.map(embed_chunk, chunks))
    vectors = np.concatenate(blocks, axis=0)
    LoggingFactory.get_logger("eval").debug(f"Embedded {len(conversations)} conversations")
    return {conv.conv_id: vectors[i] for i, conv in enumerate(conversations)}


def evaluate_embeddings(
    embeddings: Mapping[str, np.ndarray],
    corpus: Corpus,
    selection: Selection,
    cfg: Optional[EvalConfig] = None,
    label: str = "",
) -> EvalReport:
    cfg = cfg or EvalConfig()
    logger = LoggingFactory.get_logger("eval")
    low_refs, high_refs = build_reference_sets(corpus, embeddings, cfg.n_references)

    test = [corpus.get(c) for c in selection.test]
    scores = np.array([c.score for c in test])
    X = np.stack([embeddings[c.conv_id] for c in test])
    d_low = [reference_distance(x, low_refs) for x in X]
    d_high = [reference_distance(x, high_refs) for x in X]
    rho_low, p_low = pearson(d_low, scores)
    rho_high, p_high = pearson(d_high, scores)

    regression = lodo_regression(X, scores, [c.dyad_id for c in test], cfg.regressor, workers=cfg.workers)
    mae = mae_stats(regression.predictions, scores)

    groups = {c: "low" for c in selection.low}
    groups.update({c: "high" for c in selection.high})
    groups.update({c: "test" for c in selection.test})
    shown = [c for c in corpus.ids if c in groups]
    projection = pca2(np.stack([embeddings[c] for c in shown]))

    low_scores = [corpus.get(c).score for c in selection.low]
    high_scores = [corpus.get(c).score for c in selection.high]
    report = EvalReport(
        label=label,
        low_range=(min(low_scores), max(low_scores)),
        high_range=(min(high_scores), max(high_scores)),
        n_test=len(test),
        rho_low=rho_low,
        p_low=p_low,
        rho_high=rho_high,
        p_high=p_high,
        r2=regression.r2,
        n_folds=regression.n_folds,
        mae_mean=mae.mean,
        mae_sd=mae.sd,
        predictions=[
            PredictionRow(
                conv_id=c.conv_id,
                dyad_id=c.dyad_id,
                truth=c.score,
                prediction=float(p),
                abs_diff=float(a),
            )
            for c, p, a in zip(test, regression.predictions, mae.abs_diffs)
        ],
        pca=[
            PCARow(
                conv_id=c,
                score=corpus.get(c).score,
                group=groups[c],
                pc1=float(xy[0]),
                pc2=float(xy[1]),
            )
            for c, xy in zip(shown, projection.coordinates)
        ],
        pca_eigenvalues=(float(projection.eigenvalues[0]), float(projection.eigenvalues[1])),
    )
    r2_text = "undefined" if report.r2 is None else f"{report.r2:.3f}"
    logger.info(
        f"[{label or 'eval'}] ρ_low {rho_low:.3f} (p={p_low:.3g}), ρ_high {rho_high:.3f} (p={p_high:.3g}), "
        f"R² {r2_text}, MAE {mae.mean:.2f}±{mae.sd:.2f} over {len(test)} conversations"
    )
    return report


def evaluate(
    checkpoint: Checkpoint,
    corpus: Corpus,
    selection: Selection,
    cfg: Optional[EvalConfig] = None,
    label: str = "",
) -> EvalReport:
    """Embed the corpus with a trained encoder and run the full evaluation."""
    cfg = cfg or EvalConfig()
    embeddings = embed_corpus(checkpoint, corpus, workers=cfg.workers)
    return evaluate_embeddings(embeddings, corpus, selection, cfg, label)
