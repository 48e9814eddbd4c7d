"""Pipelines behind the command line: corpus preparation, training,
evaluation and the K / N sweeps. Every function writes its artifacts under
the configured output directory.
"""

import os
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel

from convembed.cli.config import ExperimentConfig
from convembed.corpus.io import load_corpus, save_corpus
from convembed.corpus.models import Corpus
from convembed.corpus.normalize import normalize_per_speaker
from convembed.corpus.selection import SelectionSpec, select_extremes
from convembed.corpus.synthetic import generate_synthetic
from convembed.eval.report import EvalReport, embed_corpus, evaluate
from convembed.trainer.checkpoint import Checkpoint, save_checkpoint
from convembed.trainer.history import TrainHistory
from convembed.trainer.siamese import train_siamese
from convembed.utils.files import atomic_write_csv
from convembed.utils.logging_factory import LoggingFactory

CORPUS_NAME = "corpus.jsonl"
CHECKPOINT_NAME = "checkpoint.json"
HISTORY_NAME = "history.csv"
EMBEDDINGS_NAME = "embeddings.csv"
REPORT_NAME = "report.json"
PREDICTIONS_NAME = "predictions.csv"
PCA_NAME = "pca.csv"
SUMMARY_NAME = "summary.csv"

SUMMARY_COLUMNS = ("setting", "score_ranges", "rho_low", "p_low", "rho_high", "p_high", "r2", "mae_mean", "mae_sd")

logger = LoggingFactory.get_logger("experiment")


class SweepRow(BaseModel):
    setting: str
    report: EvalReport

    def cells(self) -> list:
        r = self.report
        return [self.setting, r.range_label, r.rho_low, r.p_low, r.rho_high, r.p_high, r.r2, r.mae_mean, r.mae_sd]


def generate_corpus(cfg: ExperimentConfig) -> str:
    corpus = generate_synthetic(cfg.synth)
    path = os.path.join(cfg.out, CORPUS_NAME)
    save_corpus(corpus, path, generation_spec=cfg.synth.dict())
    cfg.save_resolved()
    return path


def prepare_corpus(cfg: ExperimentConfig) -> Corpus:
    """Load or generate the corpus, then normalize per speaker if configured."""
    if cfg.corpus is not None:
        corpus = load_corpus(cfg.corpus, feat_dim=cfg.encoder.feat_dim)
    else:
        corpus = generate_synthetic(cfg.synth)
    if cfg.normalize is not None:
        corpus = normalize_per_speaker(corpus, cfg.normalize)
    return corpus


def run_training(cfg: ExperimentConfig, corpus: Corpus, out: Optional[str] = None) -> Tuple[Checkpoint, TrainHistory]:
    out = out or cfg.out
    selection = select_extremes(corpus, cfg.selection)
    checkpoint, history = train_siamese(corpus, selection, cfg.encoder, cfg.train)
    save_checkpoint(os.path.join(out, CHECKPOINT_NAME), checkpoint)
    history.save_csv(os.path.join(out, HISTORY_NAME))
    return checkpoint, history


def run_embedding(checkpoint: Checkpoint, corpus: Corpus, out: str, workers: int = 1) -> str:
    embeddings = embed_corpus(checkpoint, corpus, workers=workers)
    dim = checkpoint.encoder_config.embedding_dim
    return atomic_write_csv(
        os.path.join(out, EMBEDDINGS_NAME),
        ["conv_id"] + [f"e{i + 1}" for i in range(dim)],
        ([conv_id, *(float(v) for v in vector)] for conv_id, vector in embeddings.items()),
    )


def run_evaluation(
    cfg: ExperimentConfig, corpus: Corpus, checkpoint: Checkpoint, out: Optional[str] = None
) -> EvalReport:
    out = out or cfg.out
    selection = select_extremes(corpus, cfg.selection)
    report = evaluate(checkpoint, corpus, selection, cfg.eval, label=cfg.selection.label)
    report.save_json(os.path.join(out, REPORT_NAME))
    report.save_predictions_csv(os.path.join(out, PREDICTIONS_NAME))
    report.save_pca_csv(os.path.join(out, PCA_NAME))
    return report


def run_pipeline(cfg: ExperimentConfig, corpus: Corpus, out: str) -> EvalReport:
    cfg.save_resolved(out)
    checkpoint, _ = run_training(cfg, corpus, out)
    return run_evaluation(cfg, corpus, checkpoint, out)


def _write_summary(out: str, rows: List[SweepRow]) -> str:
    return atomic_write_csv(os.path.join(out, SUMMARY_NAME), SUMMARY_COLUMNS, (row.cells() for row in rows))


def sweep_test_margin(n: int, ks: Sequence[int], offsets: Sequence[int]) -> int:
    return max(SelectionSpec(k=k, offset=o).margin_for(n) for k in ks for o in offsets)


def sweep_selection(
    cfg: ExperimentConfig, corpus: Corpus, ks: Sequence[int], offsets: Sequence[int] = (0,)
) -> List[SweepRow]:
    """One training run and report per (K, offset), plus a summary table.

    Every point is scored on the same test block: unless the config fixes a
    test margin, the margin is the largest one any point of the grid needs.
    """
    margin = cfg.selection.test_margin
    if margin is None:
        margin = sweep_test_margin(len(corpus), ks, offsets)
    rows = []
    for k in ks:
        for offset in offsets:
            spec = SelectionSpec(k=k, offset=offset, test_margin=margin)
            out = os.path.join(cfg.out, f"k{k}" if offset == 0 else f"k{k}o{offset}")
            point = cfg.copy(update={"selection": spec, "out": out})
            logger.info(f"Sweep point K={spec.label}")
            rows.append(SweepRow(setting=spec.label, report=run_pipeline(point, corpus, out)))
    _write_summary(cfg.out, rows)
    return rows


def sweep_section_size(cfg: ExperimentConfig, corpus: Corpus, ns: Sequence[int]) -> List[SweepRow]:
    """One run per turns-per-section N, with M fitted so every conversation fits."""
    rows = []
    for n in ns:
        encoder = cfg.encoder.copy(update={"turns_per_section": n, "sections": None}).resolved(corpus.max_turns)
        out = os.path.join(cfg.out, f"n{n}")
        point = cfg.copy(update={"encoder": encoder, "out": out})
        logger.info(f"Sweep point N={n}, M={encoder.sections}")
        rows.append(SweepRow(setting=f"N={n}", report=run_pipeline(point, corpus, out)))
    _write_summary(cfg.out, rows)
    return rows

