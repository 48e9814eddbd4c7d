"""Siamese training of the conversation encoder with the contrastive loss."""

from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from threadpoolctl import threadpool_limits

from convembed.corpus.models import Corpus
from convembed.corpus.selection import Selection
from convembed.encoder.config import EncoderConfig
from convembed.encoder.encoder import ConversationEncoder
from convembed.encoder.params import EncoderParams, init_params
from convembed.encoder.sectioning import SectionGrid, section_conversation
from convembed.numeric import ops
from convembed.numeric.tape import Node, Tape
from convembed.trainer.abstracts.optimizer import AbstractOptimizer
from convembed.trainer.checkpoint import Checkpoint
from convembed.trainer.concrete.adam import Adam
from convembed.trainer.config import TrainConfig
from convembed.trainer.history import EpochRecord, TrainHistory
from convembed.trainer.loss import contrastive_loss
from convembed.trainer.pairs import PairSet, build_pairs
from convembed.utils.errors import SelectionError, ShapeError
from convembed.utils.logging_factory import LoggingFactory


def epoch_seed(seed: int, epoch: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, epoch])


class StepResult(NamedTuple):
    mean_loss: float
    losses: np.ndarray
    distances: np.ndarray


class SiameseTrainer:
    """One encoder, one parameter store: both members of every pair are
    embedded by the same weights, so the twin branches cannot diverge.
    """

    def __init__(
        self,
        corpus: Corpus,
        encoder_cfg: EncoderConfig,
        train_cfg: TrainConfig,
        params: Optional[EncoderParams] = None,
        optimizer: Optional[AbstractOptimizer] = None,
    ):
        self.logger = LoggingFactory.get_logger("trainer")
        if corpus.feat_dim != encoder_cfg.feat_dim:
            raise ShapeError(f"corpus turns have {corpus.feat_dim} features, encoder expects {encoder_cfg.feat_dim}")
        self.corpus = corpus
        self.encoder_cfg = encoder_cfg.resolved(corpus.max_turns)
        self.train_cfg = train_cfg
        self.params = params if params is not None else init_params(self.encoder_cfg, train_cfg.seed)
        self.optimizer = optimizer if optimizer is not None else Adam(train_cfg)
        self._grids: Dict[str, SectionGrid] = {}

    def grid(self, conv_id: str) -> SectionGrid:
        if conv_id not in self._grids:
            self._grids[conv_id] = section_conversation(self.corpus.get(conv_id), self.encoder_cfg)
        return self._grids[conv_id]

    def batch_loss(self, batch: PairSet, tape: Tape) -> Tuple[Node, np.ndarray, np.ndarray, List[Node]]:
        """Mean contrastive loss of a batch, each distinct conversation encoded once."""
        conv_ids = batch.conv_ids()
        row = {conv_id: i for i, conv_id in enumerate(conv_ids)}
        encoder = ConversationEncoder(self.encoder_cfg, self.params)
        encoding, param_nodes = encoder.encode_grids(conv_ids, [self.grid(c) for c in conv_ids], tape)

        x1 = ops.gather_rows(encoding.embeddings, np.array([row[p.a] for p in batch]))
        x2 = ops.gather_rows(encoding.embeddings, np.array([row[p.b] for p in batch]))
        losses = contrastive_loss(x1, x2, batch.labels, self.train_cfg.margin)
        distances = ops.euclidean_distance(x1.value, x2.value).value
        return ops.mean(losses), losses.value, distances, param_nodes

    def step(self, batch: PairSet) -> StepResult:
        tape = Tape()
        loss, losses, distances, param_nodes = self.batch_loss(batch, tape)
        grads = tape.gradient_of(loss, param_nodes)
        arrays = [a for _, a in self.params]
        self.params = self.params.replace(self.optimizer.step(arrays, grads))
        return StepResult(float(loss.value), losses, distances)

    def run_epoch(self, pairs: PairSet, epoch: int) -> EpochRecord:
        losses: List[np.ndarray] = []
        distances: List[np.ndarray] = []
        shuffled = pairs.shuffled(epoch_seed(self.train_cfg.seed, epoch))
        for batch in shuffled.batches(self.train_cfg.batch_size):
            result = self.step(batch)
            self.logger.debug(
                f"step {self.optimizer.steps_taken}: loss {result.mean_loss:.6f} over {len(batch)} pairs"
            )
            losses.append(result.losses)
            distances.append(result.distances)

        losses_all = np.concatenate(losses)
        distances_all = np.concatenate(distances)
        labels = shuffled.labels
        positive = distances_all[labels == 1.0]
        negative = distances_all[labels == 0.0]
        return EpochRecord(
            epoch=epoch,
            mean_loss=float(losses_all.mean()),
            mean_pos_dist=float(positive.mean()) if positive.size else None,
            mean_neg_dist=float(negative.mean()) if negative.size else None,
        )

    def fit(self, pairs: PairSet) -> TrainHistory:
        if len(pairs) == 0:
            raise SelectionError("no training pairs")
        history = TrainHistory()
        n_steps = -(-len(pairs) // self.train_cfg.batch_size)
        self.logger.info(
            f"Training on {len(pairs)} pairs ({pairs.n_positive} positive, {pairs.n_negative} negative), "
            f"{self.train_cfg.epochs} epochs × {n_steps} steps, {self.params.count} parameters"
        )
        with threadpool_limits(limits=1):
            for epoch in range(1, self.train_cfg.epochs + 1):
                record = self.run_epoch(pairs, epoch)
                history.append(record)
                self.logger.info(
                    f"epoch {epoch}/{self.train_cfg.epochs}: loss {record.mean_loss:.4f}, "
                    f"pos dist {_fmt(record.mean_pos_dist)}, neg dist {_fmt(record.mean_neg_dist)}"
                )
        return history


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def train_siamese(
    corpus: Corpus,
    selection: Selection,
    encoder_cfg: EncoderConfig,
    train_cfg: TrainConfig,
) -> Tuple[Checkpoint, TrainHistory]:
    """Train on the two extreme groups of a selection; returns final params and history."""
    pairs = build_pairs(selection.low, selection.high, seed=train_cfg.seed)
    trainer = SiameseTrainer(corpus, encoder_cfg, train_cfg)
    history = trainer.fit(pairs)
    checkpoint = Checkpoint(
        encoder_config=trainer.encoder_cfg,
        train_config=train_cfg,
        params=trainer.params,
        training_groups={"low": list(selection.low), "high": list(selection.high)},
    )
    return checkpoint, history
