from convembed.trainer.config import TrainConfig
from convembed.trainer.pairs import Pair, PairSet, build_pairs
from convembed.trainer.loss import contrastive_loss, loss_from_distance
from convembed.trainer.concrete.adam import Adam, AdamState, adam_step
from convembed.trainer.history import EpochRecord, TrainHistory
from convembed.trainer.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from convembed.trainer.siamese import SiameseTrainer, train_siamese
