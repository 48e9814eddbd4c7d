from typing import List, Optional

from pydantic import BaseModel, Field

from convembed.utils.files import atomic_write_csv

HISTORY_COLUMNS = ("epoch", "mean_loss", "mean_pos_dist", "mean_neg_dist")


class EpochRecord(BaseModel):
    epoch: int = Field(..., description="1-based epoch number.")
    mean_loss: float = Field(..., description="Mean per-pair loss over the epoch.")
    mean_pos_dist: Optional[float] = Field(None, description="Mean distance of same-group pairs; None without any.")
    mean_neg_dist: Optional[float] = Field(None, description="Mean distance of cross-group pairs; None without any.")

    class Config:
        allow_mutation = False


class TrainHistory(BaseModel):
    records: List[EpochRecord] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    @property
    def mean_losses(self) -> List[float]:
        return [r.mean_loss for r in self.records]

    def save_csv(self, path: str) -> str:
        return atomic_write_csv(
            path,
            HISTORY_COLUMNS,
            ([r.epoch, r.mean_loss, r.mean_pos_dist, r.mean_neg_dist] for r in self.records),
        )
