import math
from typing import Optional

from pydantic import BaseModel, Field, root_validator, validator


class EncoderConfig(BaseModel):
    """Shape of the hierarchical attention encoder.

    ### Serialize to JSON
    json_representation = cfg.json()

    ### Deserialize from JSON
    cfg = EncoderConfig.parse_raw(json_representation)
    """

    feat_dim: int = Field(88, description="Length of one speaker-turn feature vector.")
    turns_per_section: int = Field(4, description="N, consecutive turns grouped in a section.")
    sections: Optional[int] = Field(
        200, description="M, sections per conversation; None fits M to the corpus."
    )
    turn_hidden: int = Field(64, description="GRU units per direction at turn level.")
    section_hidden: int = Field(16, description="GRU units per direction at section level.")
    turn_ctx_dim: int = Field(128, description="Turn-level attention context size.")
    section_ctx_dim: int = Field(32, description="Section-level attention context size.")
    mask_padding: bool = Field(
        True, description="Exclude padded turns and sections from the recurrences and softmaxes."
    )

    class Config:
        allow_mutation = False

    @validator("feat_dim", "turns_per_section", "turn_hidden", "section_hidden", "turn_ctx_dim", "section_ctx_dim")
    def positive(cls, v, field):
        if v < 1:
            raise ValueError(f"{field.name} must be positive, got {v}")
        return v

    @validator("sections")
    def positive_sections(cls, v):
        if v is not None and v < 1:
            raise ValueError(f"sections must be positive, got {v}")
        return v

    @root_validator(skip_on_failure=True)
    def context_matches_hidden(cls, values):
        if values["turn_ctx_dim"] != 2 * values["turn_hidden"]:
            raise ValueError(
                f"turn_ctx_dim ({values['turn_ctx_dim']}) must equal 2·turn_hidden ({2 * values['turn_hidden']})"
            )
        if values["section_ctx_dim"] != 2 * values["section_hidden"]:
            raise ValueError(
                f"section_ctx_dim ({values['section_ctx_dim']}) must equal 2·section_hidden ({2 * values['section_hidden']})"
            )
        return values

    @property
    def embedding_dim(self) -> int:
        return 2 * self.section_hidden

    @property
    def capacity(self) -> Optional[int]:
        return None if self.sections is None else self.sections * self.turns_per_section

    def fit_sections(self, max_turns: int) -> "EncoderConfig":
        """Copy with M the smallest section count holding max_turns turns."""
        return self.copy(update={"sections": max(1, math.ceil(max_turns / self.turns_per_section))})

    def resolved(self, max_turns: int) -> "EncoderConfig":
        return self.fit_sections(max_turns) if self.sections is None else self
