from pydantic import BaseModel, Field, validator


class TrainConfig(BaseModel):
    """Siamese training hyperparameters.

    ### Serialize to JSON
    json_representation = cfg.json()

    ### Deserialize from JSON
    cfg = TrainConfig.parse_raw(json_representation)
    """

    margin: float = Field(2.0, description="m, distance beyond which negative pairs stop contributing.")
    batch_size: int = Field(64, description="Pairs per optimizer step; the last batch may be partial.")
    epochs: int = Field(30, description="Passes over the pair set.")
    beta1: float = Field(0.9, description="Adam first-moment decay.")
    beta2: float = Field(0.999, description="Adam second-moment decay.")
    learning_rate: float = Field(0.001, description="Adam step size.")
    adam_eps: float = Field(1e-8, description="Adam denominator offset.")
    seed: int = Field(0, description="Seed for parameter init and per-epoch pair shuffling.")

    class Config:
        allow_mutation = False

    @validator("margin", "learning_rate", "adam_eps")
    def positive(cls, v, field):
        if not v > 0:
            raise ValueError(f"{field.name} must be positive, got {v}")
        return v

    @validator("batch_size")
    def positive_batch(cls, v):
        if v < 1:
            raise ValueError(f"batch_size must be at least 1, got {v}")
        return v

    @validator("epochs")
    def non_negative_epochs(cls, v):
        if v < 0:
            raise ValueError(f"epochs must be non-negative, got {v}")
        return v

    @validator("beta1", "beta2")
    def decay_in_unit_interval(cls, v, field):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"{field.name} must lie in [0, 1), got {v}")
        return v
