from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from convembed.trainer.abstracts.optimizer import AbstractOptimizer
from convembed.trainer.config import TrainConfig
from convembed.utils.errors import ShapeError


class AdamState(NamedTuple):
    """First and second moment accumulators, one array per parameter."""

    m: List[np.ndarray]
    v: List[np.ndarray]

    @classmethod
    def zeros_like(cls, params: List[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(
    params: List[np.ndarray],
    grads: List[np.ndarray],
    state: AdamState,
    t: int,
    cfg: TrainConfig,
) -> Tuple[List[np.ndarray], AdamState]:
    """Bias-corrected Adam update for step t (1-based)."""
    if t < 1:
        raise ValueError(f"Adam step index starts at 1, got {t}")
    if not len(params) == len(grads) == len(state.m) == len(state.v):
        raise ShapeError(
            f"{len(params)} parameters, {len(grads)} gradients, {len(state.m)} moment arrays"
        )

    bias1 = 1.0 - cfg.beta1**t
    bias2 = 1.0 - cfg.beta2**t
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if not p.shape == g.shape == m.shape == v.shape:
            raise ShapeError(f"Adam: parameter {p.shape} vs gradient {g.shape}")
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * (g * g)
        m_hat = m / bias1
        v_hat = v / bias2
        new_params.append(p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(new_m, new_v)


class Adam(AbstractOptimizer):
    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.state: Optional[AdamState] = None
        self.t = 0

    @property
    def steps_taken(self) -> int:
        return self.t

    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> List[np.ndarray]:
        if self.state is None:
            self.state = AdamState.zeros_like(params)
        self.t += 1
        new_params, self.state = adam_step(params, grads, self.state, self.t, self.cfg)
        return new_params
