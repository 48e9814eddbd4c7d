from __future__ import annotations

from typing import Dict, Generic, Iterator, List, NamedTuple, Optional, Tuple, TypeVar, Union

import numpy as np

from convembed.encoder.config import EncoderConfig
from convembed.numeric.tape import Node, Tape
from convembed.utils.errors import ShapeError

T = TypeVar("T", np.ndarray, Node)

GRU_BLOCKS = ("turn_fwd", "turn_bwd", "section_fwd", "section_bwd")
GRU_FIELDS = ("W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h")
ATTENTION_BLOCKS = ("turn_attention", "section_attention")
ATTENTION_FIELDS = ("W", "b", "u")


class GRUBlock(NamedTuple):
    """Weights of one GRU direction. W_* read the input, U_* the previous state."""

    W_z: Union[np.ndarray, Node]
    W_r: Union[np.ndarray, Node]
    W_h: Union[np.ndarray, Node]
    U_z: Union[np.ndarray, Node]
    U_r: Union[np.ndarray, Node]
    U_h: Union[np.ndarray, Node]
    b_z: Union[np.ndarray, Node]
    b_r: Union[np.ndarray, Node]
    b_h: Union[np.ndarray, Node]


class AttentionBlock(NamedTuple):
    W: Union[np.ndarray, Node]
    b: Union[np.ndarray, Node]
    u: Union[np.ndarray, Node]


def parameter_shapes(cfg: EncoderConfig) -> Dict[str, Tuple[int, ...]]:
    """Canonical parameter names and shapes, in canonical order."""
    inputs = {
        "turn_fwd": (cfg.feat_dim, cfg.turn_hidden),
        "turn_bwd": (cfg.feat_dim, cfg.turn_hidden),
        "section_fwd": (2 * cfg.turn_hidden, cfg.section_hidden),
        "section_bwd": (2 * cfg.turn_hidden, cfg.section_hidden),
    }
    shapes: Dict[str, Tuple[int, ...]] = {}
    for block in GRU_BLOCKS:
        n_in, hidden = inputs[block]
        for gate in ("z", "r", "h"):
            shapes[f"{block}.W_{gate}"] = (hidden, n_in)
        for gate in ("z", "r", "h"):
            shapes[f"{block}.U_{gate}"] = (hidden, hidden)
        for gate in ("z", "r", "h"):
            shapes[f"{block}.b_{gate}"] = (hidden,)
    attention = {
        "turn_attention": (2 * cfg.turn_hidden, cfg.turn_ctx_dim),
        "section_attention": (2 * cfg.section_hidden, cfg.section_ctx_dim),
    }
    for block in ATTENTION_BLOCKS:
        n_in, ctx = attention[block]
        shapes[f"{block}.W"] = (ctx, n_in)
        shapes[f"{block}.b"] = (ctx,)
        shapes[f"{block}.u"] = (ctx,)
    return shapes


class BoundParams(Generic[T]):
    """Parameters viewed either as raw arrays or as variables of one tape."""

    def __init__(self, values: Dict[str, T]):
        self.values = values

    def gru(self, block: str) -> GRUBlock:
        return GRUBlock(*(self.values[f"{block}.{f}"] for f in GRU_FIELDS))

    def attention(self, block: str) -> AttentionBlock:
        return AttentionBlock(*(self.values[f"{block}.{f}"] for f in ATTENTION_FIELDS))


class EncoderParams:
    """All learned weights of the encoder, keyed by canonical name.

    Arrays are treated as immutable; an optimizer step returns a new instance.
    """

    def __init__(self, cfg: EncoderConfig, arrays: Dict[str, np.ndarray]):
        expected = parameter_shapes(cfg)
        missing = sorted(set(expected) - set(arrays))
        extra = sorted(set(arrays) - set(expected))
        if missing or extra:
            raise ShapeError(f"parameter names differ from config: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            if tuple(arrays[name].shape) != shape:
                raise ShapeError(f"{name}: shape {tuple(arrays[name].shape)} does not match config shape {shape}")
        self.cfg = cfg
        self.arrays: Dict[str, np.ndarray] = {
            name: np.asarray(arrays[name], dtype=np.float64) for name in expected
        }

    @property
    def names(self) -> List[str]:
        return list(self.arrays)

    def __iter__(self) -> Iterator[Tuple[str, np.ndarray]]:
        return iter(self.arrays.items())

    def __len__(self) -> int:
        return len(self.arrays)

    @property
    def count(self) -> int:
        return int(sum(a.size for a in self.arrays.values()))

    def raw(self) -> BoundParams[np.ndarray]:
        return BoundParams(self.arrays)

    def bind(self, tape: Optional[Tape]) -> Tuple[BoundParams, List[Node]]:
        """Watch every parameter on tape; without a tape, return the raw arrays."""
        if tape is None:
            return self.raw(), []
        nodes = {name: tape.variable(a) for name, a in self.arrays.items()}
        return BoundParams(nodes), list(nodes.values())

    def replace(self, arrays: List[np.ndarray]) -> "EncoderParams":
        return EncoderParams(self.cfg, dict(zip(self.names, arrays)))

    def equals(self, other: "EncoderParams") -> bool:
        return self.names == other.names and all(
            np.array_equal(a, other.arrays[name]) for name, a in self.arrays.items()
        )


def init_params(cfg: EncoderConfig, seed: int) -> EncoderParams:
    """Glorot-uniform weights, zero biases, small uniform context vectors."""
    rng = np.random.default_rng(seed)
    arrays: Dict[str, np.ndarray] = {}
    for name, shape in parameter_shapes(cfg).items():
        field = name.split(".")[1]
        if field.startswith("b"):
            arrays[name] = np.zeros(shape)
        elif field == "u":
            arrays[name] = rng.uniform(-0.1, 0.1, size=shape)
        else:
            fan_out, fan_in = shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            arrays[name] = rng.uniform(-limit, limit, size=shape)
    return EncoderParams(cfg, arrays)
