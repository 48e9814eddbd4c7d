"""GRU, bidirectional GRU and additive attention over tape ops.

Sequences are lists of per-step nodes. A step is either one vector or a
row-batch holding the same step of several sequences; masks are [L] for one
sequence and [B × L] for a row-batch.
"""

from typing import List, Sequence, Tuple, Union

import numpy as np

from convembed.encoder.params import AttentionBlock, GRUBlock
from convembed.numeric import ops
from convembed.numeric.tape import ArrayLike, Node
from convembed.utils.errors import EmptyAttentionError, MaskError, ShapeError


def gru_cell(x: ArrayLike, h: ArrayLike, block: GRUBlock) -> Node:
    """One GRU step; the reset gate scales the state before its recurrent product."""
    x, h = ops.as_node(x), ops.as_node(h)
    hidden = ops.as_node(block.U_z).shape[0]
    if h.shape[-1] != hidden or x.shape[:-1] != h.shape[:-1]:
        raise ShapeError(f"gru_cell: input {x.shape} and state {h.shape} do not fit hidden size {hidden}")

    z = ops.sigmoid(ops.affine(block.W_z, x, block.b_z) + ops.affine(block.U_z, h))
    r = ops.sigmoid(ops.affine(block.W_r, x, block.b_r) + ops.affine(block.U_r, h))
    candidate = ops.tanh(ops.affine(block.W_h, x, block.b_h) + ops.affine(block.U_h, r * h))
    return h + z * (candidate - h)


def check_prefix_mask(mask: np.ndarray) -> np.ndarray:
    mask = np.atleast_2d(np.asarray(mask, dtype=bool))
    # a prefix mask never turns back on after its first gap
    if (mask[:, 1:] & ~mask[:, :-1]).any():
        raise MaskError("mask is not a prefix pattern: a real position follows padding")
    return mask


def _run_direction(
    seq: Sequence[Node], mask: np.ndarray, block: GRUBlock, reverse: bool, batched: bool
) -> List[Node]:
    hidden = ops.as_node(block.U_z).shape[0]
    rows = mask.shape[0]
    zeros = np.zeros((rows, hidden)) if batched else np.zeros(hidden)
    h: Union[Node, np.ndarray] = zeros
    outputs: List[Node] = [None] * len(seq)
    steps = range(len(seq) - 1, -1, -1) if reverse else range(len(seq))
    for t in steps:
        column = mask[:, t]
        if not column.any():
            # padding everywhere: the state carries over, the output is zero
            outputs[t] = ops.as_node(zeros)
            continue
        row_mask = column if batched else column[0]
        h = ops.select_rows(row_mask, gru_cell(seq[t], h, block), h)
        outputs[t] = h if column.all() else ops.select_rows(row_mask, h, zeros)
    return outputs


def bigru_encode(
    seq: Sequence[ArrayLike], mask: np.ndarray, fwd: GRUBlock, bwd: GRUBlock
) -> List[Node]:
    """[→h_j, ←h_j] per position; padded positions hold zero vectors.

    The forward direction reads positions 1…L, the backward one L…1, where L
    is the real length. Both start from zero states.
    """
    seq = [ops.as_node(x) for x in seq]
    mask = np.asarray(mask, dtype=bool)
    batched = mask.ndim == 2
    if mask.shape[-1] != len(seq):
        raise ShapeError(f"bigru_encode: {len(seq)} steps but mask of shape {mask.shape}")
    mask2d = check_prefix_mask(mask)
    forward = _run_direction(seq, mask2d, fwd, reverse=False, batched=batched)
    backward = _run_direction(seq, mask2d, bwd, reverse=True, batched=batched)
    return [ops.concat(f, b) for f, b in zip(forward, backward)]


def attend(
    hiddens: Sequence[ArrayLike], mask: np.ndarray, block: AttentionBlock
) -> Tuple[Node, Node]:
    """Context-vector attention: u_j = tanh(W h_j + b), α = softmax(u_jᵀu), Σ α_j h_j."""
    hiddens = [ops.as_node(h) for h in hiddens]
    mask = np.asarray(mask, dtype=bool)
    if mask.shape[-1] != len(hiddens):
        raise ShapeError(f"attend: {len(hiddens)} positions but mask of shape {mask.shape}")
    if not mask.any(axis=-1).all():
        raise EmptyAttentionError("attend: a sequence has no unmasked position")

    logits = []
    for j, h in enumerate(hiddens):
        if not mask[..., j].any():
            logits.append(np.zeros(mask.shape[:-1]))
            continue
        u = ops.tanh(ops.affine(block.W, h, block.b))
        logits.append(ops.dot(u, block.u))
    weights = ops.masked_softmax(ops.stack(logits), mask)
    return ops.weighted_sum(weights, hiddens), weights
