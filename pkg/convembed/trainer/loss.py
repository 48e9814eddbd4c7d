from typing import Union

import numpy as np

from convembed.numeric import ops
from convembed.numeric.tape import ArrayLike, Node


def loss_from_distance(d: ArrayLike, y: Union[int, np.ndarray], margin: float) -> Node:
    """½·y·d² + ½·(1 − y)·max(0, m − d)², elementwise over d."""
    d = ops.as_node(d)
    y = np.broadcast_to(np.asarray(y, dtype=np.float64), d.shape)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("pair labels must be 0 or 1")
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    pull = ops.hadamard(ops.square(d), y)
    hinge = ops.relu(ops.shift(ops.scale(d, -1.0), margin))
    push = ops.hadamard(ops.square(hinge), 1.0 - y)
    return ops.scale(ops.add(pull, push), 0.5)


def contrastive_loss(x1: ArrayLike, x2: ArrayLike, y: Union[int, np.ndarray], margin: float) -> Node:
    """Contrastive loss of one pair of embeddings, or per pair for row-batches."""
    return loss_from_distance(ops.euclidean_distance(x1, x2), y, margin)
