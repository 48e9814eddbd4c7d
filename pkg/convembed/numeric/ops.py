"""Primitive differentiable ops over vectors and row-batches of vectors.

Every op accepts nodes, arrays or scalars. Operands that are not tracked by a
tape are constants. When any operand is tracked, the op is recorded on that
tape together with its local gradient rule.

A "row-batch" is a matrix whose rows are independent vectors; ops that take a
vector also take a row-batch and treat each row separately. There is no other
broadcasting.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from convembed.numeric.tape import ArrayLike, Node, Tape
from convembed.utils.errors import EmptyAttentionError, ShapeError, TapeError

DISTANCE_EPS = 1e-12


class NonlinearityKind(str, Enum):
    TANH = "tanh"
    SIGMOID = "sigmoid"
    HADAMARD = "hadamard"


def as_node(x: ArrayLike) -> Node:
    if isinstance(x, Node):
        return x
    return Node(np.asarray(x, dtype=np.float64))


def _tape_of(*nodes: Node) -> Optional[Tape]:
    tape = None
    for node in nodes:
        if node.tape is None:
            continue
        if tape is None:
            tape = node.tape
        elif node.tape is not tape:
            raise TapeError("operands are recorded on different tapes")
    return tape


def _emit(
    op: str,
    value: np.ndarray,
    parents: Sequence[Node],
    backward: Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]],
) -> Node:
    tape = _tape_of(*parents)
    if tape is None:
        return Node(value)
    return tape.record(op, value, parents, backward)


def _same_shape(op: str, a: Node, b: Node) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def affine(W: ArrayLike, x: ArrayLike, b: Optional[ArrayLike] = None) -> Node:
    """Wx + b for a vector x, or x Wᵀ + b row-wise for a row-batch x."""
    W, x = as_node(W), as_node(x)
    if W.ndim != 2 or x.ndim not in (1, 2) or x.shape[-1] != W.shape[1]:
        raise ShapeError(f"affine: W{W.shape} cannot multiply x{x.shape}")
    parents = [W, x]
    value = x.value @ W.value.T
    if b is not None:
        b = as_node(b)
        if b.shape != (W.shape[0],):
            raise ShapeError(f"affine: bias {b.shape} does not match W{W.shape}")
        value = value + b.value
        parents.append(b)

    need_W, need_x = W.tracked, x.tracked
    need_b = b is not None and b.tracked

    def backward(g):
        gW = gx = gb = None
        if need_W:
            gW = np.outer(g, x.value) if x.ndim == 1 else g.T @ x.value
        if need_x:
            gx = g @ W.value
        if need_b:
            gb = g if g.ndim == 1 else g.sum(axis=0)
        return gW, gx, gb

    return _emit("affine", value, parents, backward)


def add(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    _same_shape("add", a, b)
    return _emit("add", a.value + b.value, [a, b], lambda g: (g, g))


def subtract(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    _same_shape("subtract", a, b)
    return _emit("subtract", a.value - b.value, [a, b], lambda g: (g, -g))


def hadamard(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    _same_shape("hadamard", a, b)
    return _emit(
        "hadamard", a.value * b.value, [a, b], lambda g: (g * b.value, g * a.value)
    )


def tanh(a: ArrayLike) -> Node:
    a = as_node(a)
    y = np.tanh(a.value)
    return _emit("tanh", y, [a], lambda g: (g * (1.0 - y * y),))


def sigmoid(a: ArrayLike) -> Node:
    a = as_node(a)
    y = expit(a.value)
    return _emit("sigmoid", y, [a], lambda g: (g * y * (1.0 - y),))


def elementwise_nonlinearity(
    kind: NonlinearityKind, a: ArrayLike, b: Optional[ArrayLike] = None
) -> Node:
    kind = NonlinearityKind(kind)
    if kind == NonlinearityKind.TANH:
        return tanh(a)
    if kind == NonlinearityKind.SIGMOID:
        return sigmoid(a)
    if b is None:
        raise ShapeError("hadamard needs two operands")
    return hadamard(a, b)


def square(a: ArrayLike) -> Node:
    a = as_node(a)
    return _emit("square", a.value * a.value, [a], lambda g: (2.0 * a.value * g,))


def relu(a: ArrayLike) -> Node:
    """max(0, a); the subgradient at exactly 0 is 0."""
    a = as_node(a)
    active = a.value > 0.0
    return _emit("relu", np.where(active, a.value, 0.0), [a], lambda g: (g * active,))


def scale(a: ArrayLike, c: float) -> Node:
    a = as_node(a)
    return _emit("scale", a.value * c, [a], lambda g: (g * c,))


def shift(a: ArrayLike, c: float) -> Node:
    a = as_node(a)
    return _emit("shift", a.value + c, [a], lambda g: (g,))


def mean(a: ArrayLike) -> Node:
    a = as_node(a)
    n = a.value.size
    return _emit(
        "mean", np.asarray(a.value.mean()), [a], lambda g: (np.full(a.shape, float(g) / n),)
    )


def dot(a: ArrayLike, v: ArrayLike) -> Node:
    """aᵀv for a vector a (scalar result), or row-wise for a row-batch a."""
    a, v = as_node(a), as_node(v)
    if v.ndim != 1 or a.ndim not in (1, 2) or a.shape[-1] != v.shape[0]:
        raise ShapeError(f"dot: a{a.shape} vs v{v.shape}")
    value = np.asarray(a.value @ v.value)

    def backward(g):
        if a.ndim == 1:
            return g * v.value, g * a.value
        return np.outer(g, v.value), g @ a.value

    return _emit("dot", value, [a, v], backward)


def concat(a: ArrayLike, b: ArrayLike) -> Node:
    """Concatenation along the last axis."""
    a, b = as_node(a), as_node(b)
    if a.ndim != b.ndim or a.shape[:-1] != b.shape[:-1]:
        raise ShapeError(f"concat: {a.shape} vs {b.shape}")
    k = a.shape[-1]
    value = np.concatenate([a.value, b.value], axis=-1)
    return _emit("concat", value, [a, b], lambda g: (g[..., :k], g[..., k:]))


def stack(items: Sequence[ArrayLike]) -> Node:
    """Stack n scalars into a vector, or n row-vectors [R] into columns [R×n]."""
    nodes = [as_node(item) for item in items]
    if not nodes:
        raise ShapeError("stack: no operands")
    shape = nodes[0].shape
    if len(shape) > 1 or any(n.shape != shape for n in nodes):
        raise ShapeError(f"stack: operands must share one shape of rank ≤ 1, got {[n.shape for n in nodes]}")
    value = np.stack([n.value for n in nodes], axis=-1)
    return _emit(
        "stack", value, nodes, lambda g: tuple(g[..., j] for j in range(len(nodes)))
    )


def gather_rows(a: ArrayLike, index: np.ndarray) -> Node:
    """Rows of a row-batch picked by index; index -1 yields a zero row."""
    a = as_node(a)
    if a.ndim != 2:
        raise ShapeError(f"gather_rows: expected a row-batch, got {a.shape}")
    index = np.asarray(index, dtype=np.int64)
    valid = index >= 0
    value = np.zeros((index.shape[0], a.shape[1]))
    value[valid] = a.value[index[valid]]

    def backward(g):
        ga = np.zeros(a.shape)
        np.add.at(ga, index[valid], g[valid])
        return (ga,)

    return _emit("gather_rows", value, [a], backward)


def select_rows(row_mask: np.ndarray, a: ArrayLike, b: ArrayLike) -> Node:
    """Row i of a where row_mask[i] is set, else row i of b (a vector takes a 0-d mask)."""
    a, b = as_node(a), as_node(b)
    _same_shape("select_rows", a, b)
    row_mask = np.asarray(row_mask, dtype=bool)
    if row_mask.shape != a.shape[:-1]:
        raise ShapeError(f"select_rows: mask {row_mask.shape} vs operands {a.shape}")
    keep = row_mask[..., None]
    value = np.where(keep, a.value, b.value)
    return _emit(
        "select_rows",
        value,
        [a, b],
        lambda g: (np.where(keep, g, 0.0), np.where(keep, 0.0, g)),
    )


def masked_softmax(logits: ArrayLike, mask: np.ndarray) -> Node:
    """Softmax over the unmasked entries of a vector or of each row.

    Masked entries are exactly zero. Max-subtraction keeps exp in range.
    """
    logits = as_node(logits)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != logits.shape or logits.ndim not in (1, 2):
        raise ShapeError(f"masked_softmax: logits {logits.shape} vs mask {mask.shape}")
    if not mask.any(axis=-1).all():
        raise EmptyAttentionError("masked_softmax: every position is masked out")

    shifted = np.where(mask, logits.value, -np.inf)
    shifted = shifted - shifted.max(axis=-1, keepdims=True)
    e = np.where(mask, np.exp(shifted), 0.0)
    y = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return _emit("masked_softmax", y, [logits], backward)


def weighted_sum(weights: ArrayLike, vectors: Sequence[ArrayLike]) -> Node:
    """Σⱼ wⱼ·vⱼ; with row-batches, weights is [R×n] and every vⱼ is [R×d]."""
    weights = as_node(weights)
    vectors = [as_node(v) for v in vectors]
    n = len(vectors)
    if weights.shape[-1] != n or weights.ndim not in (1, 2):
        raise ShapeError(f"weighted_sum: {weights.shape} weights for {n} vectors")
    expected = (vectors[0].shape[-1],) if weights.ndim == 1 else (weights.shape[0], vectors[0].shape[-1])
    for v in vectors:
        if v.shape != expected:
            raise ShapeError(f"weighted_sum: vector {v.shape}, expected {expected}")

    w = weights.value
    if weights.ndim == 1:
        value = sum(w[j] * vectors[j].value for j in range(n))
    else:
        value = sum(w[:, j : j + 1] * vectors[j].value for j in range(n))

    def backward(g):
        if weights.ndim == 1:
            gw = np.array([np.dot(g, v.value) for v in vectors])
            gv = [w[j] * g for j in range(n)]
        else:
            gw = np.stack([(g * v.value).sum(axis=1) for v in vectors], axis=1)
            gv = [w[:, j : j + 1] * g for j in range(n)]
        return (gw, *gv)

    return _emit("weighted_sum", np.asarray(value, dtype=np.float64), [weights, *vectors], backward)


def euclidean_distance(x1: ArrayLike, x2: ArrayLike) -> Node:
    """√(Σ(x1−x2)² + ε): a scalar for vectors, one distance per row for row-batches."""
    x1, x2 = as_node(x1), as_node(x2)
    if x1.shape != x2.shape or x1.ndim not in (1, 2):
        raise ShapeError(f"euclidean_distance: {x1.shape} vs {x2.shape}")
    diff = x1.value - x2.value
    d = np.sqrt((diff * diff).sum(axis=-1) + DISTANCE_EPS)

    def backward(g):
        gd = (np.asarray(g) / d)[..., None] * diff if x1.ndim == 2 else (g / d) * diff
        return gd, -gd

    return _emit("euclidean_distance", np.asarray(d), [x1, x2], backward)
