from __future__ import annotations

from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from convembed.utils.errors import TapeError

ArrayLike = Union["Node", np.ndarray, float, int]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Node:
    """A 64-bit array value, optionally living on a tape.

    Nodes without a tape are constants: ops over constants only compute values.
    """

    __slots__ = ("value", "tape", "slot")

    def __init__(self, value: np.ndarray, tape: Optional["Tape"] = None, slot: int = -1):
        self.value = value
        self.tape = tape
        self.slot = slot

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def tracked(self) -> bool:
        return self.tape is not None

    def __add__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.add(self, other)

    def __radd__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.add(other, self)

    def __sub__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.subtract(self, other)

    def __rsub__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.subtract(other, self)

    def __mul__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.hadamard(self, other)

    def __rmul__(self, other: ArrayLike) -> "Node":
        from convembed.numeric import ops

        return ops.hadamard(other, self)

    def __repr__(self) -> str:
        where = f"slot={self.slot}" if self.tracked else "constant"
        return f"Node(shape={self.shape}, {where})"


class TapeRecord(NamedTuple):
    op: str
    result_slot: int
    parent_slots: Tuple[int, ...]
    backward: BackwardFn


class Tape:
    """Ordered record of the primitive ops of one forward pass.

    A tape is used by one thread at a time. Parameters are watched as leaf
    variables; their arrays are never mutated while the tape is alive.
    """

    def __init__(self):
        self.records: List[TapeRecord] = []
        self._n_slots = 0

    def __len__(self) -> int:
        return len(self.records)

    def _next_slot(self) -> int:
        slot = self._n_slots
        self._n_slots += 1
        return slot

    def variable(self, value: Union[np.ndarray, float]) -> Node:
        """Watch an array as a differentiable leaf."""
        array = np.array(value, dtype=np.float64)
        return Node(array, self, self._next_slot())

    def record(
        self,
        op: str,
        value: np.ndarray,
        parents: Sequence[Node],
        backward: BackwardFn,
    ) -> Node:
        node = Node(value, self, self._next_slot())
        self.records.append(
            TapeRecord(
                op=op,
                result_slot=node.slot,
                parent_slots=tuple(p.slot if p.tape is self else -1 for p in parents),
                backward=backward,
            )
        )
        return node

    def gradient_of(self, output: Node, params: Sequence[Node]) -> List[np.ndarray]:
        """Reverse-mode gradients of a scalar output with respect to params.

        Records are replayed in exact reverse order of recording; gradients of
        operands shared by several ops accumulate additively.
        """
        if output.tape is not self or output.slot < 0:
            raise TapeError("output was not produced on this tape")
        if output.value.size != 1:
            raise TapeError(f"output must be a scalar, got shape {output.shape}")
        for p in params:
            if p.tape is not self:
                raise TapeError(f"parameter {p!r} is not watched by this tape")

        grads: List[Optional[np.ndarray]] = [None] * self._n_slots
        grads[output.slot] = np.ones_like(output.value)

        for record in reversed(self.records):
            if record.result_slot > output.slot:
                continue
            g = grads[record.result_slot]
            if g is None:
                continue
            parent_grads = record.backward(g)
            for slot, pg in zip(record.parent_slots, parent_grads):
                if slot < 0 or pg is None:
                    continue
                if grads[slot] is None:
                    grads[slot] = np.array(pg, dtype=np.float64, copy=True)
                else:
                    grads[slot] += pg

        return [
            np.zeros_like(p.value) if grads[p.slot] is None else grads[p.slot].reshape(p.shape)
            for p in params
        ]


def gradient_of(output: Node, params: Sequence[Node]) -> List[np.ndarray]:
    """Gradients of a scalar output recorded on a tape, for every requested parameter.

    Parameters the output does not depend on receive zero gradients.
    """
    if output.tape is None:
        raise TapeError("output is a constant, it was not recorded on any tape")
    return output.tape.gradient_of(output, params)
