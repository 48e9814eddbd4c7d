import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convembed.numeric import ops
from convembed.numeric.tape import Tape, gradient_of
from convembed.utils.errors import TapeError


def test_direct_dependence_on_bias():
    tape = Tape()
    W = tape.variable(np.zeros((3, 2)))
    b = tape.variable(np.zeros(3))
    y = ops.affine(W, np.array([1.0, -1.0]), b)
    loss = ops.dot(y, np.array([1.0, 0.0, 0.0]))
    gW, gb = gradient_of(loss, [W, b])
    assert gb.tolist() == [1.0, 0.0, 0.0]
    assert gW[0].tolist() == [1.0, -1.0]


def test_stationary_point_of_squared_tanh():
    tape = Tape()
    x = tape.variable(np.array(0.0))
    (gx,) = gradient_of(ops.square(ops.tanh(x)), [x])
    assert gx == 0.0


def test_unused_parameter_gets_zero_gradient():
    tape = Tape()
    a = tape.variable(np.array([1.0, 2.0]))
    unused = tape.variable(np.ones((2, 2)))
    ga, gu = gradient_of(ops.mean(ops.square(a)), [a, unused])
    np.testing.assert_allclose(ga, [1.0, 2.0])
    assert np.array_equal(gu, np.zeros((2, 2)))


def test_shared_operand_accumulates():
    tape = Tape()
    x = tape.variable(np.array([3.0]))
    y = ops.hadamard(x, x) + x
    (gx,) = gradient_of(ops.mean(y), [x])
    assert gx.tolist() == [7.0]


def test_records_replayed_in_reverse_order():
    tape = Tape()
    x = tape.variable(np.array([0.5, -0.5]))
    y = ops.sigmoid(ops.tanh(x))
    ops.mean(y)
    assert [r.op for r in tape.records] == ["tanh", "sigmoid", "mean"]


def test_non_scalar_output_is_rejected():
    tape = Tape()
    x = tape.variable(np.ones(3))
    with pytest.raises(TapeError):
        gradient_of(ops.tanh(x), [x])


def test_output_from_another_tape_is_rejected():
    first, second = Tape(), Tape()
    x = first.variable(np.ones(2))
    loss = ops.mean(x)
    with pytest.raises(TapeError):
        second.gradient_of(loss, [x])


def test_constant_output_is_rejected():
    with pytest.raises(TapeError):
        gradient_of(ops.mean(np.ones(2)), [])


def test_mixing_tapes_in_one_op_fails():
    a = Tape().variable(np.ones(2))
    b = Tape().variable(np.ones(2))
    with pytest.raises(TapeError):
        ops.add(a, b)


def test_variable_copies_its_value():
    value = np.array([1.0, 2.0])
    x = Tape().variable(value)
    value[0] = 99.0
    assert x.value[0] == 1.0


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
    st.integers(0, 2**16),
)
def test_gradient_is_linear_in_the_output(a, b, seed):
    rng = np.random.default_rng(seed)
    W0 = rng.normal(size=(3, 4))
    x = rng.normal(size=4)

    def grad(weights):
        tape = Tape()
        W = tape.variable(W0)
        h = ops.affine(W, x)
        l1 = ops.mean(ops.square(ops.tanh(h)))
        l2 = ops.mean(ops.sigmoid(h))
        loss = ops.add(ops.scale(l1, weights[0]), ops.scale(l2, weights[1]))
        return gradient_of(loss, [W])[0]

    combined = grad((a, b))
    separate = a * grad((1.0, 0.0)) + b * grad((0.0, 1.0))
    np.testing.assert_allclose(combined, separate, atol=1e-10)
