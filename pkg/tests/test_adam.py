import numpy as np
import pytest

from convembed.numeric import ops
from convembed.numeric.tape import Tape, gradient_of
from convembed.trainer.concrete.adam import Adam, AdamState, adam_step
from convembed.trainer.config import TrainConfig
from convembed.utils.errors import ShapeError


def test_first_step_moves_by_learning_rate():
    cfg = TrainConfig()
    params = [np.array([1.0, -2.0, 0.5])]
    grads = [np.array([3.0, -0.2, 1e-3])]
    new, state = adam_step(params, grads, AdamState.zeros_like(params), 1, cfg)
    delta = new[0] - params[0]
    np.testing.assert_allclose(delta, -0.001 * np.sign(grads[0]), rtol=1e-4)
    np.testing.assert_allclose(state.m[0], 0.1 * grads[0])


def test_zero_gradient_leaves_parameters_unchanged():
    opt = Adam(TrainConfig())
    params = [np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([5.0])]
    current = params
    for _ in range(5):
        current = opt.step(current, [np.zeros_like(p) for p in current])
    for before, after in zip(params, current):
        assert np.array_equal(before, after)
    assert opt.steps_taken == 5


def minimize_square(learning_rate, start, steps=500):
    opt = Adam(TrainConfig(learning_rate=learning_rate))
    w = [np.array(start, dtype=np.float64)]
    for _ in range(steps):
        tape = Tape()
        node = tape.variable(w[0])
        grads = gradient_of(ops.mean(ops.square(node)), [node])
        w = opt.step(w, grads)
    return w[0]


def test_minimizes_a_quadratic():
    assert abs(minimize_square(0.01, [1.0])[0]) < 1e-3


def test_step_size_bounds_progress():
    w = minimize_square(0.001, [1.0])[0]
    assert 0.1 < w < 1.0
    assert 1.0 - w <= 500 * 0.001


def test_inputs_are_not_mutated():
    params = [np.array([1.0])]
    state = AdamState.zeros_like(params)
    adam_step(params, [np.array([1.0])], state, 1, TrainConfig())
    assert params[0][0] == 1.0 and state.m[0][0] == 0.0


def test_step_index_starts_at_one():
    params = [np.array([1.0])]
    with pytest.raises(ValueError):
        adam_step(params, [np.array([1.0])], AdamState.zeros_like(params), 0, TrainConfig())


def test_shape_mismatch():
    params = [np.zeros(3)]
    with pytest.raises(ShapeError):
        adam_step(params, [np.zeros(2)], AdamState.zeros_like(params), 1, TrainConfig())
    with pytest.raises(ShapeError):
        adam_step(params, [], AdamState.zeros_like(params), 1, TrainConfig())
