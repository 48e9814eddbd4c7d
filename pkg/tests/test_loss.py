import numpy as np
import pytest

from convembed.numeric import ops
from convembed.numeric.tape import Tape, gradient_of
from convembed.trainer.loss import contrastive_loss, loss_from_distance


@pytest.mark.parametrize(
    "d,y,m,expected",
    [
        (0.0, 1, 2.0, 0.0),
        (1.0, 1, 2.0, 0.5),
        (0.0, 0, 2.0, 2.0),
        (2.5, 0, 2.0, 0.0),
        (1.5, 0, 2.0, 0.125),
    ],
)
def test_closed_form(d, y, m, expected):
    assert abs(float(loss_from_distance(np.array(d), y, m).value) - expected) < 1e-12


def test_identical_embeddings_give_epsilon_distance():
    x = np.array([0.3, -1.2, 0.5])
    assert float(ops.euclidean_distance(x, x).value) <= 1e-6 + 1e-18
    assert float(contrastive_loss(x, x, 1, 2.0).value) < 1e-12
    assert float(contrastive_loss(x, x, 0, 2.0).value) == pytest.approx(2.0, abs=1e-5)


def test_symmetric_in_the_pair(rng):
    x1, x2 = rng.normal(size=4), rng.normal(size=4)
    for y in (0, 1):
        assert contrastive_loss(x1, x2, y, 2.0).value == contrastive_loss(x2, x1, y, 2.0).value


def test_row_batches_give_one_loss_per_pair(rng):
    x1, x2 = rng.normal(size=(3, 4)), rng.normal(size=(3, 4))
    y = np.array([1.0, 0.0, 1.0])
    batched = contrastive_loss(x1, x2, y, 2.0).value
    single = [float(contrastive_loss(x1[i], x2[i], int(y[i]), 2.0).value) for i in range(3)]
    np.testing.assert_allclose(batched, single, rtol=0, atol=1e-15)


@pytest.mark.parametrize("d,y", [(0.7, 1), (0.7, 0), (1.9, 0), (3.0, 0)])
def test_derivative_in_distance(d, y):
    tape = Tape()
    node = tape.variable(np.array(d))
    (grad,) = gradient_of(loss_from_distance(node, y, 2.0), [node])
    h = 1e-6
    numeric = (
        float(loss_from_distance(np.array(d + h), y, 2.0).value)
        - float(loss_from_distance(np.array(d - h), y, 2.0).value)
    ) / (2 * h)
    assert float(grad) == pytest.approx(numeric, abs=1e-7)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        loss_from_distance(np.array(1.0), 2, 2.0)
    with pytest.raises(ValueError):
        loss_from_distance(np.array(1.0), 1, 0.0)
