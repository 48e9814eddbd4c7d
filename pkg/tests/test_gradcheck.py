import time

import numpy as np

from convembed.encoder.encoder import ConversationEncoder
from convembed.encoder.params import BoundParams, init_params
from convembed.numeric import ops
from convembed.numeric.gradcheck import finite_diff_check
from convembed.trainer.loss import contrastive_loss

from tests.conftest import make_conversation, tiny_config


def test_quadratic_passes():
    report = finite_diff_check(lambda tape, p: ops.mean(ops.square(p[0])), [np.array([3.0])])
    assert report.passed
    assert report.max_rel_err < 1e-6
    assert report.n_checked == 1


def test_abs_at_zero_is_excluded():
    def loss(tape, p):
        x = p[0]
        return ops.mean(ops.add(ops.relu(x), ops.relu(ops.scale(x, -1.0))))

    report = finite_diff_check(loss, [np.array([0.0])])
    assert report.n_unreliable == 1
    assert report.n_checked == 0
    assert report.passed


def test_wrong_gradient_fails():
    def broken(tape, p):
        x = p[0]
        # value of x², gradient of x
        node = ops.square(x)
        record = tape.records[-1]
        tape.records[-1] = record._replace(backward=lambda g: (g,))
        return ops.mean(node)

    report = finite_diff_check(broken, [np.array([2.0])])
    assert not report.passed
    assert report.worst == (0, 0)


def test_subsampled_coordinates():
    params = [np.ones((4, 5)), np.ones(3)]
    report = finite_diff_check(
        lambda tape, p: ops.add(ops.mean(ops.square(p[0])), ops.mean(ops.tanh(p[1]))),
        params,
        n_coords=7,
    )
    assert report.n_checked + report.n_unreliable == 7


def test_full_siamese_loss_on_tiny_config_matches_finite_differences():
    cfg = tiny_config()
    params = init_params(cfg, seed=11)
    names = params.names
    encoder = ConversationEncoder(cfg, params)
    convs = [make_conversation("a", 5, seed=1), make_conversation("b", 6, seed=2)]
    grids = encoder.grids(convs)

    def loss_fn(tape, nodes):
        encoding = encoder.forward(grids, BoundParams(dict(zip(names, nodes))))
        x1 = ops.gather_rows(encoding.embeddings, np.array([0]))
        x2 = ops.gather_rows(encoding.embeddings, np.array([1]))
        return ops.mean(contrastive_loss(x1, x2, np.array([0.0]), margin=2.0))

    start = time.monotonic()
    report = finite_diff_check(loss_fn, [a for _, a in params], n_coords=220, seed=5)
    assert time.monotonic() - start < 60.0
    assert report.n_checked >= 200
    assert report.max_rel_err < 1e-4
    assert report.passed
