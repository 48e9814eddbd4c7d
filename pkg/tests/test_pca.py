import numpy as np
import pytest

from convembed.eval.pca import pca2
from convembed.utils.errors import StatisticsError


def test_projected_variances_are_covariance_eigenvalues(rng):
    X = rng.normal(size=(50, 6)) @ rng.normal(size=(6, 6))
    result = pca2(X)
    expected = np.sort(np.linalg.eigvalsh(np.cov(X.T)))[::-1][:2]
    np.testing.assert_allclose(result.eigenvalues, expected, rtol=0, atol=1e-8)
    np.testing.assert_allclose(result.coordinates.var(axis=0, ddof=1), expected, rtol=0, atol=1e-8)
    assert 0.0 < result.explained_ratio <= 1.0


def test_components_are_orthonormal_and_signed(rng):
    result = pca2(rng.normal(size=(20, 4)))
    np.testing.assert_allclose(result.components @ result.components.T, np.eye(2), atol=1e-12)
    for component in result.components:
        assert component[np.argmax(np.abs(component))] > 0


def test_sign_convention_makes_the_projection_deterministic(rng):
    X = rng.normal(size=(15, 3))
    np.testing.assert_allclose(pca2(X).coordinates, pca2(X.copy()).coordinates, atol=0)


def test_line_collapses_to_first_component():
    t = np.linspace(-1.0, 1.0, 9)
    result = pca2(np.column_stack([t, 2 * t, np.zeros_like(t)]))
    assert result.eigenvalues[1] == pytest.approx(0.0, abs=1e-12)
    assert result.explained_ratio == pytest.approx(1.0)


@pytest.mark.parametrize("shape", [(2, 4), (5, 1)])
def test_too_small(shape):
    with pytest.raises(StatisticsError):
        pca2(np.zeros(shape))


def test_row_order_does_not_change_the_projection(rng):
    X = rng.normal(size=(30, 5)) * np.array([5.0, 3.0, 1.0, 0.5, 0.2])
    order = rng.permutation(30)
    straight = pca2(X)
    shuffled = pca2(X[order])
    np.testing.assert_allclose(shuffled.coordinates, straight.coordinates[order], atol=1e-9)
    np.testing.assert_allclose(shuffled.eigenvalues, straight.eigenvalues, atol=1e-9)


def test_isotropic_cloud_explains_two_dimensions_worth(rng):
    d = 10
    result = pca2(rng.normal(size=(2000, d)))
    assert result.explained_ratio == pytest.approx(2.0 / d, abs=0.05)
