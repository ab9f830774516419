import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from nmdistill.estimators import DistillationWitness, XFormUnitarySearch
from nmdistill.witness import analytic_delta_d

X = np.array([[0.0, 0.0], [np.pi / 2, np.pi / 2], [1.0, 2.0]])


def test_witness_transform():
    est = DistillationWitness(epsilon=0.4)
    out = est.fit_transform(X)
    assert out.shape == (3, 3)
    np.testing.assert_allclose(out[:, 0], analytic_delta_d(0.4, X[:, 0], X[:, 1]), atol=1e-12)
    np.testing.assert_allclose(out[:, 2], out[:, 1] - out[:, 0], atol=1e-15)
    assert out[0, 1] == pytest.approx(0.48, abs=1e-12)
    assert list(est.get_feature_names_out()) == ["delta_d", "delta_d_n", "diff"]


def test_witness_params_and_clone():
    est = DistillationWitness(epsilon=0.3, copies=3, unitary="pattern")
    assert est.get_params() == {"epsilon": 0.3, "copies": 3, "unitary": "pattern"}
    c = clone(est).set_params(epsilon=0.1)
    assert c.epsilon == 0.1 and est.epsilon == 0.3
    assert c.fit(X).transform(X).shape == (3, 3)


def test_witness_validation():
    with pytest.raises(NotFittedError):
        DistillationWitness().transform(X)
    est = DistillationWitness().fit()
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        est.transform(np.array([[4.0, 0.0]]))


def test_unitary_search():
    est = XFormUnitarySearch(restarts=2, max_iter=4, seed=1)
    est.fit()
    assert est.angles_.shape == (16,)
    assert est.restarts_used_ == 2
    assert est.transform(X).shape == (3, 1)
    grid = np.column_stack([np.linspace(0, np.pi, 37), np.zeros(37)])
    assert est.score(grid) == pytest.approx(est.objective_, abs=1e-12)
    assert clone(est).get_params() == est.get_params()
