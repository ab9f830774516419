"""scikit-learn style wrappers around the witness and optimizer routines.

Samples are probe-state directions: ``X`` has two columns, ``theta`` in
``[0, pi]`` and ``phi`` in ``[0, 2 pi]``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .coarse import CoarseGrainingMap, xform_from_angles
from .collisional import CollisionalModel
from .experiments import OptimizeConfig, optimize_unitary, resolve_coarse
from .witness import delta_d_grid, delta_d_n_grid


def _check_angles(X) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"X must have two columns (theta, phi), got {X.shape[1]}")
    if np.any(X[:, 0] < 0) or np.any(X[:, 0] > np.pi) or np.any(X[:, 1] < 0) or np.any(X[:, 1] > 2 * np.pi):
        raise ValueError("theta must lie in [0, pi] and phi in [0, 2 pi]")
    return X


class DistillationWitness(TransformerMixin, BaseEstimator):
    """Map probe directions to ``[delta_d, delta_d_n, delta_d_n - delta_d]``.

    Parameters
    ----------
    epsilon : float
        Correlation strength of the collisional model.
    copies : int
        Number of channel copies fed to the coarse-graining map.
    unitary : str
        ``"paper16"``, ``"pattern"``, ``"identity"`` or a path to a unitary or
        angle JSON document.
    """

    def __init__(self, epsilon=0.4, copies=2, unitary="paper16"):
        self.epsilon = epsilon
        self.copies = copies
        self.unitary = unitary

    def fit(self, X=None, y=None):
        if X is not None:
            _check_angles(X)
        self.model_ = CollisionalModel(self.epsilon)
        self.coarse_ = resolve_coarse(self.unitary, self.copies)
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = _check_angles(X)
        t, p = X[:, 0], X[:, 1]
        d1 = delta_d_grid(self.model_, t, p)
        dn = delta_d_n_grid(self.model_, self.coarse_, t, p, copies=self.copies)
        return np.column_stack([d1, dn, dn - d1])

    def get_feature_names_out(self, input_features=None):
        return np.array(["delta_d", "delta_d_n", "diff"], dtype=object)


class XFormUnitarySearch(BaseEstimator):
    """Search X-form coarse-graining unitaries for ``copies`` in ``{3, 4}``.

    ``fit`` runs the multi-start pattern search; afterwards ``transform``
    returns ``delta_d_n`` under the best unitary and ``score`` its maximum
    over the given directions.
    """

    def __init__(
        self,
        copies=3,
        epsilon=0.4,
        objective="max_delta_d_n",
        restarts=20,
        seed=0,
        max_iter=200,
        initial_step=float(np.pi / 8),
        shrink=0.5,
        theta_points=37,
        phi_points=13,
    ):
        self.copies = copies
        self.epsilon = epsilon
        self.objective = objective
        self.restarts = restarts
        self.seed = seed
        self.max_iter = max_iter
        self.initial_step = initial_step
        self.shrink = shrink
        self.theta_points = theta_points
        self.phi_points = phi_points

    def fit(self, X=None, y=None):
        cfg = OptimizeConfig(**self.get_params())
        result = optimize_unitary(cfg)
        self.result_ = result
        self.angles_ = np.array(result.params.block_angles)
        self.unitary_ = xform_from_angles(result.params)
        self.coarse_ = CoarseGrainingMap(self.unitary_, self.copies, name="optimized")
        self.objective_ = result.objective
        self.restarts_used_ = result.restarts_used
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "coarse_")
        X = _check_angles(X)
        return delta_d_n_grid(self.epsilon, self.coarse_, X[:, 0], X[:, 1])[:, None]

    def score(self, X, y=None):
        return float(self.transform(X).max())
