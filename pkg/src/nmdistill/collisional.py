"""Two-collision qubit dynamics with correlated environment particles.

After one collision the system has passed through

    L1(rho) = (1 - 2e) rho + e (Z rho Z + X rho X)

and after two collisions through

    L2(rho) = ((1 - 2e)^2 + 4e^2) rho + 2e(1 - 2e) (Z rho Z + X rho X),

with ``0 <= e <= 1/2`` tuning the correlations between environment particles.
Both are Pauli-diagonal, with transfer coefficients ``(1, a, b, a)`` and
``(1, a^2 + 4e^2, b^2, a^2 + 4e^2)`` where ``a = 1 - 2e`` and ``b = 1 - 4e``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channels import PAULI_I, PAULI_X, PAULI_Z, LinearMap, QuantumChannel, from_kraus, pauli_diagonal_map
from .errors import SingularDynamics

STRONG_THRESHOLD = 0.25


class Regime(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class CollisionalModel:
    epsilon: float

    def __post_init__(self):
        e = float(self.epsilon)
        if not (0.0 <= e <= 0.5) or not np.isfinite(e):
            raise ValueError(f"epsilon must lie in [0, 0.5], got {self.epsilon}")
        object.__setattr__(self, "epsilon", e)

    def lambda1(self) -> QuantumChannel:
        return lambda1(self)

    def lambda2(self) -> QuantumChannel:
        return lambda2(self)

    def v21(self) -> LinearMap:
        return v21(self)

    def regime(self) -> Regime:
        return regime(self)


def _model(m) -> CollisionalModel:
    return m if isinstance(m, CollisionalModel) else CollisionalModel(m)


def _weighted_paulis(w_id: float, w_flip: float) -> QuantumChannel:
    # clip guards sqrt against -1e-17 round-off at the interval ends
    return from_kraus(
        [
            np.sqrt(max(w_id, 0.0)) * PAULI_I,
            np.sqrt(max(w_flip, 0.0)) * PAULI_Z,
            np.sqrt(max(w_flip, 0.0)) * PAULI_X,
        ]
    )


def lambda1(m) -> QuantumChannel:
    """Channel after the first collision."""
    e = _model(m).epsilon
    return _weighted_paulis(1 - 2 * e, e)


def lambda2(m) -> QuantumChannel:
    """Channel after the second collision."""
    e = _model(m).epsilon
    return _weighted_paulis((1 - 2 * e) ** 2 + 4 * e * e, 2 * e * (1 - 2 * e))


def transfer_coefficients(m, step: int) -> np.ndarray:
    """Pauli transfer coefficients ``(t_I, t_X, t_Y, t_Z)`` after ``step`` collisions."""
    e = _model(m).epsilon
    a, b = 1 - 2 * e, 1 - 4 * e
    if step == 0:
        return np.ones(4)
    if step == 1:
        return np.array([1.0, a, b, a])
    if step == 2:
        c = a * a + 4 * e * e
        return np.array([1.0, c, b * b, c])
    raise ValueError("only steps 0, 1 and 2 exist in this model")


def v21(m) -> LinearMap:
    """Intermediate map from the first to the second collision, in closed form.

    The Y coefficient ``(1 - 4e)^2 / (1 - 4e)`` is taken as ``1 - 4e``, so the
    map stays defined at ``e = 1/4`` where numerical inversion breaks down.

    Raises
    ------
    SingularDynamics
        At ``e = 1/2``, where the X and Z coefficients of the first step vanish.
    """
    e = _model(m).epsilon
    a = 1 - 2 * e
    if a == 0:
        raise SingularDynamics("V21 is undefined at epsilon = 0.5")
    c = (a * a + 4 * e * e) / a
    return pauli_diagonal_map([1.0, c, 1 - 4 * e, c])


def regime(m) -> Regime:
    return Regime.STRONG if _model(m).epsilon > STRONG_THRESHOLD else Regime.WEAK
