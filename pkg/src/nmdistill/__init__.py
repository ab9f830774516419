"""Distilling non-Markovian signatures from collisional qubit dynamics.

The package is layered: :mod:`matcore` (dense linear algebra),
:mod:`channels` (linear maps and CPTP checks), :mod:`collisional` (the
two-step correlated-environment model), :mod:`coarse` (coarse-graining of
``n`` copies to one qubit), :mod:`witness` (trace-distance and Choi markers),
:mod:`experiments` (sweeps, scans and unitary search) and :mod:`cli`.
"""

__version__ = "0.1.0"

from .channels import LinearMap, QuantumChannel, compose, from_kraus, is_cptp, tensor, tensor_power, to_choi
from .coarse import CoarseGrainingMap, XFormParams, paper_u16, xform_from_angles
from .collisional import CollisionalModel, Regime, lambda1, lambda2, v21
from .errors import (
    ConfigError,
    DimensionMismatch,
    NMDistillError,
    NotHermitian,
    NotTracePreserving,
    ResourceLimit,
    ShapeMismatch,
    SingularDynamics,
)
from .witness import bloch_pair, delta_d, delta_d_n, witness_report, zeta_report

__all__ = [
    "__version__",
    "LinearMap",
    "QuantumChannel",
    "compose",
    "from_kraus",
    "is_cptp",
    "tensor",
    "tensor_power",
    "to_choi",
    "CoarseGrainingMap",
    "XFormParams",
    "paper_u16",
    "xform_from_angles",
    "CollisionalModel",
    "Regime",
    "lambda1",
    "lambda2",
    "v21",
    "ConfigError",
    "DimensionMismatch",
    "NMDistillError",
    "NotHermitian",
    "NotTracePreserving",
    "ResourceLimit",
    "ShapeMismatch",
    "SingularDynamics",
    "bloch_pair",
    "delta_d",
    "delta_d_n",
    "witness_report",
    "zeta_report",
]
