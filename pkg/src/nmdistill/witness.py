"""Non-Markovianity witnesses for the collisional model.

Two markers are computed.  The first is the change in trace distance of a pair
of pure orthogonal probe states between the first and second collision,
optionally after ``n`` copies have been compressed by a coarse-graining map.
The second is ``zeta``, the least eigenvalue of the normalized Choi matrix of
an intermediate map (single copy, tensor power, or compressed tensor power).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import channels as ch
from .coarse import CoarseGrainingMap
from .collisional import _model, lambda1, lambda2, v21
from .errors import DimensionMismatch
from .matcore import kron, trace_norm

ZETA_MODES = ("single", "tensor", "distilled")


def bloch_state(r, theta, phi) -> np.ndarray:
    """``(I + r n.sigma) / 2`` for ``n = (sin t cos p, sin t sin p, cos t)``.

    Broadcasts over array arguments; a negative ``r`` points the Bloch vector
    the opposite way.
    """
    r, theta, phi = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (r, theta, phi)))
    x = r * np.sin(theta) * np.cos(phi)
    y = r * np.sin(theta) * np.sin(phi)
    z = r * np.cos(theta)
    out = np.empty(r.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = (1 + z) / 2
    out[..., 1, 1] = (1 - z) / 2
    out[..., 0, 1] = (x - 1j * y) / 2
    out[..., 1, 0] = (x + 1j * y) / 2
    return out


@dataclass(frozen=True, eq=False)
class StatePair:
    theta: float
    phi: float
    rho1: np.ndarray
    rho2: np.ndarray


def bloch_pair(theta: float, phi: float) -> StatePair:
    """Pure orthogonal pair with antipodal Bloch vectors; ``rho1`` points along ``(theta, phi)``."""
    if not (0 <= theta <= np.pi) or not (0 <= phi <= 2 * np.pi):
        raise ValueError(f"(theta, phi) = ({theta}, {phi}) outside [0, pi] x [0, 2 pi]")
    return StatePair(float(theta), float(phi), bloch_state(1.0, theta, phi), bloch_state(-1.0, theta, phi))


def distinguishability(r1, r2):
    return 0.5 * trace_norm(np.asarray(r2) - np.asarray(r1))


def _grid_pairs(theta, phi):
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    return bloch_state(1.0, theta, phi), bloch_state(-1.0, theta, phi)


def _power(rho: np.ndarray, n: int) -> np.ndarray:
    out = rho
    for _ in range(n - 1):
        out = kron(out, rho)
    return out


def distinguishability_change(early, late, rho1, rho2, copies: int = 1, compress=None):
    """``D`` after ``late`` minus ``D`` after ``early`` on ``copies`` copies.

    Because the inputs are product states, ``L^{⊗n}(rho^{⊗n})`` is formed as
    ``L(rho)^{⊗n}``.  ``compress`` (a linear map) is applied to the
    ``2**n``-dimensional difference before the trace norm.
    """
    values = []
    for dyn in (late, early):
        diff = _power(ch.apply(dyn, rho2), copies) - _power(ch.apply(dyn, rho1), copies)
        if compress is not None:
            diff = ch.apply(compress, diff)
        values.append(0.5 * np.asarray(trace_norm(diff)))
    out = values[0] - values[1]
    return float(out) if np.ndim(out) == 0 else out


def delta_d_grid(model, theta, phi) -> np.ndarray:
    m = _model(model)
    rho1, rho2 = _grid_pairs(theta, phi)
    return np.asarray(distinguishability_change(lambda1(m), lambda2(m), rho1, rho2))


def delta_d(model, pair: StatePair) -> float:
    """Single-copy change ``(||L2(rho2 - rho1)||_1 - ||L1(rho2 - rho1)||_1) / 2``."""
    m = _model(model)
    return distinguishability_change(lambda1(m), lambda2(m), pair.rho1, pair.rho2)


def analytic_delta_d(epsilon, theta, phi):
    """Closed form of :func:`delta_d` for the collisional model (broadcasts)."""
    e = np.asarray(epsilon, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    q = np.cos(2 * theta) + 2 * np.cos(2 * phi) * np.sin(theta) ** 2
    w = e * (-1 + 2 * e)
    first = np.abs(2 + 2 * e * (-5 + 7 * e) - 2 * e * (-1 + 3 * e) * q) ** 0.5
    second = np.abs(1 + 2 * w * (5 + 14 * w) - 2 * w * (1 + 6 * w) * q) ** 0.5
    out = -np.sqrt(2) / 2 * first + second
    return float(out) if np.ndim(out) == 0 else out


def _resolve_copies(cg: Optional[CoarseGrainingMap], copies: Optional[int]) -> int:
    if cg is None:
        return 1 if copies is None else int(copies)
    if copies is not None and copies != cg.copies:
        raise DimensionMismatch(f"coarse-graining map takes {cg.copies} copies, not {copies}")
    return cg.copies


def delta_d_n_grid(model, cg: Optional[CoarseGrainingMap], theta, phi, copies: Optional[int] = None) -> np.ndarray:
    m = _model(model)
    n = _resolve_copies(cg, copies)
    rho1, rho2 = _grid_pairs(theta, phi)
    compress = None if cg is None else cg.channel
    return np.asarray(distinguishability_change(lambda1(m), lambda2(m), rho1, rho2, n, compress))


def delta_d_n(model, cg: Optional[CoarseGrainingMap], pair: StatePair, copies: Optional[int] = None) -> float:
    """``n``-copy change in distinguishability after coarse-graining.

    ``cg=None`` means no compression; with one copy this equals :func:`delta_d`.
    """
    m = _model(model)
    n = _resolve_copies(cg, copies)
    compress = None if cg is None else cg.channel
    return distinguishability_change(lambda1(m), lambda2(m), pair.rho1, pair.rho2, n, compress)


def analytic_delta_d2(epsilon, theta, u1, u13, v4, v16):
    """Closed form of the two-copy change for an X-form unitary with the given entries."""
    e = np.asarray(epsilon, dtype=float)
    eps_factor = np.abs(1 - 2 * e) - np.abs(1 - 4 * e + 8 * e * e)
    u_factor = abs(abs(u1) ** 2 - abs(u13) ** 2) + abs(abs(v16) ** 2 - abs(v4) ** 2)
    out = -0.5 * eps_factor * u_factor * np.abs(np.cos(np.asarray(theta, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def xform_entries(u) -> dict:
    """``u_i = U[i, i]`` and ``v_i = U[i, 17 - i]`` (1-based) used by :func:`analytic_delta_d2`."""
    u = np.asarray(u)
    dim = u.shape[0]
    main = lambda i: u[i - 1, i - 1]
    sec = lambda i: u[i - 1, dim - i]
    return {"u1": main(1), "u13": main(13), "v4": sec(4), "v16": sec(16)}


def zeta_report(model, cg: Optional[CoarseGrainingMap], n: int, mode: str) -> float:
    """Least Choi eigenvalue of ``V21`` (single), ``V21^{⊗n}`` (tensor) or ``lam ∘ V21^{⊗n}`` (distilled)."""
    m = _model(model)
    v = v21(m)
    if mode == "single":
        return ch.min_choi_eig(v)
    if mode == "tensor":
        return ch.min_choi_eig(ch.tensor_power(v, n))
    if mode == "distilled":
        if cg is None or cg.copies != n:
            raise DimensionMismatch(f"distilled mode needs a coarse-graining map for {n} copies")
        return ch.min_choi_eig(ch.compose(cg.channel, ch.tensor_power(v, n)))
    raise ValueError(f"mode must be one of {ZETA_MODES}, got {mode!r}")


@dataclass(frozen=True)
class WitnessReport:
    epsilon: float
    copies: int
    unitary: str
    theta: float
    phi: float
    delta_d: float
    delta_d_n: float
    zeta_single: float
    zeta_tensor: float
    zeta_distilled: float

    def as_dict(self) -> dict:
        return asdict(self)


def witness_report(model, cg: CoarseGrainingMap, pair: StatePair) -> WitnessReport:
    m = _model(model)
    n = cg.copies
    return WitnessReport(
        epsilon=m.epsilon,
        copies=n,
        unitary=cg.name,
        theta=pair.theta,
        phi=pair.phi,
        delta_d=delta_d(m, pair),
        delta_d_n=delta_d_n(m, cg, pair),
        zeta_single=zeta_report(m, cg, n, "single"),
        zeta_tensor=zeta_report(m, cg, n, "tensor"),
        zeta_distilled=zeta_report(m, cg, n, "distilled"),
    )
