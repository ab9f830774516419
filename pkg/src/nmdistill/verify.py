"""Self-checks run by ``nmdistill verify``.

Each check returns a :class:`Check`; the CLI exits nonzero if any fails.
Random cases come from a fixed seed so a run is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels as ch
from .coarse import CoarseGrainingMap, paper_u16
from .collisional import lambda1, lambda2, v21
from .experiments import APPENDIX_B_PRESETS, appendix_b, eig_scan
from .matcore import kron, partial_trace, trace_norm
from .witness import bloch_state, delta_d_grid, delta_d_n_grid

SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def random_density(rng, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g + g.conj().T


def random_channel(rng, d_in: int, d_out: int | None = None, n_kraus: int = 3) -> ch.QuantumChannel:
    """Kraus channel cut from a Haar-ish random isometry."""
    d_out = d_in if d_out is None else d_out
    g = rng.normal(size=(d_out * n_kraus, d_in)) + 1j * rng.normal(size=(d_out * n_kraus, d_in))
    q, _ = np.linalg.qr(g)
    return ch.from_kraus(list(q.reshape(n_kraus, d_out, d_in)))


def _kron_assoc(rng):
    worst = 0.0
    for _ in range(20):
        a, b, c = (random_hermitian(rng, 2) for _ in range(3))
        worst = max(worst, np.abs(kron(kron(a, b), c) - kron(a, kron(b, c))).max())
    return worst < 1e-13, f"max deviation {worst:.2e}"


def _partial_trace_steps(rng):
    worst = 0.0
    for _ in range(20):
        rho = random_density(rng, 8)
        joint = partial_trace(rho, [2, 2, 2], [0])
        step = partial_trace(partial_trace(rho, [2, 2, 2], [0, 1]), [2, 2], [0])
        worst = max(worst, np.abs(joint - step).max())
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _cptp_closure(rng):
    bad = sum(not ch.is_cptp(ch.compose(random_channel(rng, 2), random_channel(rng, 2))) for _ in range(50))
    return bad == 0, f"{bad} of 50 compositions failed"


def _contraction(rng):
    worst = -np.inf
    for _ in range(50):
        lam = random_channel(rng, 2)
        ext = ch.tensor(lam, ch.identity_channel(2))
        for m, a in ((lam, random_hermitian(rng, 2)), (ext, random_hermitian(rng, 4))):
            worst = max(worst, trace_norm(ch.apply(m, a)) - trace_norm(a))
    return worst <= 1e-10, f"max norm growth {worst:.2e}"


def _tensor_divisibility(rng):
    worst = 0.0
    probes = [random_density(rng, 2**3) for _ in range(5)]
    for e in (0.1, 0.3, 0.4):
        for n in (2, 3):
            lhs = ch.compose(ch.tensor_power(v21(e), n), ch.tensor_power(lambda1(e), n))
            rhs = ch.tensor_power(lambda2(e), n)
            for p in probes:
                p = partial_trace(p, [2] * 3, range(n)) if n < 3 else p
                worst = max(worst, np.abs(ch.apply(lhs, p) - ch.apply(rhs, p)).max())
    return worst < 1e-10, f"max deviation {worst:.2e}"


def _collisional_cptp(_rng):
    grid = np.linspace(0, 0.5, 51)
    ok1 = all(ch.is_cptp(lambda1(e)) and ch.is_cptp(lambda2(e)) for e in grid)
    worst = max(ch.min_choi_eig(v21(e)) for e in grid[1:-1])
    return ok1 and worst < -1e-6, f"L1/L2 CPTP: {ok1}; largest V21 zeta on (0, 0.5): {worst:.3e}"


def _two_copy_calibration(_rng):
    lam = CoarseGrainingMap.paper().channel
    worst = 0.0
    for r in np.linspace(0, 1, 11):
        for t in np.linspace(0, np.pi, 19):
            rho = bloch_state(r, t, 0.7)
            out = ch.apply(lam, np.kron(rho, rho))
            c = r * np.cos(t)
            want = np.diag([(1 + c) ** 2 / 4, (1 - c) ** 2 / 4 + (1 - c * c) / 2])
            worst = max(worst, np.abs(out - want).max())
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _witness_symmetry(_rng):
    cg = CoarseGrainingMap.paper()
    t = np.linspace(0, np.pi, 37)[:, None]
    p = np.linspace(0, 2 * np.pi, 73)[None, :]
    worst_sym = worst_phi = 0.0
    for e in (0.1, 0.2, 0.3, 0.4):
        d = delta_d_n_grid(e, cg, t, p)
        worst_sym = max(worst_sym, np.abs(d - delta_d_n_grid(e, cg, np.pi - t, p)).max())
        worst_phi = max(worst_phi, np.ptp(d, axis=1).max())
    return worst_sym < 1e-12 and worst_phi < 1e-10, f"symmetry {worst_sym:.2e}, phi spread {worst_phi:.2e}"


def _sign_law(_rng):
    # At eps = 0 the dynamics is the identity and the witness vanishes, so the
    # equivalence is checked on eps > 0 and eps = 0 is checked to give exactly 0.
    cg = CoarseGrainingMap.paper()
    grid = np.linspace(0, 0.5, 51)
    at_zero = float(delta_d_n_grid(0.0, cg, 0.0, 0.0))
    bad = [float(e) for e in grid[1:] if (delta_d_n_grid(e, cg, 0.0, 0.0) >= -1e-12) != (e >= 0.25 - 1e-12)]
    return not bad and at_zero == 0.0, f"violations at {bad}; value at eps=0: {at_zero:.1e}"


def _weak_backflow(_rng):
    d1 = delta_d_grid(0.2, np.linspace(0, np.pi, 37)[:, None], np.linspace(0, 2 * np.pi, 73)[None, :])
    return bool(d1.max() <= 1e-10), f"max delta_d at eps=0.2: {d1.max():.3e}"


def _zeta_orderings(_rng):
    strong = [round(0.25 + 0.01 * k, 2) for k in range(1, 25)]
    rows = eig_scan(strong, copies=(2,))
    z = {(r.epsilon, r.mode): r.zeta for r in rows}
    bad = [e for e in strong if not abs(z[e, "single"]) < abs(z[e, "distilled"]) <= abs(z[e, "tensor"])]
    return not bad, f"ordering |single| < |distilled| <= |tensor| fails at eps {bad}"


def _zeta_weak(_rng):
    weak = [round(0.01 * k, 2) for k in range(1, 26)]
    rows = eig_scan(weak)
    bad = [
        (r.epsilon, r.mode, r.copies)
        for r in rows
        if (r.mode == "distilled" and r.zeta < -1e-10) or (r.mode == "tensor" and r.zeta >= -1e-6)
    ]
    return not bad, f"violations {bad}"


def _appendix_b(_rng):
    rows = appendix_b(APPENDIX_B_PRESETS["antipodal"])
    worst = max(abs(r.d_after - abs(np.cos(r.theta))) for r in rows)
    grew = [r.theta for r in rows if r.d_after > r.d_before + 1e-12]
    return worst < 1e-12 and not grew, f"|cos| deviation {worst:.2e}; increases at {grew}"


def _paper_unitary(_rng):
    u = paper_u16()
    dev = np.abs(u.T @ u - np.eye(16)).max()
    return dev == 0 and bool(ch.is_cptp(CoarseGrainingMap.paper().channel)), f"unitarity deviation {dev}"


CHECKS: dict[str, Callable] = {
    "matcore.kron_associativity": _kron_assoc,
    "matcore.partial_trace_composition": _partial_trace_steps,
    "channels.cptp_closure": _cptp_closure,
    "channels.trace_norm_contraction": _contraction,
    "channels.tensor_divisibility": _tensor_divisibility,
    "collisional.cptp_and_v21_negativity": _collisional_cptp,
    "coarse.paper_unitary": _paper_unitary,
    "coarse.two_copy_calibration": _two_copy_calibration,
    "witness.symmetry_and_phi_independence": _witness_symmetry,
    "witness.sign_law": _sign_law,
    "witness.weak_regime_no_backflow": _weak_backflow,
    "experiments.appendix_b": _appendix_b,
    "experiments.zeta_weak_regime": _zeta_weak,
    "experiments.zeta_strong_ordering": _zeta_orderings,
}


def run_checks(names=None) -> list[Check]:
    rng = np.random.default_rng(SEED)
    out = []
    for name, fn in CHECKS.items():
        if names and name not in names:
            continue
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not an aborted run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(Check(name, bool(ok), detail))
    return out
