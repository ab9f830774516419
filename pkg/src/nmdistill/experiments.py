"""Reproduction harness: grid sweeps, maxima search, zeta scans, the
coarse-graining-only study and the X-form unitary search."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .channels import apply
from .coarse import CoarseGrainingMap, XFormParams, load_unitary, paper_pattern_angles, xform_from_angles
from .collisional import CollisionalModel
from .errors import ConfigError, SingularDynamics
from .rng import SplitMix64
from .witness import (
    WitnessReport,
    bloch_state,
    delta_d_grid,
    delta_d_n_grid,
    distinguishability,
    zeta_report,
)

log = logging.getLogger(__name__)

UNITARY_SOURCES = ("paper16", "pattern", "identity")
OBJECTIVES = ("max_delta_d_n", "max_gain")
MIN_STEP = 1e-4
GOLDEN_TOL = 1e-5
DEFAULT_SCAN_EPSILONS = tuple(round(0.01 * k, 2) for k in range(50))


def worker_count() -> int:
    """Thread cap from ``NMDISTILL_THREADS`` (0 or unset means one per core)."""
    raw = os.environ.get("NMDISTILL_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"NMDISTILL_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError("NMDISTILL_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _check_epsilon(e: float) -> float:
    e = float(e)
    if not 0.0 <= e <= 0.5:
        raise ConfigError(f"epsilon {e} outside [0, 0.5]")
    return e


def resolve_coarse(source: str, copies: int) -> Optional[CoarseGrainingMap]:
    """Map a unitary source name (or a JSON file path) to a coarse-graining map.

    ``identity`` means no compression at all and yields ``None``.
    """
    if source == "identity":
        return None
    if source == "paper16":
        if copies != 2:
            raise ConfigError("the paper16 unitary is defined for two copies only")
        return CoarseGrainingMap.paper()
    if source == "pattern":
        return CoarseGrainingMap.pattern(copies)
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"unitary source {source!r} is neither {UNITARY_SOURCES} nor a file")
    try:
        return CoarseGrainingMap(load_unitary(path), copies, name=path.stem)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load unitary from {path}: {exc}") from exc


@dataclass(frozen=True)
class SweepConfig:
    epsilon: tuple = (0.4,)
    copies: int = 2
    unitary: str = "paper16"
    theta_points: int = 181
    phi_points: int = 361

    def __post_init__(self):
        eps = self.epsilon
        eps = (eps,) if np.ndim(eps) == 0 else tuple(eps)
        if not eps:
            raise ConfigError("at least one epsilon value is required")
        object.__setattr__(self, "epsilon", tuple(_check_epsilon(e) for e in eps))
        if self.theta_points < 1 or self.phi_points < 1:
            raise ConfigError("grids need at least one point")
        if not 1 <= self.copies <= 4:
            raise ConfigError(f"copies must be in 1..4, got {self.copies}")

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.theta_points)

    @property
    def phis(self) -> np.ndarray:
        return np.linspace(0.0, 2 * np.pi, self.phi_points)


def _zetas(model: CollisionalModel, cg: Optional[CoarseGrainingMap], n: int) -> tuple:
    try:
        single = zeta_report(model, None, n, "single")
        tensor = zeta_report(model, None, n, "tensor")
        distilled = tensor if cg is None else zeta_report(model, cg, n, "distilled")
    except SingularDynamics:
        return (np.nan, np.nan, np.nan)
    return single, tensor, distilled


def sweep_arrays(cfg: SweepConfig, epsilon: float):
    """``(delta_d, delta_d_n)`` on the ``theta x phi`` mesh for one ``epsilon``."""
    cg = resolve_coarse(cfg.unitary, cfg.copies)
    th, ph = np.meshgrid(cfg.thetas, cfg.phis, indexing="ij")
    d1 = delta_d_grid(epsilon, th, ph)
    dn = delta_d_n_grid(epsilon, cg, th, ph, copies=cfg.copies)
    return d1, dn


def grid_sweep(cfg: SweepConfig) -> list[WitnessReport]:
    """One report per ``(epsilon, theta, phi)``, ordered by index."""
    cg = resolve_coarse(cfg.unitary, cfg.copies)
    name = cfg.unitary if cg is None else cg.name
    rows = []
    for e in cfg.epsilon:
        model = CollisionalModel(e)
        d1, dn = sweep_arrays(cfg, e)
        zs, zt, zd = _zetas(model, cg, cfg.copies)
        for i, t in enumerate(cfg.thetas):
            for j, p in enumerate(cfg.phis):
                rows.append(
                    WitnessReport(e, cfg.copies, name, float(t), float(p), float(d1[i, j]), float(dn[i, j]), zs, zt, zd)
                )
    return rows


def sweep_rows(reports: Sequence[WitnessReport]):
    for r in reports:
        yield (r.epsilon, r.theta, r.phi, r.delta_d, r.delta_d_n, r.delta_d_n - r.delta_d)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    candidates = [(a, f(a)), (c, fc), (d, fd), (b, f(b))]
    return max(candidates, key=lambda t: t[1])


@dataclass(frozen=True)
class MaximaReport:
    epsilon: float
    value: float
    grid_max: float
    points: tuple
    theta_points: int
    phi_points: int

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "value": self.value,
            "grid_max": self.grid_max,
            "points": [list(p) for p in self.points],
            "theta_points": self.theta_points,
            "phi_points": self.phi_points,
        }


def _local_maxima(z: np.ndarray, periodic_phi: bool) -> np.ndarray:
    if periodic_phi:
        core = z[:, :-1]
        padded = np.pad(core, ((1, 1), (0, 0)), constant_values=-np.inf)
        padded = np.concatenate([padded[:, -1:], padded, padded[:, :1]], axis=1)
    else:
        core = z
        padded = np.pad(core, 1, constant_values=-np.inf)
    mask = np.ones(core.shape, dtype=bool)
    rows, cols = core.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= core >= padded[1 + di : 1 + di + rows, 1 + dj : 1 + dj + cols]
    return np.argwhere(mask)


def max_diff(cfg: SweepConfig, max_candidates: int = 64) -> MaximaReport:
    """Largest ``delta_d_n - delta_d`` over the grid, refined by golden-section search.

    Every grid local maximum close to the grid maximum is polished by
    alternating golden-section line searches in ``theta`` and ``phi`` within
    one grid cell; refined points that tie with the best are returned after
    merging duplicates (``phi`` taken modulo ``2 pi``).
    """
    if len(cfg.epsilon) != 1:
        raise ConfigError("max_diff takes a single epsilon")
    e = cfg.epsilon[0]
    cg = resolve_coarse(cfg.unitary, cfg.copies)
    thetas, phis = cfg.thetas, cfg.phis
    d1, dn = sweep_arrays(cfg, e)
    diff = dn - d1
    grid_max = float(diff.max())
    if diff.max() - diff.min() < 1e-14:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        return MaximaReport(e, grid_max, grid_max, ((float(thetas[i]), float(phis[j])),), len(thetas), len(phis))

    def value(t, p):
        return float(delta_d_n_grid(e, cg, t, p, copies=cfg.copies) - delta_d_grid(e, t, p))

    periodic = len(phis) > 2 and np.isclose(phis[-1] - phis[0], 2 * np.pi)
    cands = _local_maxima(diff, periodic)
    vals = diff[cands[:, 0], cands[:, 1]]
    keep = np.argsort(-vals, kind="stable")[:max_candidates]
    cands = [c for c, v in zip(cands[keep], vals[keep]) if v >= grid_max - 0.01]
    dt = thetas[1] - thetas[0] if len(thetas) > 1 else 0.0
    dp = phis[1] - phis[0] if len(phis) > 1 else 0.0

    refined = []
    for i, j in cands:
        t, p = float(thetas[i]), float(phis[j])
        t_lo, t_hi = max(0.0, t - dt), min(np.pi, t + dt)
        p_lo, p_hi = p - dp, p + dp
        best = value(t, p)
        for _ in range(50):
            t_new, _ = golden_section_max(lambda x: value(x, p), t_lo, t_hi) if dt else (t, best)
            p_new, best_new = golden_section_max(lambda y: value(t_new, y), p_lo, p_hi) if dp else (p, value(t_new, p))
            moved = max(abs(t_new - t), abs(p_new - p))
            if best_new >= best:
                t, p, best = t_new, p_new, best_new
            if moved < GOLDEN_TOL:
                break
        refined.append((best, t, float(np.mod(p, 2 * np.pi))))

    top = max(r[0] for r in refined)
    points = []
    for v, t, p in sorted(refined, key=lambda r: (-r[0], r[1], r[2])):
        if v < top - 1e-7:
            continue
        dup = any(
            abs(t - t2) < 1e-3 and min(abs(p - p2), 2 * np.pi - abs(p - p2)) < 1e-3 for t2, p2 in points
        )
        if not dup:
            points.append((t, p))
    points.sort()
    return MaximaReport(e, max(top, grid_max), grid_max, tuple(points), len(thetas), len(phis))


@dataclass(frozen=True)
class EigRow:
    epsilon: float
    copies: int
    mode: str
    zeta: float


def eig_scan(
    epsilons: Sequence[float] = DEFAULT_SCAN_EPSILONS,
    modes: Sequence[str] = ("single", "tensor", "distilled"),
    copies: Sequence[int] = (2, 3, 4),
    unitaries: Optional[dict] = None,
) -> list[EigRow]:
    """``zeta`` for each epsilon, mode and copy number.

    The distilled mode uses the two-copy permutation for ``n = 2`` and its
    generalized pattern for ``n = 3, 4`` unless ``unitaries`` maps ``n`` to
    another :class:`CoarseGrainingMap`.  ``single`` rows carry ``copies = 1``.
    """
    unitaries = dict(unitaries or {})
    for e in epsilons:
        if not 0.0 <= e < 0.5:
            raise ConfigError(f"eig_scan needs epsilon in [0, 0.5), got {e}")
    rows = []
    for e in epsilons:
        model = CollisionalModel(e)
        if "single" in modes:
            rows.append(EigRow(float(e), 1, "single", zeta_report(model, None, 1, "single")))
        for n in copies:
            if "tensor" in modes:
                rows.append(EigRow(float(e), n, "tensor", zeta_report(model, None, n, "tensor")))
            if "distilled" in modes:
                cg = unitaries.get(n) or CoarseGrainingMap.pattern(n)
                rows.append(EigRow(float(e), n, "distilled", zeta_report(model, cg, n, "distilled")))
    return rows


@dataclass(frozen=True)
class AppendixBRow:
    r1: float
    r2: float
    theta: float
    phi: float
    d_before: float
    d_after: float


APPENDIX_B_PRESETS = {
    "counterexample": ((1.0, 0.5, 0.0, 0.0),),
    "antipodal": tuple((1.0, -1.0, float(t), 0.0) for t in np.linspace(0, np.pi, 19)),
}


def appendix_b(cases: Sequence[Sequence[float]]) -> list[AppendixBRow]:
    """Distinguishability before and after two-copy coarse-graining, with no dynamics.

    Each case is ``(r1, r2, theta, phi)``: both states share the direction
    ``(theta, phi)`` with signed Bloch lengths ``r1`` and ``r2``.
    """
    lam = CoarseGrainingMap.paper().channel
    rows = []
    for case in cases:
        r1, r2, t, p = (float(x) for x in case)
        if abs(r1) > 1 or abs(r2) > 1:
            raise ConfigError(f"Bloch lengths must satisfy |r| <= 1, got {r1}, {r2}")
        s1, s2 = bloch_state(r1, t, p), bloch_state(r2, t, p)
        before = distinguishability(s1, s2)
        after = distinguishability(apply(lam, np.kron(s1, s1)), apply(lam, np.kron(s2, s2)))
        rows.append(AppendixBRow(r1, r2, t, p, before, after))
    return rows


@dataclass(frozen=True)
class OptimizeConfig:
    copies: int = 3
    epsilon: float = 0.4
    objective: str = "max_delta_d_n"
    restarts: int = 20
    seed: int = 0
    max_iter: int = 200
    initial_step: float = float(np.pi / 8)
    shrink: float = 0.5
    theta_points: int = 37
    phi_points: int = 13

    def __post_init__(self):
        if self.copies not in (3, 4):
            raise ConfigError(f"optimizer copies must be 3 or 4, got {self.copies}")
        _check_epsilon(self.epsilon)
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.max_iter < 1 or self.initial_step <= 0 or not 0 < self.shrink < 1:
            raise ConfigError("need max_iter >= 1, initial_step > 0 and 0 < shrink < 1")
        if self.theta_points < 2 or self.phi_points < 1:
            raise ConfigError("coarse grids need theta_points >= 2 and phi_points >= 1")


@dataclass(frozen=True)
class RestartResult:
    index: int
    start: tuple
    angles: tuple
    objective: float
    trajectory: tuple


@dataclass(frozen=True)
class OptimizeResult:
    config: OptimizeConfig
    params: XFormParams
    objective: float
    restarts_used: int
    restarts: tuple = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "copies": self.config.copies,
            "epsilon": self.config.epsilon,
            "seed": self.config.seed,
            "angles": list(self.params.block_angles),
            "objective": self.objective,
            "restarts_used": self.restarts_used,
        }


def restart_starts(cfg: OptimizeConfig) -> list[np.ndarray]:
    """Starting angle vectors: the generalized two-copy 0/1 pattern, all 0, all pi/2,
    then SplitMix64 draws uniform on ``[0, pi/2]``."""
    dim = 2 ** (cfg.copies + 2)
    k = dim // 2
    fixed = [
        np.array(paper_pattern_angles(dim).block_angles),
        np.zeros(k),
        np.full(k, np.pi / 2),
    ]
    rng = SplitMix64(cfg.seed)
    starts = fixed[: cfg.restarts]
    while len(starts) < cfg.restarts:
        starts.append(np.array([rng.uniform(0.0, np.pi / 2) for _ in range(k)]))
    return starts


class _Objective:
    """Objective over block angles evaluated on a coarse probe grid."""

    def __init__(self, cfg: OptimizeConfig):
        self.cfg = cfg
        self.dim = 2 ** (cfg.copies + 2)
        self.thetas = np.linspace(0.0, np.pi, cfg.theta_points)
        self.phis = np.linspace(0.0, 2 * np.pi, cfg.phi_points, endpoint=False)
        th, ph = np.meshgrid(self.thetas, self.phis, indexing="ij")
        self.mesh = (th, ph)
        self.d1 = delta_d_grid(cfg.epsilon, th, ph) if cfg.objective == "max_gain" else None
        # two theta rings, several phi each
        self.probe = (
            np.array([np.pi / 3] * 3 + [2 * np.pi / 5] * 2),
            np.array([0.0, 2.1, 4.2, 0.0, 1.0]),
        )

    def cg(self, angles) -> CoarseGrainingMap:
        return CoarseGrainingMap(xform_from_angles(XFormParams(self.dim, tuple(angles))), self.cfg.copies)

    def phi_independent(self, cg) -> bool:
        v = delta_d_n_grid(self.cfg.epsilon, cg, *self.probe)
        return bool(np.ptp(v[:3]) < 1e-12 and np.ptp(v[3:]) < 1e-12)

    def __call__(self, angles) -> float:
        cg = self.cg(angles)
        if self.phi_independent(cg):
            dn = delta_d_n_grid(self.cfg.epsilon, cg, self.thetas, 0.0)[:, None]
        else:
            dn = delta_d_n_grid(self.cfg.epsilon, cg, *self.mesh)
        if self.d1 is None:
            return float(np.max(dn))
        return float(np.max(dn - self.d1))


def pattern_search(objective: Callable, start, cfg: OptimizeConfig, index: int = 0) -> RestartResult:
    """Coordinate-wise +/- step probing that accepts only strict improvements."""
    x = np.array(start, dtype=float)
    f = objective(x)
    step = cfg.initial_step
    trajectory = [f]
    it = 0
    while it < cfg.max_iter and step >= MIN_STEP:
        it += 1
        best_f, best_x = f, None
        for i in range(len(x)):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] += sign * step
                fy = objective(y)
                if fy > best_f:
                    best_f, best_x = fy, y
        if best_x is None:
            step *= cfg.shrink
        else:
            x, f = best_x, best_f
            trajectory.append(f)
    log.debug("restart %d finished at %.6f after %d iterations", index, f, it)
    return RestartResult(index, tuple(float(a) for a in start), tuple(float(a) for a in x), f, tuple(trajectory))


def optimize_unitary(cfg: OptimizeConfig) -> OptimizeResult:
    """Multi-start pattern search over X-form block angles.

    Restarts are independent and may run on worker threads; the winner is the
    highest objective, ties going to the lowest restart index.
    """
    objective = _Objective(cfg)
    starts = restart_starts(cfg)
    workers = min(worker_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: pattern_search(objective, a[1], cfg, a[0]), enumerate(starts)))
    else:
        results = [pattern_search(objective, s, cfg, i) for i, s in enumerate(starts)]
    best = min(results, key=lambda r: (-r.objective, r.index))
    params = XFormParams(objective.dim, best.angles)
    return OptimizeResult(cfg, params, best.objective, len(results), tuple(results))
