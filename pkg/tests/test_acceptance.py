"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers,
then asserts at the stated tolerance.
"""

import time

import numpy as np
import pytest

from nmdistill import channels as ch
from nmdistill.coarse import CoarseGrainingMap, paper_u16
from nmdistill.collisional import lambda1, lambda2, v21
from nmdistill.experiments import (
    APPENDIX_B_PRESETS,
    OptimizeConfig,
    SweepConfig,
    appendix_b,
    eig_scan,
    max_diff,
    optimize_unitary,
    sweep_arrays,
)
from nmdistill.matcore import trace_norm
from nmdistill.verify import random_channel, random_density, random_hermitian
from nmdistill.witness import (
    analytic_delta_d,
    analytic_delta_d2,
    bloch_state,
    delta_d_grid,
    delta_d_n_grid,
    xform_entries,
)

PAPER = CoarseGrainingMap.paper()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        return ok

    return emit


def test_criterion_1_global_maximum(report):
    start = time.perf_counter()
    rep = max_diff(SweepConfig(0.4))
    elapsed = time.perf_counter() - start
    expected = [(0.386, 0.5), (0.386, 1.5), (0.614, 0.5), (0.614, 1.5)]
    got = sorted((t / np.pi, p / np.pi) for t, p in rep.points)
    near = len(got) == 4 and all(abs(t - te) <= 0.002 and abs(p - pe) <= 0.002 for (t, p), (te, pe) in zip(got, expected))
    ok = abs(rep.value - 0.322) <= 0.001 and near and elapsed < 60
    pts = ", ".join(f"({t:.4f}pi, {p:.4f}pi)" for t, p in got)
    assert report(1, ok, f"max = {rep.value:.6f} at {pts}; {elapsed:.1f} s")


def test_criterion_2_strong_success_weak_failure(report):
    d1, d2 = sweep_arrays(SweepConfig(0.4), 0.4)
    strong = int(np.sum((d2 > d1 + 1e-10) & (d1 > 1e-10)))
    w1, w2 = sweep_arrays(SweepConfig(0.2), 0.2)
    weak_ok = bool(np.all(w2 >= w1 - 1e-10) and w1.max() <= 1e-10 and w2.max() <= 1e-10)
    ok = strong > 0 and weak_ok
    detail = (
        f"eps=0.4: {strong} grid points with dD2 > dD > 0; "
        f"eps=0.2: min(dD2 - dD) = {np.min(w2 - w1):.2e}, max dD = {w1.max():.2e}, max dD2 = {w2.max():.2e}"
    )
    assert report(2, ok, detail)


def test_criterion_3_coarse_graining_alone(report):
    rows = appendix_b(APPENDIX_B_PRESETS["antipodal"])
    dev = max(abs(r.d_after - abs(np.cos(r.theta))) for r in rows)
    (ce,) = appendix_b(APPENDIX_B_PRESETS["counterexample"])
    ok = len(rows) == 19 and dev <= 1e-12 and ce.d_before == 0.25 and abs(ce.d_after - 0.4375) <= 1e-12
    detail = f"max |D - |cos t|| = {dev:.1e} over 19 angles; counterexample {ce.d_before} -> {ce.d_after:.15g}"
    assert report(3, ok, detail)


def test_criterion_4_zeta_orderings(report):
    strong_grid = [round(0.25 + 0.01 * k, 2) for k in range(1, 25)]
    z = {(r.epsilon, r.mode): r.zeta for r in eig_scan(strong_grid, copies=(2,))}
    bad_strong = [
        e
        for e in strong_grid
        if not (z[e, "single"] < 0 and abs(z[e, "single"]) < abs(z[e, "distilled"]) <= abs(z[e, "tensor"]))
    ]
    weak_grid = [round(0.01 * k, 2) for k in range(1, 26)]
    bad_weak = [
        (r.epsilon, r.mode, r.copies)
        for r in eig_scan(weak_grid)
        if (r.mode == "distilled" and r.zeta < -1e-10) or (r.mode == "tensor" and r.zeta >= -1e-6)
    ]
    ok = not bad_strong and not bad_weak
    detail = (
        f"strong ordering fails at {len(bad_strong)}/24 points {bad_strong} "
        f"(e.g. eps=0.4: single {z[0.4, 'single']:.4g}, distilled {z[0.4, 'distilled']:.4g}, tensor {z[0.4, 'tensor']:.4g}); "
        f"weak-regime violations {len(bad_weak)}/150"
    )
    assert report(4, ok, detail)


def test_criterion_5_oracle_equivalence(report):
    th, ph = np.meshgrid(np.linspace(0, np.pi, 19), np.linspace(0, 2 * np.pi, 37), indexing="ij")
    entries = xform_entries(paper_u16())
    dev1 = dev2 = 0.0
    for e in (0.1, 0.2, 0.3, 0.4):
        dev1 = max(dev1, np.abs(analytic_delta_d(e, th, ph) - delta_d_grid(e, th, ph)).max())
        dev2 = max(dev2, np.abs(analytic_delta_d2(e, th, **entries) - delta_d_n_grid(e, PAPER, th, ph)).max())
    ok = dev1 <= 1e-10 and dev2 <= 1e-10
    assert report(5, ok, f"single-copy closed form deviation {dev1:.1e}; two-copy closed form deviation {dev2:.1e}")


def test_criterion_6_property_suites(report):
    rng = np.random.default_rng(6)
    cases = 50
    closure = sum(bool(ch.is_cptp(ch.compose(random_channel(rng, 2), random_channel(rng, 2)))) for _ in range(cases))

    growth = -np.inf
    for _ in range(cases):
        lam = random_channel(rng, 2)
        a, b = random_hermitian(rng, 2), random_hermitian(rng, 4)
        growth = max(growth, trace_norm(ch.apply(lam, a)) - trace_norm(a))
        ext = ch.tensor(lam, ch.identity_channel(2))
        growth = max(growth, trace_norm(ch.apply(ext, b)) - trace_norm(b))

    div = 0.0
    for e in rng.uniform(0.0, 0.49, cases):
        for n in (2, 3):
            lhs = ch.compose(ch.tensor_power(v21(e), n), ch.tensor_power(lambda1(e), n))
            rho = random_density(rng, 2**n)
            div = max(div, np.abs(ch.apply(lhs, rho) - ch.apply(ch.tensor_power(lambda2(e), n), rho)).max())

    lam = PAPER.channel
    calib = 0.0
    samples = [(r, t) for r in np.linspace(0, 1, 11) for t in np.linspace(0, np.pi, 19)]
    samples += list(zip(rng.uniform(0, 1, cases), rng.uniform(0, np.pi, cases)))
    for r, t in samples:
        rho = bloch_state(r, t, rng.uniform(0, 2 * np.pi))
        c = r * np.cos(t)
        want = np.diag([(1 + c) ** 2 / 4, (1 - c) ** 2 / 4 + (1 - c * c) / 2])
        calib = max(calib, np.abs(ch.apply(lam, np.kron(rho, rho)) - want).max())

    ok = closure == cases and growth <= 1e-10 and div <= 1e-10 and calib <= 1e-12
    detail = (
        f"closure {closure}/{cases}; max norm growth {growth:.1e} over {2 * cases} cases; "
        f"divisibility deviation {div:.1e} over {2 * cases} cases; calibration deviation {calib:.1e} over {len(samples)} states"
    )
    assert report(6, ok, detail)


def test_criterion_7_optimizer(report):
    start = time.perf_counter()
    cfg = OptimizeConfig(copies=3, epsilon=0.4, restarts=20, seed=0)
    result = optimize_unitary(cfg)
    cg3 = CoarseGrainingMap.from_angles(result.params)
    th, ph = np.meshgrid(np.linspace(0, np.pi, 181), np.linspace(0, 2 * np.pi, 361), indexing="ij")
    d1 = delta_d_grid(0.4, th, ph)
    d2 = delta_d_n_grid(0.4, PAPER, th, ph)
    d3 = delta_d_n_grid(0.4, cg3, th, ph)
    hits = int(np.sum((d3 > d2 + 1e-10) & (d2 > d1 + 1e-10) & (d1 > 1e-10)))
    elapsed = time.perf_counter() - start
    ok = result.restarts_used >= 20 and hits > 0 and elapsed < 600
    stretch = "met" if d3.max() > d1.max() else "not met"
    detail = (
        f"{hits} grid points with dD3 > dD2 > dD > 0 after {result.restarts_used} restarts in {elapsed:.0f} s; "
        f"max dD3 = {d3.max():.4f} vs max dD = {d1.max():.4f} (stretch target {stretch}, not gated)"
    )
    assert report(7, ok, detail)
