import json

import numpy as np
import pytest

from nmdistill import channels as ch
from nmdistill.coarse import (
    CoarseGrainingMap,
    XFormParams,
    build_coarse_channel,
    load_unitary,
    paper_pattern_angles,
    paper_u16,
    unitary_from_json,
    unitary_to_json,
    validate_unitary,
    xform_from_angles,
)
from nmdistill.errors import DimensionMismatch
from nmdistill.matcore import partial_trace
from nmdistill.verify import random_density
from nmdistill.witness import bloch_state


def two_copy_output(r, theta):
    c = r * np.cos(theta)
    return np.diag([(1 + c) ** 2 / 4, (1 - c) ** 2 / 4 + (1 - c * c) / 2])


def test_paper_u16_rows():
    u = paper_u16()
    np.testing.assert_array_equal(u[0], np.eye(16)[0])
    np.testing.assert_array_equal(u[15], np.eye(16)[15])
    assert set(np.unique(u)) == {0.0, 1.0}
    assert validate_unitary(u)


def test_validate_unitary():
    check = validate_unitary(np.eye(16))
    assert check and check.deviation == 0
    broken = paper_u16()
    broken[0, 0] = 0.5
    assert not validate_unitary(broken)


def test_xform_examples(rng):
    np.testing.assert_array_equal(xform_from_angles(XFormParams(8, (0,) * 4)), np.eye(8))
    u = xform_from_angles(XFormParams(4, (np.pi / 2,) * 2))
    np.testing.assert_allclose(np.abs(u), np.fliplr(np.eye(4)), atol=1e-15)
    assert validate_unitary(u)
    for _ in range(20):
        dim = int(rng.choice([4, 16, 32, 64]))
        u = xform_from_angles(XFormParams(dim, tuple(rng.uniform(-np.pi, np.pi, dim // 2))))
        assert validate_unitary(u, tol=1e-12)
        mask = np.eye(dim, dtype=bool) | np.fliplr(np.eye(dim, dtype=bool))
        assert np.all(u[~mask] == 0)


def test_xform_params_validation():
    with pytest.raises(ValueError):
        XFormParams(5, (0, 0))
    with pytest.raises(ValueError):
        XFormParams(4, (0,))


def test_identity_dilation_outputs_ground_state(rng):
    lam = build_coarse_channel(np.eye(16), 2)
    for _ in range(10):
        np.testing.assert_allclose(ch.apply(lam, random_density(rng, 4)), np.diag([1, 0]), atol=1e-14)


def test_paper_channel_on_ground_state():
    p0 = np.diag([1.0, 0.0])
    np.testing.assert_allclose(ch.apply(CoarseGrainingMap.paper().channel, np.kron(p0, p0)), np.diag([1, 0]), atol=0)


def test_two_copy_calibration_grid():
    lam = CoarseGrainingMap.paper().channel
    for r in np.linspace(0, 1, 11):
        for t in np.linspace(0, np.pi, 19):
            rho = bloch_state(r, t, 1.3)
            np.testing.assert_allclose(ch.apply(lam, np.kron(rho, rho)), two_copy_output(r, t), atol=1e-12)


def test_keeping_a_data_qubit_fails_calibration():
    # for this unitary either ancilla reproduces the formula; a data qubit does not
    u = paper_u16()
    rho = bloch_state(0.8, 0.4, 0.3)
    out = u @ np.kron(np.kron(rho, rho), np.diag([1, 0, 0, 0])) @ u.T
    for keep, ok in ((0, False), (1, False), (2, True), (3, True)):
        dev = np.abs(partial_trace(out, [2] * 4, [keep]) - two_copy_output(0.8, 0.4)).max()
        assert (dev < 1e-12) == ok


def test_paper_output_always_diagonal(rng):
    lam = CoarseGrainingMap.paper().channel
    for _ in range(20):
        rho = random_density(rng, 2)
        out = ch.apply(lam, np.kron(rho, rho))
        assert abs(out[0, 1]) < 1e-14


def test_pattern_reproduces_paper_channel(rng):
    u = xform_from_angles(paper_pattern_angles(16))
    np.testing.assert_allclose(np.abs(u), paper_u16(), atol=1e-15)
    a, b = build_coarse_channel(u, 2), CoarseGrainingMap.paper().channel
    for _ in range(10):
        rho = random_density(rng, 4)
        np.testing.assert_allclose(ch.apply(a, rho), ch.apply(b, rho), atol=1e-12)


def test_coarse_channels_are_cptp(rng):
    for n in (1, 2, 3, 4):
        dim = 2 ** (n + 2)
        for _ in range(3):
            cg = CoarseGrainingMap.from_angles(XFormParams(dim, tuple(rng.uniform(0, np.pi, dim // 2))))
            assert cg.copies == n
            assert cg.channel.dim_in == 2**n and cg.channel.dim_out == 2
            assert ch.is_cptp(cg.channel)
    assert CoarseGrainingMap.pattern(3).register_shape == (8, 2, 2)


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        build_coarse_channel(np.eye(16), 3)
    with pytest.raises(DimensionMismatch):
        CoarseGrainingMap(np.eye(8), 2)
    with pytest.raises(ValueError):
        CoarseGrainingMap(2 * np.eye(16), 2)


def test_json_round_trips(tmp_path, rng):
    u = xform_from_angles(XFormParams(16, tuple(rng.uniform(0, 1, 8)))) * np.exp(0.3j)
    doc = json.loads(json.dumps(unitary_to_json(u)))
    assert set(doc) == {"dim", "entries_re", "entries_im"}
    np.testing.assert_array_equal(unitary_from_json(doc), u)
    path = tmp_path / "u.json"
    path.write_text(json.dumps(doc))
    np.testing.assert_array_equal(load_unitary(path), u)
    params = XFormParams(32, tuple(rng.uniform(0, 1, 16)))
    assert XFormParams.from_json(json.loads(json.dumps(params.to_json()))) == params
    path.write_text(json.dumps(params.to_json()))
    np.testing.assert_array_equal(load_unitary(path), xform_from_angles(params))
