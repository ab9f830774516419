import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nmdistill.errors import NotHermitian, ShapeMismatch
from nmdistill.matcore import (
    hermitian_eigenvalues,
    is_hermitian,
    jacobi_eigh,
    kron,
    kron_all,
    partial_trace,
    singular_values,
    trace_norm,
)
from nmdistill.verify import random_density, random_hermitian

Z = np.diag([1.0, -1.0])
P0 = np.diag([1.0, 0.0])
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_z_projector():
    np.testing.assert_array_equal(kron(Z, P0), np.diag([1, 0, -1, 0]))


def test_kron_index_convention(rng):
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(4, 5))
    k = kron(a, b)
    for i in range(2):
        for j in range(3):
            for p in range(4):
                for q in range(5):
                    assert k[i * 4 + p, j * 5 + q] == a[i, j] * b[p, q]


def test_kron_batched(rng):
    a = rng.normal(size=(6, 2, 2))
    b = rng.normal(size=(6, 3, 3))
    out = kron(a, b)
    for i in range(6):
        np.testing.assert_allclose(out[i], np.kron(a[i], b[i]), atol=0)


@given(arrays(float, (3, 2, 2), elements=finite))
def test_kron_associative(m):
    a, b, c = m
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    np.testing.assert_allclose(kron_all([a, b, c]), np.kron(np.kron(a, b), c), atol=1e-12)


def test_partial_trace_product(rng):
    rho, sigma = random_density(rng, 2), 3.0 * random_density(rng, 3)
    np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), [2, 3], [0]), 3.0 * rho, atol=1e-14)
    np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), [2, 3], [1]), sigma, atol=1e-14)


def test_partial_trace_bell_marginal():
    bell = np.outer(PHI_PLUS, PHI_PLUS)
    np.testing.assert_allclose(partial_trace(bell, [2, 2], [1]), np.eye(2) / 2, atol=1e-15)


def _loop_partial_trace(a, dims, keep):
    # oracle: explicit index summation over traced registers
    import itertools

    n = len(dims)
    t = a.reshape(tuple(dims) * 2)
    kd = [dims[i] for i in keep]
    traced = [i for i in range(n) if i not in keep]
    out = np.zeros((int(np.prod(kd)),) * 2, dtype=complex)
    for r in itertools.product(*(range(d) for d in kd)):
        for c in itertools.product(*(range(d) for d in kd)):
            s = 0
            for tr in itertools.product(*(range(dims[i]) for i in traced)):
                row, col = [0] * n, [0] * n
                for pos, i in enumerate(keep):
                    row[i], col[i] = r[pos], c[pos]
                for pos, i in enumerate(traced):
                    row[i] = col[i] = tr[pos]
                s += t[tuple(row) + tuple(col)]
            out[np.ravel_multi_index(r, kd), np.ravel_multi_index(c, kd)] = s
    return out


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2]])
def test_partial_trace_matches_loop_oracle(rng, keep):
    a = random_hermitian(rng, 12)
    np.testing.assert_allclose(partial_trace(a, [2, 3, 2], keep), _loop_partial_trace(a, [2, 3, 2], keep), atol=1e-12)


def test_partial_trace_errors():
    with pytest.raises(ShapeMismatch):
        partial_trace(np.eye(4), [2, 3], [0])
    with pytest.raises(ShapeMismatch):
        partial_trace(np.eye(4), [2, 2], [2])
    with pytest.raises(ShapeMismatch):
        partial_trace(np.eye(4), [2, 2], [])


def test_trace_norm_examples():
    assert trace_norm(np.eye(2)) == pytest.approx(2.0, abs=1e-15)
    assert trace_norm(np.diag([0.4375, -0.4375])) == pytest.approx(0.875, abs=1e-15)
    psi = np.array([np.cos(0.3), np.exp(0.7j) * np.sin(0.3)])
    perp = np.array([-np.exp(-0.7j) * np.sin(0.3), np.cos(0.3)])
    assert trace_norm(np.outer(perp, perp.conj()) - np.outer(psi, psi.conj())) == pytest.approx(2.0, abs=1e-12)


def test_trace_norm_matches_svd(rng):
    for _ in range(50):
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        assert trace_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False).sum(), rel=1e-10)
        h = random_hermitian(rng, 6)
        assert trace_norm(h) == pytest.approx(np.linalg.svd(h, compute_uv=False).sum(), rel=1e-12)


def test_singular_values_rectangular(rng):
    a = rng.normal(size=(3, 5))
    np.testing.assert_allclose(np.sort(singular_values(a))[-3:], np.sort(np.linalg.svd(a, compute_uv=False)), atol=1e-12)


def test_eigenvalue_examples():
    np.testing.assert_allclose(hermitian_eigenvalues(np.eye(4)), [1, 1, 1, 1])
    np.testing.assert_allclose(hermitian_eigenvalues(np.array([[0, 1], [1, 0]])), [-1, 1], atol=1e-15)
    np.testing.assert_allclose(hermitian_eigenvalues(np.array([[0, 1], [1, 0]]), method="jacobi"), [-1, 1], atol=1e-15)


def test_jacobi_agrees_with_lapack(rng):
    for d in (2, 3, 8, 16, 32):
        for _ in range(5):
            a = random_hermitian(rng, d)
            w, v = jacobi_eigh(a)
            np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-10)
            np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-10)
            np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-12)


def test_jacobi_degenerate_spectrum(rng):
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    a = q @ np.diag([1, 1, 1, -2, -2, 5]) @ q.conj().T
    np.testing.assert_allclose(jacobi_eigh(a)[0], [-2, -2, 1, 1, 1, 5], atol=1e-10)


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotHermitian):
        jacobi_eigh(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.eye(2), method="qr")


def test_hermiticity_tolerance_scales():
    a = np.array([[1e6, 1], [1 + 1e-8, 0]])
    assert is_hermitian(a)
    assert not is_hermitian(np.array([[1, 1], [1 + 1e-8, 0]]))


@settings(max_examples=50, deadline=None)
@given(arrays(float, (2, 4, 4), elements=st.floats(-1, 1)))
def test_trace_norm_triangle_inequality(m):
    a, b = m
    assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10
