"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of ``complex128``.  Entries are stored
row-major and the Kronecker product follows the usual convention
``(A ⊗ B)[i*p + k, j*q + l] = A[i, j] * B[k, l]`` for ``B`` of shape ``(p, q)``.
Most functions also accept stacks of matrices with leading batch axes.
"""

from __future__ import annotations

import string
from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitian, ShapeMismatch

TOL_HERM = 1e-10
TOL_EQ = 1e-12
TOL_PSD = 1e-10

JACOBI_THRESHOLD = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2:
        raise ShapeMismatch(f"expected a matrix, got array of shape {a.shape}")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product, broadcasting over leading batch axes."""
    a = as_matrix(a)
    b = as_matrix(b)
    m, n = a.shape[-2:]
    p, q = b.shape[-2:]
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(out.shape[:-4] + (m * p, n * q))


def kron_all(mats: Iterable) -> np.ndarray:
    mats = list(mats)
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = kron(out, m)
    return out


def hermiticity_error(a: np.ndarray) -> float:
    a = as_matrix(a)
    if a.shape[-1] != a.shape[-2]:
        return np.inf
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def is_hermitian(a, tol: float = TOL_HERM) -> bool:
    a = as_matrix(a)
    # scale-aware: large Choi matrices near eps=0.5 carry round-off above 1e-10
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return hermiticity_error(a) < tol * scale


def partial_trace(a, shape: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every register of ``a`` not listed in ``keep``.

    Parameters
    ----------
    a : array_like
        Square matrix (or stack of them) on the composite space.
    shape : sequence of int
        Register dimensions, in the order they appear in the Kronecker product.
    keep : iterable of int
        Indices of registers to keep.  Their relative order is preserved.

    Returns
    -------
    np.ndarray
        Reduced matrix on the kept registers.
    """
    a = as_matrix(a)
    dims = [int(d) for d in shape]
    total = int(np.prod(dims))
    if any(d < 1 for d in dims) or a.shape[-1] != total or a.shape[-2] != total:
        raise ShapeMismatch(f"register shape {dims} does not match matrix {a.shape[-2:]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeMismatch(f"keep={keep} is not a nonempty subset of registers 0..{len(dims) - 1}")
    letters = string.ascii_letters
    rows = letters[: len(dims)]
    cols = "".join(rows[i] if i not in keep else letters[len(dims) + i] for i in range(len(dims)))
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = a.reshape(a.shape[:-2] + tuple(dims) + tuple(dims))
    reduced = np.einsum(f"...{rows}{cols}->...{out}", t)
    kd = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(a.shape[:-2] + (kd, kd))


def _jacobi_sweep_rotation(app: float, aqq: float, apq: complex):
    """Return (c, s, phase) of the unitary rotation that zeroes ``apq``."""
    b = abs(apq)
    phase = apq / b
    tau = (aqq - app) / (2.0 * b)
    t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
    if tau < 0:
        t = -t
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def jacobi_eigh(a, threshold: float = JACOBI_THRESHOLD, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation acts on a pair ``(p, q)`` with the unitary
    ``[[c, s*e], [-s*conj(e), c]]`` (``e`` the phase of ``A[p, q]``), which
    annihilates the off-diagonal entry.  Sweeps continue until the
    off-diagonal Frobenius norm falls below ``threshold`` relative to the
    matrix norm.

    Returns
    -------
    (w, v) : ascending eigenvalues and the unitary whose columns are eigenvectors.
    """
    a = np.array(as_matrix(a), dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch("jacobi_eigh needs a single square matrix")
    if not is_hermitian(a):
        raise NotHermitian(f"max |A - A^H| = {hermiticity_error(a):.3e}")
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < threshold * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                c, s, e = _jacobi_sweep_rotation(a[p, p].real, a[q, q].real, apq)
                g = np.array([[c, s * e], [-s * np.conj(e), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(a, method: str = "lapack") -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix (or stack).

    ``method="lapack"`` delegates to :func:`numpy.linalg.eigvalsh`;
    ``method="jacobi"`` uses :func:`jacobi_eigh` and only takes a single matrix.

    Raises
    ------
    NotHermitian
        If ``max |A - A^H|`` exceeds ``TOL_HERM`` (scaled by the largest entry
        when that exceeds 1).
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NotHermitian(f"max |A - A^H| = {hermiticity_error(a):.3e}")
    if method == "jacobi":
        return jacobi_eigh(a)[0]
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    return np.linalg.eigvalsh(0.5 * (a + dagger(a)))


def singular_values(a) -> np.ndarray:
    """Singular values from the spectrum of ``A^H A``; tiny negatives are clamped."""
    a = as_matrix(a)
    w = np.linalg.eigvalsh(dagger(a) @ a)
    return np.sqrt(np.clip(w, 0.0, None))


def trace_norm(a) -> float | np.ndarray:
    """Sum of singular values.

    Hermitian input takes the exact route ``sum |eigenvalues|``; otherwise the
    singular values come from ``A^H A``.
    """
    a = as_matrix(a)
    if a.shape[-1] == a.shape[-2] and is_hermitian(a):
        out = np.abs(np.linalg.eigvalsh(0.5 * (a + dagger(a)))).sum(axis=-1)
    else:
        out = singular_values(a).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out
