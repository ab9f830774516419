"""Linear maps on matrix spaces: Kraus, superoperator and Choi forms.

Vectorization is column stacking: ``vec(X)[c * d + r] = X[r, c]``.  Under
that convention the superoperator of ``X -> A X B^H`` is ``kron(conj(B), A)``.
Choi matrices are normalized to unit trace,

    J = (1 / d_in) * sum_ij |i><j| ⊗ L(|i><j|),

i.e. the identity extension applied to the normalized maximally entangled
state, with the input copy as the first tensor factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotTracePreserving, ResourceLimit, ShapeMismatch, SingularDynamics
from .matcore import TOL_PSD, as_matrix, dagger, hermitian_eigenvalues, kron_all

TP_TOL = 1e-8
MAX_CHOI_DIM = 256
SINGULAR_TOL = 1e-9
CONDITION_LIMIT = 1e9

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, batched over leading axes."""
    x = np.asarray(x, dtype=complex)
    return np.swapaxes(x, -1, -2).reshape(x.shape[:-2] + (-1,))


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    v = np.asarray(v)
    return np.swapaxes(v.reshape(v.shape[:-1] + (dim, dim)), -1, -2)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map ``M_{dim_in} -> M_{dim_out}`` with no positivity guarantee.

    This is the home of intermediate maps, which are generically not CP.
    """

    superop: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        s = _frozen(self.superop)
        if s.shape != (self.dim_out**2, self.dim_in**2):
            raise ShapeMismatch(
                f"superoperator shape {s.shape} does not match dims {self.dim_in}->{self.dim_out}"
            )
        object.__setattr__(self, "superop", s)

    def __call__(self, rho):
        return apply(self, rho)

    @property
    def process_tensor(self) -> np.ndarray:
        """``T[k, l, i, j] = L(|i><j|)[k, l]``."""
        do, di = self.dim_out, self.dim_in
        return self.superop.reshape(do, do, di, di).transpose(1, 0, 3, 2)


@dataclass(frozen=True, eq=False)
class QuantumChannel(LinearMap):
    """A CPTP map, carrying its Kraus operators alongside the superoperator."""

    kraus: tuple = field(default=())

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "kraus", tuple(_frozen(k) for k in self.kraus))


def _superop_from_process_tensor(t: np.ndarray) -> np.ndarray:
    do, _, di, _ = t.shape
    return t.transpose(1, 0, 3, 2).reshape(do * do, di * di)


def superop_from_kraus(ops) -> np.ndarray:
    k = np.asarray(ops, dtype=complex)
    do, di = k.shape[-2:]
    return np.einsum("aij,akl->ikjl", k.conj(), k).reshape(do * do, di * di)


def from_kraus(ops: Sequence, tol: float = TP_TOL) -> QuantumChannel:
    """Channel from an operator-sum decomposition.

    Raises
    ------
    NotTracePreserving
        If ``sum K^H K`` differs from the identity by more than ``tol``.
    """
    ops = [as_matrix(k) for k in ops]
    if not ops:
        raise ShapeMismatch("empty Kraus list")
    shape = ops[0].shape
    if any(k.shape != shape or k.ndim != 2 for k in ops):
        raise ShapeMismatch("Kraus operators must share one 2-D shape")
    do, di = shape
    gram = sum(dagger(k) @ k for k in ops)
    dev = float(np.max(np.abs(gram - np.eye(di))))
    if dev > tol:
        raise NotTracePreserving(f"max |sum K^H K - I| = {dev:.3e}")
    return QuantumChannel(superop_from_kraus(ops), di, do, kraus=tuple(ops))


def from_superop(superop, dim_in: int, dim_out: int | None = None) -> LinearMap:
    return LinearMap(np.asarray(superop, dtype=complex), dim_in, dim_in if dim_out is None else dim_out)


def apply(ch: LinearMap, rho) -> np.ndarray:
    """Image of ``rho`` (or a stack of matrices) under ``ch``."""
    rho = as_matrix(rho)
    if rho.shape[-2:] != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"input of shape {rho.shape[-2:]} for a map on dimension {ch.dim_in}")
    return unvec(vec(rho) @ ch.superop.T, ch.dim_out)


def compose(f: LinearMap, g: LinearMap) -> LinearMap:
    """``f ∘ g``: apply ``g`` first.

    Two Kraus-carrying channels compose to a channel whose Kraus operators are
    all products ``F_b G_a``.
    """
    if g.dim_out != f.dim_in:
        raise DimensionMismatch(f"cannot compose {g.dim_in}->{g.dim_out} with {f.dim_in}->{f.dim_out}")
    s = f.superop @ g.superop
    if isinstance(f, QuantumChannel) and isinstance(g, QuantumChannel) and f.kraus and g.kraus:
        kraus = tuple(kf @ kg for kg in g.kraus for kf in f.kraus)
        return QuantumChannel(s, g.dim_in, f.dim_out, kraus=kraus)
    return LinearMap(s, g.dim_in, f.dim_out)


def tensor(a: LinearMap, b: LinearMap) -> LinearMap:
    """``a ⊗ b`` acting on the Kronecker product of the input spaces."""
    ta, tb = a.process_tensor, b.process_tensor
    t = np.einsum("abcd,efgh->aebfcgdh", ta, tb)
    do, di = a.dim_out * b.dim_out, a.dim_in * b.dim_in
    s = _superop_from_process_tensor(t.reshape(do, do, di, di))
    if isinstance(a, QuantumChannel) and isinstance(b, QuantumChannel) and a.kraus and b.kraus:
        kraus = tuple(kron_all(pair) for pair in itertools.product(a.kraus, b.kraus))
        return QuantumChannel(s, di, do, kraus=kraus)
    return LinearMap(s, di, do)


def tensor_power(ch: LinearMap, n: int) -> LinearMap:
    """``ch ⊗ ... ⊗ ch`` (``n`` factors).

    Raises
    ------
    ResourceLimit
        If the Choi matrix of the result would exceed ``MAX_CHOI_DIM``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"tensor power needs n >= 1, got {n}")
    choi_dim = (ch.dim_in * ch.dim_out) ** n
    if choi_dim > MAX_CHOI_DIM:
        raise ResourceLimit(f"Choi dimension {choi_dim} exceeds {MAX_CHOI_DIM}")
    out = ch
    for _ in range(n - 1):
        out = tensor(out, ch)
    return out


def to_choi(ch: LinearMap) -> np.ndarray:
    """Unit-trace Choi matrix with the input factor first."""
    di, do = ch.dim_in, ch.dim_out
    return ch.process_tensor.transpose(2, 0, 3, 1).reshape(di * do, di * do) / di


def from_choi(choi, dim_in: int, dim_out: int) -> LinearMap:
    """Inverse of :func:`to_choi`."""
    j = as_matrix(choi)
    if j.shape != (dim_in * dim_out, dim_in * dim_out):
        raise ShapeMismatch(f"Choi shape {j.shape} does not match dims {dim_in}->{dim_out}")
    t = (j * dim_in).reshape(dim_in, dim_out, dim_in, dim_out).transpose(1, 3, 0, 2)
    return LinearMap(_superop_from_process_tensor(t), dim_in, dim_out)


def min_choi_eig(ch: LinearMap) -> float:
    """Least eigenvalue of the normalized Choi matrix (negative iff not CP)."""
    return float(hermitian_eigenvalues(to_choi(ch))[0])


def trace_preservation_error(ch: LinearMap) -> float:
    row = vec(np.eye(ch.dim_out)) @ ch.superop
    return float(np.max(np.abs(row - vec(np.eye(ch.dim_in)))))


@dataclass(frozen=True)
class CPTPReport:
    ok: bool
    min_choi_eig: float
    tp_error: float

    def __bool__(self) -> bool:
        return self.ok


def is_cptp(ch: LinearMap, tol: float = TOL_PSD) -> CPTPReport:
    lam = min_choi_eig(ch)
    tp = trace_preservation_error(ch)
    return CPTPReport(bool(lam >= -tol and tp <= tol), lam, tp)


def intermediate_map(lt: LinearMap, ls: LinearMap) -> LinearMap:
    """The map ``V`` with ``V ∘ ls = lt``, found by inverting ``ls``.

    Raises
    ------
    SingularDynamics
        If the superoperator of ``ls`` has a singular value below
        ``SINGULAR_TOL`` or a condition number above ``CONDITION_LIMIT``.
    """
    if lt.dim_in != ls.dim_in:
        raise DimensionMismatch("both maps must act on the same input space")
    s = ls.superop
    if s.shape[0] != s.shape[1]:
        raise DimensionMismatch("only square superoperators can be inverted")
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] < SINGULAR_TOL or sv[0] / sv[-1] > CONDITION_LIMIT:
        raise SingularDynamics(f"smallest singular value {sv[-1]:.3e} of the earlier map")
    v = np.linalg.solve(s.T, lt.superop.T).T
    return LinearMap(v, ls.dim_out, lt.dim_out)


@dataclass(frozen=True)
class PauliTransfer:
    coefficients: np.ndarray
    residual: float


def pauli_transfer(ch: LinearMap) -> PauliTransfer:
    """Diagonal of the Pauli transfer matrix ``R_ij = Tr(s_i L(s_j)) / 2``.

    ``residual`` is the Frobenius norm of the off-diagonal part, zero exactly
    when the map is Pauli-diagonal.
    """
    if ch.dim_in != 2 or ch.dim_out != 2:
        raise DimensionMismatch("Pauli transfer coefficients need a qubit map")
    images = apply(ch, np.stack(PAULIS))
    r = np.einsum("iab,jba->ij", np.stack(PAULIS), images) / 2
    diag = np.diag(r).copy()
    if np.max(np.abs(diag.imag)) < 1e-12:
        diag = diag.real
    residual = float(np.linalg.norm(r - np.diag(np.diag(r))))
    return PauliTransfer(diag, residual)


def pauli_diagonal_map(coefficients) -> LinearMap:
    """Qubit map sending each Pauli ``s_i`` to ``t_i s_i``."""
    s = sum(t * np.outer(vec(p), vec(p).conj()) / 2 for t, p in zip(coefficients, PAULIS))
    return LinearMap(s, 2, 2)


def identity_channel(dim: int = 2) -> QuantumChannel:
    return from_kraus([np.eye(dim)])


def unitary_channel(u) -> QuantumChannel:
    return from_kraus([as_matrix(u)])


def depolarizing_channel(dim: int = 2) -> QuantumChannel:
    """Completely depolarizing channel ``rho -> Tr(rho) I / d``."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            k = np.zeros((dim, dim))
            k[i, j] = 1 / np.sqrt(dim)
            ops.append(k)
    return from_kraus(ops)


def dephasing_channel(dim: int = 2) -> QuantumChannel:
    """Measure in the computational basis and forget the outcome."""
    return from_kraus([np.diag(np.eye(dim)[i]) for i in range(dim)])


def transpose_map(dim: int = 2) -> LinearMap:
    t = np.zeros((dim, dim, dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            t[j, i, i, j] = 1
    return LinearMap(_superop_from_process_tensor(t), dim, dim)
