"""Coarse-graining maps compressing ``n`` qubits to one via a Stinespring unitary.

The dilation register is ordered ``(data, r, d)`` with dimensions
``(2**n, 2, 2)``.  Both ancillas start in ``|0>``, the unitary acts on the
whole register, and everything except the final ``d`` qubit is traced out:

    lam(X) = Tr_{data, r}[ U (X ⊗ |0><0| ⊗ |0><0|) U^H ].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .channels import QuantumChannel, from_kraus
from .errors import DimensionMismatch, ShapeMismatch
from .matcore import as_matrix, dagger

MAX_COPIES = 4


def paper_u16() -> np.ndarray:
    """The 16x16 permutation used for two copies.

    It fixes the first and last basis vectors and reverses the order of the
    fourteen in between.
    """
    u = np.zeros((16, 16))
    u[0, 0] = u[15, 15] = 1
    for k in range(1, 15):
        u[k, 15 - k] = 1
    return u


@dataclass(frozen=True)
class XFormParams:
    """Rotation angles of an X-shaped unitary.

    Block ``i`` couples coordinates ``i`` and ``dim - 1 - i`` (0-based) through
    ``[[cos g, sin g], [-sin g, cos g]]``.
    """

    dim: int
    block_angles: tuple

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise ValueError(f"X-form dimension must be even and positive, got {self.dim}")
        angles = tuple(float(a) for a in self.block_angles)
        if len(angles) != self.dim // 2:
            raise ValueError(f"need {self.dim // 2} block angles, got {len(angles)}")
        object.__setattr__(self, "block_angles", angles)

    def to_json(self) -> dict:
        return {"dim": self.dim, "angles": list(self.block_angles)}

    @classmethod
    def from_json(cls, doc: dict) -> "XFormParams":
        return cls(int(doc["dim"]), tuple(doc["angles"]))


def xform_from_angles(params: XFormParams) -> np.ndarray:
    dim = params.dim
    u = np.zeros((dim, dim))
    for i, g in enumerate(params.block_angles):
        j = dim - 1 - i
        c, s = np.cos(g), np.sin(g)
        u[i, i], u[i, j], u[j, i], u[j, j] = c, s, -s, c
    return u


def paper_pattern_angles(dim: int) -> XFormParams:
    """Angles reproducing the two-copy permutation pattern at any even ``dim``.

    The outermost block is left alone and every other block is fully swapped,
    so at ``dim = 16`` this gives :func:`paper_u16` up to row signs.
    """
    return XFormParams(dim, (0.0,) + (np.pi / 2,) * (dim // 2 - 1))


@dataclass(frozen=True)
class UnitaryCheck:
    ok: bool
    deviation: float

    def __bool__(self) -> bool:
        return self.ok


def validate_unitary(u, tol: float = 1e-10) -> UnitaryCheck:
    u = as_matrix(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeMismatch(f"unitary must be square, got {u.shape}")
    dev = float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))
    return UnitaryCheck(dev <= tol, dev)


def build_coarse_channel(u, n: int) -> QuantumChannel:
    """Channel ``2**n -> 2`` induced by the dilation unitary ``u``.

    Kraus operators are ``K_jk = (<j|_data ⊗ <k|_r ⊗ I_d) U (I ⊗ |0>_r ⊗ |0>_d)``.
    """
    u = as_matrix(u)
    big = 2 ** (n + 2)
    if u.shape != (big, big):
        raise DimensionMismatch(f"{n} copies need a {big}x{big} unitary, got {u.shape}")
    data = 2**n
    u6 = u.reshape(data, 2, 2, data, 2, 2)
    kraus = [u6[j, k, :, :, 0, 0] for j in range(data) for k in range(2)]
    return from_kraus(kraus)


@dataclass(frozen=True, eq=False)
class CoarseGrainingMap:
    unitary: np.ndarray
    copies: int
    name: str = field(default="custom")

    def __post_init__(self):
        u = np.array(as_matrix(self.unitary))
        if not 1 <= self.copies <= MAX_COPIES:
            raise ValueError(f"copies must be in 1..{MAX_COPIES}, got {self.copies}")
        if u.shape != (2 ** (self.copies + 2),) * 2:
            raise DimensionMismatch(f"{self.copies} copies need dimension {2 ** (self.copies + 2)}")
        check = validate_unitary(u)
        if not check:
            raise ValueError(f"matrix is not unitary (max |U^H U - I| = {check.deviation:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def register_shape(self) -> tuple:
        return (2**self.copies, 2, 2)

    @cached_property
    def channel(self) -> QuantumChannel:
        return build_coarse_channel(self.unitary, self.copies)

    @classmethod
    def paper(cls) -> "CoarseGrainingMap":
        return cls(paper_u16(), 2, name="paper16")

    @classmethod
    def pattern(cls, copies: int) -> "CoarseGrainingMap":
        """The two-copy 0/1 permutation pattern generalized to ``copies`` data qubits."""
        if copies == 2:
            return cls.paper()
        return cls(xform_from_angles(paper_pattern_angles(2 ** (copies + 2))), copies, name="pattern")

    @classmethod
    def from_angles(cls, params: XFormParams, name: str = "angles") -> "CoarseGrainingMap":
        copies = int(round(np.log2(params.dim))) - 2
        return cls(xform_from_angles(params), copies, name=name)


def unitary_to_json(u) -> dict:
    u = as_matrix(u)
    return {
        "dim": int(u.shape[0]),
        "entries_re": [float(x) for x in u.real.ravel()],
        "entries_im": [float(x) for x in u.imag.ravel()],
    }


def unitary_from_json(doc: dict) -> np.ndarray:
    dim = int(doc["dim"])
    re = np.asarray(doc["entries_re"], dtype=float)
    im = np.asarray(doc["entries_im"], dtype=float)
    if re.size != dim * dim or im.size != dim * dim:
        raise ShapeMismatch(f"expected {dim * dim} entries")
    return (re + 1j * im).reshape(dim, dim)


def load_unitary(path) -> np.ndarray:
    """Read either a unitary document or an angle document from ``path``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if "angles" in doc:
        return xform_from_angles(XFormParams.from_json(doc))
    return unitary_from_json(doc)
