"""Dense complex linear algebra shared by the physics modules.

Everything is carried as an :class:`Operator`: a square complex matrix tagged
with the dimensions of its tensor factors. Two-level systems are ordered
``{|1>, |0>}`` throughout the package, so ``sigma_z = diag(1, -1)`` has
``|1>`` as its +1 eigenvector and ``sigma_plus = |1><0|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "settings",
    "NonHermitianError",
    "Operator",
    "SVDTriple",
    "as_operator",
    "identity",
    "kron",
    "kron_all",
    "embed_local",
    "matexp_hermitian",
    "svd",
    "operator_norm",
    "average_gate_fidelity",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "annihilation",
]


@dataclass
class _Settings:
    tol: float = 1e-9  # structural assertions (hermiticity, unitarity)
    zero_rel: float = 1e-12  # singular value counts as zero below zero_rel * max


settings = _Settings()


class NonHermitianError(ValueError):
    """Raised when an operator expected to be Hermitian is not."""

    def __init__(self, deviation: float, tol: float):
        super().__init__(f"operator is not Hermitian: ||H - H^dag|| = {deviation:.3e} > tol {tol:.1e}")
        self.deviation = deviation
        self.tol = tol


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix with tensor-factor bookkeeping."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data is self.data and data.flags.writeable:
            data = data.copy()  # freezing must not touch the caller's array
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {data.shape}")
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != data.shape[0]:
            raise ValueError(f"dims {dims} do not multiply to side length {data.shape[0]}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def full(self) -> np.ndarray:
        return np.array(self.data)

    def dag(self) -> Operator:
        return Operator(self.data.conj().T, self.dims)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if other.size != self.size:
                raise ValueError("operator sizes differ")
            return Operator(self.data @ other.data, self.dims)
        return self.data @ np.asarray(other)

    def __add__(self, other: Operator) -> Operator:
        return Operator(self.data + as_operator(other).data, self.dims)

    def __sub__(self, other: Operator) -> Operator:
        return Operator(self.data - as_operator(other).data, self.dims)

    def __neg__(self) -> Operator:
        return Operator(-self.data, self.dims)

    def __mul__(self, scalar) -> Operator:
        return Operator(self.data * scalar, self.dims)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Operator:
        return Operator(np.linalg.matrix_power(self.data, n), self.dims)

    def hermiticity_error(self) -> float:
        return float(np.linalg.norm(self.data - self.data.conj().T, 2))

    def unitarity_error(self) -> float:
        return float(np.linalg.norm(self.data.conj().T @ self.data - np.eye(self.size), 2))

    def is_hermitian(self, tol: float | None = None) -> bool:
        return self.hermiticity_error() < (settings.tol if tol is None else tol)

    def is_unitary(self, tol: float | None = None) -> bool:
        return self.unitarity_error() < (settings.tol if tol is None else tol)

    def allclose(self, other, atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.data, as_operator(other).data, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"Operator(dims={list(self.dims)}, shape={self.shape})"


def as_operator(a, dims: Sequence[int] | None = None) -> Operator:
    if isinstance(a, Operator):
        return a
    arr = np.asarray(a, dtype=complex)
    return Operator(arr, tuple(dims) if dims is not None else (arr.shape[0],))


@dataclass(frozen=True, eq=False)
class SVDTriple:
    """Singular values (descending) with paired left/right singular vectors as columns."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def __len__(self):
        return len(self.singular_values)

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T

    def zero_mask(self, rel: float | None = None) -> np.ndarray:
        rel = settings.zero_rel if rel is None else rel
        s = self.singular_values
        smax = s.max() if len(s) else 0.0
        if smax == 0.0:
            return np.ones(len(s), dtype=bool)
        return s < rel * smax


def identity(dims: int | Sequence[int]) -> Operator:
    dims = (dims,) if isinstance(dims, (int, np.integer)) else tuple(dims)
    return Operator(np.eye(int(np.prod(dims)), dtype=complex), dims)


def kron(a, b) -> Operator:
    a, b = as_operator(a), as_operator(b)
    return Operator(np.kron(a.data, b.data), a.dims + b.dims)


def kron_all(ops: Iterable) -> Operator:
    return reduce(kron, ops)


def embed_local(op, site: int, dims: Sequence[int]) -> Operator:
    """Place a single-site operator at ``site`` of a product space, identity elsewhere."""
    op = np.asarray(as_operator(op).data)
    dims = tuple(dims)
    if op.shape[0] != dims[site]:
        raise ValueError(f"local operator of size {op.shape[0]} does not fit site of dim {dims[site]}")
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 1 :]))
    return Operator(np.kron(np.kron(np.eye(left), op), np.eye(right)), dims)


def matexp_hermitian(h, t: float, tol: float | None = None) -> Operator:
    """Return ``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    h = as_operator(h)
    tol = settings.tol if tol is None else tol
    scale = max(1.0, float(np.abs(h.data).max(initial=0.0)))
    dev = h.hermiticity_error()
    if dev > tol * scale:
        raise NonHermitianError(dev, tol * scale)
    herm = 0.5 * (h.data + h.data.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    return Operator((evecs * np.exp(-1j * evals * t)) @ evecs.conj().T, h.dims)


def svd(a) -> SVDTriple:
    """Singular value decomposition ``a = sum_J s_J |l_J><r_J|`` keeping zero singular values."""
    a = as_operator(a)
    u, s, vh = np.linalg.svd(a.data)
    return SVDTriple(s, u, vh.conj().T)


def operator_norm(a) -> float:
    return float(np.linalg.norm(as_operator(a).data, 2))


def average_gate_fidelity(m, u_ideal) -> float:
    """Average gate fidelity of a (possibly non-unitary) restriction ``m`` to a target unitary.

    ``F = (|tr(M U^dag)|^2 + tr(M^dag M)) / (n (n + 1))`` with ``n`` the dimension of
    the computational space. Leakage out of that space shows up as ``tr(M^dag M) < n``.
    """
    m = np.asarray(m.data if isinstance(m, Operator) else m, dtype=complex)
    u = np.asarray(u_ideal.data if isinstance(u_ideal, Operator) else u_ideal, dtype=complex)
    if u.ndim == 1:
        u = np.diag(u)
    n = m.shape[0]
    overlap = np.trace(m @ u.conj().T)
    purity = np.trace(m.conj().T @ m).real
    return float((abs(overlap) ** 2 + purity) / (n * (n + 1)))


def annihilation(dim: int) -> np.ndarray:
    """Truncated bosonic lowering operator ``sum_n sqrt(n) |n-1><n|`` in the Fock basis."""
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |1><0| in the {|1>, |0>} ordering
SIGMA_MINUS = SIGMA_PLUS.T.copy()
for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS):
    _m.setflags(write=False)
