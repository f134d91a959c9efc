"""Matrix embedding ``H = sigma_+ (x) A + sigma_- (x) A^dag`` and the interleaved rotation sequence.

The ancilla is the first tensor factor, ordered ``{|1>, |0>}``. On every pair
``{|1, l_J>, |0, r_J>}`` the evolution ``exp(-iHt)`` is a coin rotation by
``2 Lambda_J t``; interleaving it with ancilla z rotations drives each nonzero
block to ``-1`` while the dark (zero singular value) blocks pick up ``exp(+-2iNk)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    Operator,
    SVDTriple,
    as_operator,
    kron,
    matexp_hermitian,
    svd,
)

__all__ = [
    "EmbeddedSystem",
    "RotationTarget",
    "embed",
    "evolve_embedded",
    "block_evolution",
    "rz",
    "rotation_sequence",
    "ancilla_block",
    "ideal_rotation",
    "rotation_target",
    "error_bound",
]


@dataclass(frozen=True, eq=False)
class EmbeddedSystem:
    a: Operator
    h: Operator
    blocks: SVDTriple

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def zero_mask(self) -> np.ndarray:
        return self.blocks.zero_mask()


@dataclass(frozen=True, eq=False)
class RotationTarget:
    """Projector onto the dark left subspace and the rotation angle ``phi = pi - N k``."""

    projector: np.ndarray
    phi: float


def embed(a) -> EmbeddedSystem:
    a = as_operator(a)
    h = kron(Operator(SIGMA_PLUS, (2,)), a) + kron(Operator(SIGMA_MINUS, (2,)), a.dag())
    return EmbeddedSystem(a, h, svd(a))


def evolve_embedded(sys: EmbeddedSystem, t: float) -> Operator:
    return matexp_hermitian(sys.h, t)


def block_evolution(sys: EmbeddedSystem, t: float) -> Operator:
    """``exp(-iHt)`` assembled from the singular-value blocks instead of a matrix exponential."""
    lam = sys.blocks.singular_values
    L, R = sys.blocks.left_vectors, sys.blocks.right_vectors
    c, s = np.cos(lam * t), np.sin(lam * t)
    u = np.block(
        [
            [(L * c) @ L.conj().T, -1j * (L * s) @ R.conj().T],
            [-1j * (R * s) @ L.conj().T, (R * c) @ R.conj().T],
        ]
    )
    return Operator(u, sys.h.dims)


def rz(angle: float) -> np.ndarray:
    """Ancilla z rotation ``exp(i angle/2 sigma_z)``."""
    return np.diag([np.exp(0.5j * angle), np.exp(-0.5j * angle)])


def rotation_sequence(sys: EmbeddedSystem, t: float, k: float, N: int) -> Operator:
    """``S^{2N} W0 ... S^2 W0 S W0`` with ``W0 = Rz(2k) exp(-iHt)`` and ``S = Rz(4 pi / N)``."""
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    d = sys.dim
    u = evolve_embedded(sys, t).data
    # diagonal ancilla rotations act as row scalings
    w0 = np.repeat(np.diag(rz(2 * k)), d)[:, None] * u
    s_diag = np.repeat(np.diag(rz(4 * np.pi / N)), d)
    out = np.eye(2 * d, dtype=complex)
    for m in range(1, 2 * N + 1):
        out = (s_diag**m)[:, None] * (w0 @ out)
    return Operator(out, sys.h.dims)


def ancilla_block(w, ancilla: int = 1) -> np.ndarray:
    """``<a| W |a>`` on the system factor, for ancilla state ``a`` in {1, 0}."""
    w = as_operator(w)
    d = w.size // 2
    sl = slice(0, d) if ancilla == 1 else slice(d, 2 * d)
    return np.array(w.data[sl, sl])


def ideal_rotation(sys: EmbeddedSystem, k: float, N: int, ancilla: int = 1) -> Operator:
    """Target on the ancilla-|1> (or |0>) restriction.

    Dark left (right) singular vectors get ``exp(2iNk)`` (``exp(-2iNk)``); the rest get -1.
    """
    zero = sys.zero_mask
    vecs = sys.blocks.left_vectors if ancilla == 1 else sys.blocks.right_vectors
    phase = np.exp(2j * N * k * (1 if ancilla == 1 else -1))
    diag = np.where(zero, phase, -1.0)
    return Operator((vecs * diag) @ vecs.conj().T, sys.a.dims)


def rotation_target(sys: EmbeddedSystem, k: float, N: int) -> RotationTarget:
    L = sys.blocks.left_vectors[:, sys.zero_mask]
    return RotationTarget(L @ L.conj().T, float(np.pi - N * k))


def error_bound(lam, t: float, N: int):
    """Revival-theorem bound ``2 |cos(Lambda t)|^N`` on a block's distance from -1."""
    return 2 * np.abs(np.cos(np.asarray(lam) * t)) ** N
