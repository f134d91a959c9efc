"""Discrete-time coined quantum walk at a single walker momentum.

The walker register is dropped: at fixed momentum ``k`` the walk acts on the
coin alone, so every operator here is a 2x2 matrix. Units: one time step per
walk step, hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import SIGMA_Y, SIGMA_Z, Operator, operator_norm

__all__ = [
    "WalkParams",
    "BandPoint",
    "DegeneratePointError",
    "Winding",
    "coin",
    "shift",
    "single_step",
    "band_point",
    "effective_hamiltonian",
    "chiral_operator",
    "winding_number",
    "step_dependent_walk",
    "walk_sequence",
    "revival_residual",
    "revival_bound",
]


class DegeneratePointError(ValueError):
    """The band gap closes (sin E = 0) so the band axis is undefined."""


@dataclass(frozen=True)
class WalkParams:
    """Coin angle, momentum and half-step count of the 2N-step walk."""

    theta: float
    k: float
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1 or self.N % 2 == 0:
            raise ValueError(f"N must be a positive odd integer, got {self.N}")

    @property
    def n_steps(self) -> int:
        return 2 * self.N

    @property
    def delta_k(self) -> float:
        return 2 * np.pi / self.N


@dataclass(frozen=True)
class BandPoint:
    energy: float
    axis: np.ndarray
    chiral_axis: np.ndarray


class Winding(NamedTuple):
    number: int
    degenerate: bool


def _op(m) -> Operator:
    return Operator(m, (2,))


def coin(theta: float) -> Operator:
    """Coin toss ``R(theta) = cos(theta/2) I - i sin(theta/2) sigma_x``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return _op([[c, -1j * s], [-1j * s, c]])


def shift(k: float) -> Operator:
    """Single-momentum shift ``exp(i k sigma_z)``."""
    return _op(np.diag([np.exp(1j * k), np.exp(-1j * k)]))


def single_step(theta: float, k: float) -> Operator:
    return shift(k) @ coin(theta)


def band_point(k: float, theta: float, tol: float = 1e-12) -> BandPoint:
    """Quasi-energy and band axis of the walk at momentum ``k``.

    Axis components follow the two-band form ``n = (cos k sin(theta/2), -sin k sin(theta/2),
    sin k cos(theta/2)) / sin E``; that axis lies on the great circle perpendicular to
    ``A = (0, cos(theta/2), sin(theta/2))``.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    cos_e = np.clip(np.cos(k) * c, -1.0, 1.0)
    energy = float(np.arccos(cos_e))
    sin_e = np.sin(energy)
    if abs(sin_e) < tol:
        raise DegeneratePointError(f"gap closes at k={k:.6g}, theta={theta:.6g}")
    axis = np.array([np.cos(k) * s, -np.sin(k) * s, np.sin(k) * c]) / sin_e
    return BandPoint(energy, axis, np.array([0.0, c, s]))


def effective_hamiltonian(theta: float, k: float) -> Operator:
    """``H_eff`` with ``single_step(theta, k) = exp(-i H_eff)``, eigenvalues in (-pi, pi)."""
    w = single_step(theta, k).data
    evals, evecs = np.linalg.eig(w)
    energies = -np.angle(evals)
    # W is normal, but eig does not return orthonormal vectors for degenerate pairs
    q, _ = np.linalg.qr(evecs)
    return _op((q * energies) @ q.conj().T)


def chiral_operator(theta: float) -> Operator:
    """Unitary ``Gamma`` with ``Gamma H_eff(k, theta) Gamma^dag = -H_eff(k, theta)`` for every k.

    ``shift(k) @ coin(theta)`` generates the axis ``(s cos k, -s sin k, -c sin k) / sin E``,
    which is perpendicular to ``(0, c, -s)``; conjugation by that axis' Pauli
    (a rotation by pi, i.e. ``exp(i pi/2 a.sigma)``) negates the Hamiltonian.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    a_sigma = c * SIGMA_Y - s * SIGMA_Z
    return _op(1j * a_sigma)


def _winding_angle(theta: float, k: np.ndarray) -> np.ndarray:
    # polar angle of n in the plane spanned by e1 = x and e2 = A x e1; sin E > 0 drops out
    s = np.sin(theta / 2)
    return np.arctan2(-np.sin(k), s * np.cos(k))


def winding_number(theta: float, grid_size: int = 256, tol: float = 1e-9) -> Winding:
    """Number of turns of the band axis around the chiral axis as k sweeps the zone.

    Accumulates the polar angle on a uniform grid; steps that jump by more than
    pi/2 are bisected until resolved, so near-degenerate coins stay unambiguous.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    t = np.mod(theta, 4 * np.pi)
    if min(abs(t), abs(t - 2 * np.pi), abs(t - 4 * np.pi)) < tol:
        return Winding(0, True)

    ks = np.linspace(0.0, 2 * np.pi, grid_size + 1)
    total = 0.0
    for k0, k1 in zip(ks[:-1], ks[1:]):
        total += _accumulate(theta, k0, k1, depth=0)
    return Winding(int(round(abs(total) / (2 * np.pi))), False)


def _accumulate(theta, k0, k1, depth):
    a0, a1 = _winding_angle(theta, np.array([k0, k1]))
    d = (a1 - a0 + np.pi) % (2 * np.pi) - np.pi
    if abs(d) > np.pi / 2 and depth < 60:
        km = 0.5 * (k0 + k1)
        return _accumulate(theta, k0, km, depth + 1) + _accumulate(theta, km, k1, depth + 1)
    return d


def step_dependent_walk(theta: float, k: float, n_steps: int, delta_k: float) -> Operator:
    """``prod_{m=1..n_steps} shift(delta_k)^m single_step(theta, k)``, leftmost factor applied last."""
    w0 = single_step(theta, k).data
    s = shift(delta_k).data
    out = np.eye(2, dtype=complex)
    for m in range(1, n_steps + 1):
        out = np.linalg.matrix_power(s, m) @ w0 @ out
    return _op(out)


def walk_sequence(params: WalkParams) -> Operator:
    """The 2N-step walk whose momentum sweeps the zone twice in steps of 2 pi / N."""
    return step_dependent_walk(params.theta, params.k, params.n_steps, params.delta_k)


def revival_residual(theta: float, N: int, k: float = 0.0) -> float:
    """``||W^[2N,1] + I||``, the distance of the odd-N walk from ``-I``."""
    w = walk_sequence(WalkParams(theta, k, N))
    return operator_norm(w.data + np.eye(2))


def revival_bound(theta: float, N: int) -> float:
    return 2 * abs(np.cos(theta / 2)) ** N
