"""Trapped-ion and Rydberg versions of the interleaved walk.

Ion 0 is the ancilla and every site is a qubit ordered ``{|1>, |0>}``. Collective
operators use spin-1/2 normalisation, ``S_a = (1/2) sum_j sigma_j^a``, so the neighbour
operator ``S~ = (1/2) sum_j w_j sigma_j^x`` has eigenvalues ``lambda`` in steps of 1/2 and
the MS conjugation rotates the ancilla by ``alpha = theta lambda / 2`` on each eigenspace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize_scalar

from .linalg import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Operator,
    average_gate_fidelity,
    embed_local,
    matexp_hermitian,
)
from .qsp import PhaseSequence, find_phases, reflection_polynomial

__all__ = [
    "MAX_IONS",
    "NoBalancedSubspaceError",
    "CollectiveSpin",
    "ReflectionResult",
    "PartitionReport",
    "collective_operator",
    "ms_unitary",
    "ion_walk_w0",
    "ion_walk_step",
    "ion_walk_sequence",
    "ion_qsp_sequence",
    "ion_reflection",
    "best_coin_angle",
    "balanced_assignments",
    "partition_oracle",
    "partition_from_json",
    "rydberg_walk_w0",
    "rydberg_walk_step",
    "rydberg_reflection",
]

MAX_IONS = 12  # full-space constructions stop at 2^12 system states

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


class NoBalancedSubspaceError(ValueError):
    """The collective operator has no zero eigenvalue (e.g. an odd number of unit weights)."""


@dataclass(frozen=True)
class CollectiveSpin:
    """``(1/2) sum_j w_j sigma_j^axis`` over the non-ancilla ions."""

    weights: tuple[float, ...]
    axis: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.axis not in ("x", "z"):
            raise ValueError("axis must be 'x' or 'z'")
        if not 1 <= len(self.weights) <= MAX_IONS:
            raise ValueError(f"between 1 and {MAX_IONS} ions supported")

    @classmethod
    def uniform(cls, n_ions: int, axis: str = "x") -> CollectiveSpin:
        return cls((1.0,) * n_ions, axis)

    @property
    def n_ions(self) -> int:
        return len(self.weights)

    def z_eigenvalues(self) -> np.ndarray:
        """Eigenvalue on each computational basis state (the z-axis version of the operator)."""
        vals = np.zeros(1)
        for w in self.weights:
            vals = np.add.outer(vals, 0.5 * w * np.array([1.0, -1.0])).ravel()
        return vals

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and orthonormal eigenvectors (columns) in the computational basis."""
        vals = self.z_eigenvalues()
        if self.axis == "z":
            return vals, np.eye(len(vals), dtype=complex)
        h = np.ones((1, 1), dtype=complex)
        for _ in self.weights:
            h = np.kron(h, _HADAMARD)
        return vals, h

    def operator(self) -> Operator:
        vals, vecs = self.eigh()
        return Operator((vecs * vals) @ vecs.conj().T, (2,) * self.n_ions)

    def zero_projector(self, tol: float = 1e-9) -> np.ndarray:
        vals, vecs = self.eigh()
        v = vecs[:, np.abs(vals) < tol]
        return v @ v.conj().T


def collective_operator(n_sites: int, axis: str) -> np.ndarray:
    """Spin-1/2 collective ``(1/2) sum_j sigma_j^axis`` over all ``n_sites`` ions."""
    pauli = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis]
    dims = (2,) * n_sites
    return 0.5 * sum(embed_local(pauli, j, dims).data for j in range(n_sites))


def ms_unitary(theta: float, varphi: float, n_ions: int) -> Operator:
    """``exp(-i theta/4 (cos varphi S_x + sin varphi S_y)^2)`` over ``n_ions`` ions (ancilla included)."""
    s = np.cos(varphi) * collective_operator(n_ions, "x") + np.sin(varphi) * collective_operator(n_ions, "y")
    return matexp_hermitian(Operator(s @ s, (2,) * n_ions), theta / 4)


def _ancilla_on(op2, n_rest):
    return np.kron(op2, np.eye(2**n_rest))


def _spin(n_ions_or_spin) -> CollectiveSpin:
    if isinstance(n_ions_or_spin, CollectiveSpin):
        return n_ions_or_spin
    return CollectiveSpin.uniform(int(n_ions_or_spin))


def _block_sum(spin: CollectiveSpin, block_fn) -> Operator:
    """``sum_lambda |lambda><lambda| (x) block(lambda)`` with the ancilla as first factor."""
    vals, vecs = spin.eigh()
    d = len(vals)
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    for lam in np.unique(np.round(vals, 12)):
        sel = vecs[:, np.abs(vals - lam) < 1e-9]
        out += np.kron(block_fn(lam), sel @ sel.conj().T)
    return Operator(out, (2,) * (spin.n_ions + 1))


def _rotation_block(alpha: float) -> np.ndarray:
    """``exp(i pi/2 (cos alpha Z + sin alpha Y))`` = ``i (cos alpha Z + sin alpha Y)``."""
    return 1j * (np.cos(alpha) * SIGMA_Z + np.sin(alpha) * SIGMA_Y)


def ion_walk_w0(theta: float, spin, method: str = "construction") -> Operator:
    """Ancilla z flip conjugated by the collective entangler.

    ``construction`` multiplies ``U_MS(-theta) exp(i pi/2 Z_0) U_MS(theta)`` for unit
    weights, or the equivalent Ising conjugation ``exp(+-i theta/4 X_0 S~)`` for general
    weights. ``block`` assembles the eigenspace direct sum instead.
    """
    spin = _spin(spin)
    n = spin.n_ions
    if method == "block":
        return _block_sum(spin, lambda lam: _rotation_block(theta * lam / 2))
    if method != "construction":
        raise ValueError("method must be 'construction' or 'block'")
    flip = _ancilla_on(1j * SIGMA_Z, n)  # exp(i pi/2 Z)
    if all(w == 1.0 for w in spin.weights) and spin.axis == "x":
        u = ms_unitary(theta, 0.0, n + 1).data
        um = ms_unitary(-theta, 0.0, n + 1).data
        return Operator(um @ flip @ u, (2,) * (n + 1))
    coupling = Operator(np.kron(SIGMA_X, spin.operator().data), (2,) * (n + 1))
    u = matexp_hermitian(coupling, theta / 4).data  # exp(-i theta/4 X_0 S~)
    return Operator(u.conj().T @ flip @ u, (2,) * (n + 1))


def ion_walk_step(theta: float, phi: float, spin, method: str = "construction") -> Operator:
    """``W0 = exp(i phi Z_0) w0 exp(i pi/2 Z_0)``; on eigenspace ``lambda`` this is
    ``-exp(i phi Z) [[c, i s], [i s, c]]`` with ``c, s = cos, sin(theta lambda / 2)``."""
    spin = _spin(spin)
    n = spin.n_ions
    if method == "block":

        def block(lam):
            a = theta * lam / 2
            coin = np.array([[np.cos(a), 1j * np.sin(a)], [1j * np.sin(a), np.cos(a)]])
            return -np.diag([np.exp(1j * phi), np.exp(-1j * phi)]) @ coin

        return _block_sum(spin, block)
    w0 = ion_walk_w0(theta, spin, method).data
    shift = np.repeat([np.exp(1j * phi), np.exp(-1j * phi)], 2**n)
    flip = np.repeat([1j, -1j], 2**n)
    return Operator(shift[:, None] * w0 * flip[None, :], (2,) * (n + 1))


def _interleave(step: np.ndarray, n_rest: int, N: int, axis_diag) -> np.ndarray:
    out = np.eye(step.shape[0], dtype=complex)
    for m in range(1, 2 * N + 1):
        s = np.repeat(axis_diag(2 * np.pi * m / N), 2**n_rest)
        out = s[:, None] * (step @ out)
    return out


def ion_walk_sequence(theta: float, N: int, spin, phi: float = 0.0, method: str = "construction") -> Operator:
    """``S^{2N} W0 ... S W0`` with ``S = exp(i 2 pi / N Z_0)``."""
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    spin = _spin(spin)
    step = ion_walk_step(theta, phi, spin, method).data
    out = _interleave(step, spin.n_ions, N, lambda a: np.array([np.exp(1j * a), np.exp(-1j * a)]))
    return Operator(out, (2,) * (spin.n_ions + 1))


def ion_qsp_sequence(theta: float, seq: PhaseSequence, spin, method: str = "construction") -> Operator:
    """``e^{i phi_d Z} V ... e^{i phi_1 Z} V e^{i phi_0 Z}`` with ``V = -w0 exp(i pi/2 Z_0)``.

    ``V`` is ``exp(i alpha X)`` on eigenspace ``lambda``, a signal rotation with
    ``x = cos(theta lambda / 2)`` up to a Z conjugation that leaves the ``<1|.|1>``
    response unchanged.
    """
    spin = _spin(spin)
    n = spin.n_ions
    v = -ion_walk_step(theta, 0.0, spin, method).data
    z = lambda a: np.repeat([np.exp(1j * a), np.exp(-1j * a)], 2**n)  # noqa: E731
    out = np.diag(z(seq.phases[0]))
    for phi in seq.phases[1:]:
        out = z(phi)[:, None] * (v @ out)
    return Operator(out, (2,) * (n + 1))


@dataclass(frozen=True, eq=False)
class ReflectionResult:
    """Ancilla-restricted block ``M``, its target, and the average gate fidelity."""

    W: Operator
    M: np.ndarray
    target: np.ndarray
    F: float
    subspace_dim: int


def _restrict(w: np.ndarray, n_rest: int, ancilla: int) -> np.ndarray:
    d = 2**n_rest
    sl = slice(0, d) if ancilla == 1 else slice(d, 2 * d)
    return w[sl, sl]


def ion_reflection(
    n_ions: int, theta: float, N: int, phi: float = 0.0, ancilla: int = 1, spin: CollectiveSpin | None = None,
    method: str = "construction",
) -> ReflectionResult:
    """Walk sequence on the ions and its fidelity against the zero-eigenspace rotation.

    Target: ``exp(+-2iN phi)`` on the ``lambda = 0`` eigenspace (sign set by the ancilla
    state), ``-1`` elsewhere; ``n = 2^Nq`` in the fidelity.
    """
    spin = CollectiveSpin.uniform(n_ions) if spin is None else spin
    if spin.n_ions != n_ions:
        raise ValueError("spin size does not match n_ions")
    proj = spin.zero_projector()
    dim0 = int(round(np.trace(proj).real))
    if dim0 == 0:
        raise NoBalancedSubspaceError(f"no zero eigenvalue for {n_ions} ions with weights {spin.weights}")
    w = ion_walk_sequence(theta, N, spin, phi, method).data
    m = _restrict(w, n_ions, ancilla)
    phase = np.exp(2j * N * phi * (1 if ancilla == 1 else -1))
    target = phase * proj - (np.eye(len(proj)) - proj)
    return ReflectionResult(Operator(w, (2,) * (n_ions + 1)), m, target, average_gate_fidelity(m, target), dim0)


def best_coin_angle(eigenvalues, grid: int = 4001) -> tuple[float, float]:
    """Entangler angle minimising ``max |cos(theta lambda / 2)|`` over the nonzero eigenvalues.

    Returns ``(theta, max_cos)``.
    """
    lam = np.unique(np.abs(np.asarray(eigenvalues, dtype=float)))
    lam = lam[lam > 1e-9]
    if len(lam) == 0:
        return float(np.pi), 0.0

    def cost(th):
        return float(np.max(np.abs(np.cos(th * lam / 2))))

    # the cost is periodic in theta with period 4 pi / gcd, so [0, 8 pi] covers half-integer spectra
    thetas = np.linspace(1e-3, 8 * np.pi, grid * 4)
    vals = np.array([cost(t) for t in thetas])
    i = int(np.argmin(vals))
    step = thetas[1] - thetas[0]
    res = minimize_scalar(cost, bounds=(thetas[i] - step, thetas[i] + step), method="bounded",
                          options={"xatol": 1e-12})
    th = float(res.x) if res.fun <= vals[i] else float(thetas[i])
    return th, cost(th)


def balanced_assignments(values) -> list[tuple[int, ...]]:
    """Sign vectors ``z`` (+1 for |1>, -1 for |0>) with ``sum_j a_j z_j = 0``, by brute force."""
    vals = np.asarray(values)
    return [z for z in product((1, -1), repeat=len(vals)) if np.dot(vals, z) == 0]


@dataclass(frozen=True, eq=False)
class PartitionReport:
    values: tuple[int, ...]
    mechanism: str
    theta: float
    steps: int
    oracle: Operator
    exact: np.ndarray
    F: float
    balanced: list
    phases: tuple[float, ...] | None = None

    @property
    def has_solution(self) -> bool:
        return len(self.balanced) > 0

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "mechanism": self.mechanism,
            "theta": self.theta,
            "steps": self.steps,
            "F": self.F,
            "has_solution": self.has_solution,
            "balanced_states": ["".join("1" if z > 0 else "0" for z in s) for s in self.balanced],
            "phases": None if self.phases is None else list(self.phases),
        }


def partition_oracle(values, mechanism: str = "walk", N: int | None = None, tol: float = 1e-6,
                     seed: int = 0) -> PartitionReport:
    """Reflection about ``sum_j a_j z_j = 0`` in the computational basis.

    The entangler couples the ancilla to ``(1/2) sum_j a_j X_j``; Hadamards on the
    system ions before and after turn its zero eigenspace into the balanced
    computational states. ``walk`` picks the smallest odd ``N`` whose revival bound is
    below ``tol`` (unless given); ``qsp`` fits phases to a polynomial that sends every
    nonzero-eigenvalue signal to -1. With no balanced assignment the oracle is ``-I``.
    """
    vals = tuple(int(v) for v in values)
    if len(vals) < 2:
        raise ValueError("need at least two integers")
    if len(vals) > MAX_IONS:
        raise ValueError(f"at most {MAX_IONS} integers supported")
    spin = CollectiveSpin(tuple(float(v) for v in vals), "x")
    eig = spin.z_eigenvalues()
    theta, worst = best_coin_angle(eig)
    n = len(vals)
    phases = None
    if mechanism == "walk":
        if N is None:
            N = 1
            while 2 * worst**N > tol and N < 201:
                N += 2
        w = ion_walk_sequence(theta, N, spin).data
        steps = 2 * N
    elif mechanism == "qsp":
        nonzero = eig[np.abs(eig) > 1e-9]
        target = reflection_polynomial(np.cos(theta * nonzero / 2))
        seq = find_phases(target, target.degree, seed=seed)
        w = ion_qsp_sequence(theta, seq, spin).data
        steps = seq.degree
        phases = seq.phases
    else:
        raise ValueError("mechanism must be 'walk' or 'qsp'")
    hads = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        hads = np.kron(hads, _HADAMARD)
    m = hads @ _restrict(w, n, 1) @ hads
    zero = np.abs(eig) < 1e-9
    exact = np.diag(np.where(zero, 1.0, -1.0)).astype(complex)
    fid = average_gate_fidelity(m, exact)
    return PartitionReport(vals, mechanism, theta, steps, Operator(m, (2,) * n), exact, fid,
                           balanced_assignments(vals), phases)


def partition_from_json(text: str) -> tuple[int, ...]:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in data):
        raise ValueError("partition instance must be a JSON array of integers")
    return tuple(data)


def _rydberg_spin(couplings) -> CollectiveSpin:
    # Pauli-normalised star coupling sum_j V_0j Z_j == 2 * (1/2) sum_j V_0j Z_j
    return CollectiveSpin(tuple(2.0 * float(v) for v in couplings), "z")


def rydberg_walk_w0(couplings, t: float, phi: float, method: str = "construction") -> Operator:
    """``exp(i H_R t) exp(i phi X_0) exp(-i H_R t)`` with ``H_R = Z_0 sum_j V_0j Z_j``.

    On the eigenspace ``mu`` of ``sum_j V_0j Z_j`` this is
    ``exp(i phi (cos(2 t mu) X - sin(2 t mu) Y))``.
    """
    spin = _rydberg_spin(couplings)
    n = spin.n_ions
    if method == "block":

        def block(lam):
            a = 2 * t * lam
            gen = np.cos(a) * SIGMA_X - np.sin(a) * SIGMA_Y
            return np.cos(phi) * np.eye(2) + 1j * np.sin(phi) * gen

        return _block_sum(spin, block)
    mu = spin.z_eigenvalues()
    hr = np.concatenate([mu, -mu])  # Z_0 (x) sum V Z_j is diagonal
    rot = np.kron(np.cos(phi) * np.eye(2) + 1j * np.sin(phi) * SIGMA_X, np.eye(2**n))
    out = np.exp(1j * hr * t)[:, None] * rot * np.exp(-1j * hr * t)[None, :]
    return Operator(out, (2,) * (n + 1))


def rydberg_walk_step(couplings, t: float, phi: float, method: str = "construction") -> Operator:
    """``exp(i phi X_0) w0 exp(i pi/2 X_0)`` with ``w0`` at rotation angle pi/2."""
    n = len(couplings)
    w0 = rydberg_walk_w0(couplings, t, np.pi / 2, method).data
    left = np.kron(np.cos(phi) * np.eye(2) + 1j * np.sin(phi) * SIGMA_X, np.eye(2**n))
    right = np.kron(1j * SIGMA_X, np.eye(2**n))
    return Operator(left @ w0 @ right, (2,) * (n + 1))


def rydberg_reflection(couplings, t: float, N: int, phi: float = 0.0, method: str = "construction") -> ReflectionResult:
    """Interleave the Rydberg step with ``exp(i 2 pi / N X_0)`` and score the ancilla ``|+>`` block.

    Hadamard on the ancilla maps the sequence onto the ion form, so the ancilla is read
    out in the X basis; the rotated subspace is ``sum_j V_0j Z_j = 0`` in the
    computational basis of the other atoms.
    """
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    n = len(couplings)
    step = rydberg_walk_step(couplings, t, phi, method).data
    out = np.eye(2 ** (n + 1), dtype=complex)
    for m in range(1, 2 * N + 1):
        a = 2 * np.pi * m / N
        s = np.kron(np.cos(a) * np.eye(2) + 1j * np.sin(a) * SIGMA_X, np.eye(2**n))
        out = s @ step @ out
    had = np.kron(_HADAMARD, np.eye(2**n))
    rotated = had @ out @ had
    m = _restrict(rotated, n, 1)
    spin = _rydberg_spin(couplings)
    zero = np.abs(spin.z_eigenvalues()) < 1e-9
    if not zero.any():
        raise NoBalancedSubspaceError("no zero-sum configuration for these couplings")
    target = np.diag(np.where(zero, np.exp(2j * N * phi), -1.0))
    return ReflectionResult(Operator(out, (2,) * (n + 1)), m, target, average_gate_fidelity(m, target),
                            int(zero.sum()))
