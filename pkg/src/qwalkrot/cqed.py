"""Star lattice of transmons: a central ancilla coupled to ``Nq`` neighbours.

Frequencies, anharmonicities and couplings are stored as ``value / 2 pi`` in GHz and
converted to rad/ns internally, so times are in ns. Site 0 is the ancilla.

Two models are provided. The RWA model keeps only the resonant
``|1_0 1_i> <-> |0_0 2_i>`` exchange (two-level ancilla, three-level neighbours) and
is exactly the matrix embedding of ``A = sum_i g_i |1><2|_i``. The full model is the
lab-frame Bose-Hubbard Hamiltonian truncated to ``local_dim`` levels per site.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import minimize_scalar

from .embedding import ancilla_block, embed, rotation_sequence
from .linalg import Operator, annihilation, average_gate_fidelity, matexp_hermitian

__all__ = [
    "TWO_PI",
    "LatticeSpec",
    "FidelityReport",
    "WeakAnharmonicityWarning",
    "load_preset",
    "lattice_from_preset",
    "gate_time_ns",
    "list_presets",
    "lab_hamiltonian",
    "bare_hamiltonian",
    "embedded_matrix",
    "rwa_hamiltonian",
    "excitation_number",
    "computational_indices",
    "embedded_singular_values",
    "rotation_target_diag",
    "best_rotation_angle",
    "simulate_rwa_sequence",
    "simulate_full_sequence",
    "probe_initial_states",
    "write_traces_csv",
    "closed_form_block",
    "closed_form_rotation_fidelity",
]

TWO_PI = 2 * np.pi


class WeakAnharmonicityWarning(UserWarning):
    """Some ``|alpha / g|`` is below 10, so the RWA picture is unreliable."""


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice parameters; all three arrays are ``value / 2 pi`` in GHz.

    ``omega_ghz`` and ``alpha_ghz`` have ``Nq + 1`` entries (ancilla first),
    ``coupling_ghz`` holds the bare couplings ``g_i0`` of the ``Nq`` neighbours.
    """

    omega_ghz: tuple[float, ...]
    alpha_ghz: tuple[float, ...]
    coupling_ghz: tuple[float, ...]
    local_dim: int = 3

    def __post_init__(self):
        for name in ("omega_ghz", "alpha_ghz", "coupling_ghz"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = len(self.coupling_ghz)
        if n < 1:
            raise ValueError("need at least one neighbour")
        if len(self.omega_ghz) != n + 1 or len(self.alpha_ghz) != n + 1:
            raise ValueError("omega_ghz and alpha_ghz need one entry per site (ancilla + neighbours)")
        if any(a >= 0 for a in self.alpha_ghz):
            raise ValueError("anharmonicities must be negative")
        if not 2 <= self.local_dim <= 9:
            raise ValueError("local_dim must lie in [2, 9]")
        gmax = max(abs(g) for g in self.coupling_ghz)
        if gmax > 0 and min(abs(a) for a in self.alpha_ghz) / gmax < 10:
            warnings.warn("|alpha/g| < 10: off-resonant exchange is not negligible", WeakAnharmonicityWarning)

    @classmethod
    def resonant(cls, omega0_ghz, alpha_ghz, effective_coupling_ghz, local_dim=3) -> LatticeSpec:
        """Neighbour frequencies tuned so ``|0_0 2_j>`` is degenerate with ``|1_0 1_j>``.

        ``effective_coupling_ghz`` is the ``|11> <-> |02>`` Rabi coupling ``g``, a scalar
        or one value per neighbour; the bare couplings are ``g / sqrt(2)``.
        """
        alpha = tuple(float(a) for a in alpha_ghz)
        n = len(alpha) - 1
        g = np.broadcast_to(np.asarray(effective_coupling_ghz, dtype=float), (n,))
        omega = (float(omega0_ghz),) + tuple(omega0_ghz - a for a in alpha[1:])
        return cls(omega, alpha, tuple(g / np.sqrt(2)), local_dim)

    @property
    def n_neighbors(self) -> int:
        return len(self.coupling_ghz)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.local_dim,) * (self.n_neighbors + 1)

    @property
    def effective_couplings_ghz(self) -> np.ndarray:
        return np.sqrt(2) * np.asarray(self.coupling_ghz)

    def with_local_dim(self, local_dim: int) -> LatticeSpec:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakAnharmonicityWarning)
            return LatticeSpec(self.omega_ghz, self.alpha_ghz, self.coupling_ghz, local_dim)

    def to_dict(self) -> dict:
        return {
            "omega_ghz": list(self.omega_ghz),
            "alpha_ghz": list(self.alpha_ghz),
            "coupling_ghz": list(self.coupling_ghz),
            "local_dim": self.local_dim,
        }


@dataclass(frozen=True, eq=False)
class FidelityReport:
    """Restriction ``M`` of the sequence to ancilla ``|1> -> |1>`` and computational neighbours."""

    M: np.ndarray
    target: np.ndarray
    F: float
    phi_star: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"F": self.F, "phi_star": self.phi_star, **self.metadata}


def list_presets() -> list[str]:
    root = resources.files("qwalkrot") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    """Shipped parameter sets (JSON) reproducing the published tables."""
    path = resources.files("qwalkrot") / "presets" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return json.loads(path.read_text())


def lattice_from_preset(preset: dict, g_mhz: float, local_dim: int | None = None) -> LatticeSpec:
    """Resonant lattice for a ``"lattice"`` preset at effective coupling ``g_mhz``."""
    alpha_ghz = np.asarray(preset["alpha_mhz"], dtype=float) * 1e-3
    dim = int(local_dim if local_dim is not None else preset.get("local_dim", 3))
    return LatticeSpec.resonant(preset["omega0_ghz"], alpha_ghz, g_mhz * 1e-3, dim)


def gate_time_ns(g_mhz: float, t_factor: float = 0.333) -> float:
    """``t_factor * pi / g`` in ns for an effective coupling ``g / 2 pi`` given in MHz."""
    return float(t_factor * np.pi / (TWO_PI * g_mhz * 1e-3))


def _site_ops(dims):
    out = []
    for i, d in enumerate(dims):
        left = int(np.prod(dims[:i]))
        right = int(np.prod(dims[i + 1 :]))
        out.append(np.kron(np.kron(np.eye(left), annihilation(d)), np.eye(right)))
    return out


def _bare_diagonal(spec: LatticeSpec) -> np.ndarray:
    """Diagonal of ``H0`` in rad/ns."""
    d = spec.local_dim
    n = np.arange(d)
    diag = np.zeros(1)
    for w, a in zip(spec.omega_ghz, spec.alpha_ghz):
        site = TWO_PI * (w * n + 0.5 * a * n * (n - 1))
        diag = np.add.outer(diag, site).ravel()
    return diag


def bare_hamiltonian(spec: LatticeSpec) -> Operator:
    return Operator(np.diag(_bare_diagonal(spec)), spec.dims)


def lab_hamiltonian(spec: LatticeSpec) -> Operator:
    """``sum_i omega_i n_i + alpha_i/2 n_i(n_i-1) + sum_i g_i0 (b_i b_0^dag + h.c.)`` in rad/ns."""
    b = _site_ops(spec.dims)
    h = np.diag(_bare_diagonal(spec)).astype(complex)
    for i, g in enumerate(spec.coupling_ghz, start=1):
        hop = b[i] @ b[0].conj().T
        h += TWO_PI * g * (hop + hop.conj().T)
    return Operator(h, spec.dims)


def excitation_number(dims) -> np.ndarray:
    """Total excitation count of every basis state (Fock indices summed over sites)."""
    total = np.zeros(1, dtype=int)
    for d in dims:
        total = np.add.outer(total, np.arange(d)).ravel()
    return total


def embedded_matrix(couplings) -> Operator:
    """``A = sum_i g_i |1><2|_i`` on ``Nq`` three-level neighbours."""
    g = np.asarray(couplings, dtype=float)
    nq = len(g)
    raise_ = np.zeros((3, 3))
    raise_[1, 2] = 1.0
    a = np.zeros((3**nq, 3**nq), dtype=complex)
    for i, gi in enumerate(g):
        a += gi * np.kron(np.kron(np.eye(3**i), raise_), np.eye(3 ** (nq - i - 1)))
    return Operator(a, (3,) * nq)


def rwa_hamiltonian(couplings) -> Operator:
    """``|1><0|_0 (x) sum_i g_i |1><2|_i + h.c.``, ancilla ordered ``{|1>, |0>}``.

    Assembled term by term from single-site transition operators.
    """
    g = np.asarray(couplings, dtype=float)
    nq = len(g)
    anc_up = np.array([[0.0, 1.0], [0.0, 0.0]])
    h = np.zeros((2 * 3**nq, 2 * 3**nq), dtype=complex)
    for i, gi in enumerate(g):
        down = np.zeros((3, 3))
        down[1, 2] = 1.0  # |1><2| on neighbour i
        term = anc_up
        for j in range(nq):
            term = np.kron(term, down if j == i else np.eye(3))
        h += gi * (term + term.T)
    return Operator(h, (2,) + (3,) * nq)


def computational_indices(n_sites: int, local_dim: int = 3, prefix: tuple[int, ...] = ()) -> np.ndarray:
    """Flat indices of the basis states with Fock labels in {0, 1}, after fixed leading labels."""
    total = len(prefix) + n_sites
    idx = []
    for bits in itertools.product((0, 1), repeat=n_sites):
        labels = tuple(prefix) + bits
        idx.append(sum(x * local_dim ** (total - 1 - i) for i, x in enumerate(labels)))
    return np.array(idx)


def embedded_singular_values(couplings, bits) -> float:
    """``sqrt(sum_i J_i g_i^2)`` for neighbour bit string ``J``."""
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    g = np.asarray(couplings, dtype=float)
    return float(np.sqrt(np.sum(np.asarray(bits) * g**2)))


def rotation_target_diag(n_neighbors: int, phi: float) -> np.ndarray:
    """``exp(-2i phi)`` on the all-zero neighbour state, ``-1`` on the rest.

    With ``phi = pi - N k`` this is the ancilla-|1> target ``exp(2iNk)`` / ``-1``.
    """
    u = -np.ones(2**n_neighbors, dtype=complex)
    u[0] = np.exp(-2j * phi)
    return u


def best_rotation_angle(m: np.ndarray, n_neighbors: int, scan_points: int = 720) -> tuple[float, float]:
    """Maximise the average gate fidelity over the target angle.

    Coarse scan on ``[0, 2 pi)`` then bounded scalar refinement around the best point.
    ``F`` has period pi in the angle, so the result is folded into ``(0, pi]``.
    """

    def fid(phi):
        return average_gate_fidelity(m, rotation_target_diag(n_neighbors, phi))

    grid = np.linspace(0.0, TWO_PI, scan_points, endpoint=False)
    values = np.array([fid(p) for p in grid])
    p0 = grid[int(np.argmax(values))]
    step = TWO_PI / scan_points
    res = minimize_scalar(lambda p: -fid(p), bounds=(p0 - step, p0 + step), method="bounded",
                          options={"xatol": 1e-10})
    phi, f = float(res.x), float(-res.fun)
    if f < values.max():
        phi, f = float(p0), float(values.max())
    phi = np.pi - np.mod(np.pi - phi, np.pi)
    return f, float(phi)


def simulate_rwa_sequence(couplings, N: int, k: float, t_g: float) -> FidelityReport:
    """Interleaved sequence on the RWA Hamiltonian, scored against ``phi = pi - N k``.

    ``couplings`` are the effective ``g_i`` in any angular unit, ``t_g`` in the inverse unit.
    """
    g = np.asarray(couplings, dtype=float)
    sys = embed(embedded_matrix(g))
    w = rotation_sequence(sys, t_g, k, N)
    idx = computational_indices(len(g))
    m = ancilla_block(w, 1)[np.ix_(idx, idx)]
    phi = float(np.pi - N * k)
    target = rotation_target_diag(len(g), phi)
    f = average_gate_fidelity(m, target)
    meta = {"model": "RWA", "N": int(N), "k": float(k), "t_g": float(t_g), "couplings": g.tolist()}
    return FidelityReport(m, target, f, phi, meta)


def simulate_full_sequence(
    spec: LatticeSpec, N: int, t_g: float, phi_scan: int = 720, k: float = 0.0
) -> FidelityReport:
    """Interleaved sequence with every interaction segment evolved under the lab Hamiltonian.

    ``t_g`` in ns. The ancilla z rotations act as ``exp(i angle (n_0 - 1/2))`` on all
    ancilla levels. The result is moved into the frame of ``H0`` over the total
    interaction time, which is the single-qubit frame correction on every site.
    """
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    d = spec.local_dim
    rest = d**spec.n_neighbors
    u = matexp_hermitian(lab_hamiltonian(spec), t_g).data
    levels = np.arange(d) - 0.5

    def ancilla_rz(angle):
        return np.repeat(np.exp(1j * angle * levels), rest)

    w0 = ancilla_rz(2 * k)[:, None] * u
    s = ancilla_rz(4 * np.pi / N)
    w = np.eye(d * rest, dtype=complex)
    for m in range(1, 2 * N + 1):
        w = (s**m)[:, None] * (w0 @ w)
    total_time = 2 * N * t_g
    bare = _bare_diagonal(spec)
    w = np.exp(1j * bare * total_time)[:, None] * w

    idx = computational_indices(spec.n_neighbors, d, prefix=(1,))
    m = w[np.ix_(idx, idx)]
    f, phi = best_rotation_angle(m, spec.n_neighbors, phi_scan)
    betas = np.mod(TWO_PI * np.asarray(spec.omega_ghz[1:]) * total_time, TWO_PI)
    meta = {
        "model": "full",
        "N": int(N),
        "k": float(k),
        "t_g_ns": float(t_g),
        "total_time_ns": float(total_time),
        "local_dim": d,
        "frame_betas": betas.tolist(),
        "leakage": float(1 - np.trace(m.conj().T @ m).real / len(idx)),
    }
    return FidelityReport(m, rotation_target_diag(spec.n_neighbors, phi), f, phi, meta)


def _label_index(label: str, local_dim: int) -> int:
    return int(sum(int(c) * local_dim ** (len(label) - 1 - i) for i, c in enumerate(label)))


def probe_initial_states(spec: LatticeSpec, labels, t_max: float, samples: int = 201):
    """Return-probability traces ``|<s|exp(-iHt)|s>|^2`` under the lab Hamiltonian.

    ``labels`` are Fock strings with the ancilla first (``"11000"``); ``t_max`` in ns.
    Returns ``(times, {label: populations})``.
    """
    h = lab_hamiltonian(spec).data
    exc = excitation_number(spec.dims)
    times = np.linspace(0.0, t_max, samples)
    sectors = {}
    traces = {}
    for label in labels:
        if len(label) != spec.n_neighbors + 1:
            raise ValueError(f"label {label!r} needs {spec.n_neighbors + 1} sites")
        idx = _label_index(label, spec.local_dim)
        # the exchange coupling conserves excitation number, so one sector suffices
        n = exc[idx]
        if n not in sectors:
            sector = np.nonzero(exc == n)[0]
            sectors[n] = (sector, *np.linalg.eigh(h[np.ix_(sector, sector)]))
        sector, evals, evecs = sectors[n]
        weights = np.abs(evecs[np.searchsorted(sector, idx)]) ** 2
        amp = np.exp(-1j * np.outer(times, evals)) @ weights
        traces[label] = np.abs(amp) ** 2
    return times, traces


def write_traces_csv(path, times, traces) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("time_ns,state_label,population\n")
        for label, pops in traces.items():
            for t, p in zip(times, pops):
                fh.write(f"{t:.6f},{label},{p:.12f}\n")


def closed_form_block(k, lam):
    """Ancilla-|1> diagonal entry of the N = 3 sequence on a block with ``lam = Lambda t``.

    Explicit polynomial in ``cos lam`` and ``sin lam``; reduces to ``exp(6ik)`` on a dark
    block and to ``2 cos^6 lam - 1`` at ``k = 0``.
    """
    k = np.asarray(k, dtype=float)
    lam = np.asarray(lam, dtype=float)
    c2, s2 = np.cos(lam) ** 2, np.sin(lam) ** 2
    bracket = 2j * np.sin(4 * k) - 2j * np.sin(2 * k) - 3
    return np.exp(6j * k) * c2**3 + s2 * c2**2 * bracket - 3 * s2**2 * c2 - s2**3


def closed_form_rotation_fidelity(k: float, t: float, g: float = 1.0, n_neighbors: int = 4):
    """Per-block values and average gate fidelity of the N = 3 walk for homogeneous couplings.

    Blocks are indexed by the number of excited neighbours ``D`` with multiplicity
    ``C(Nq, D)``; the target is ``exp(6ik)`` on ``D = 0`` and ``-1`` elsewhere.
    """
    from math import comb

    n = 2**n_neighbors
    degeneracy = np.array([comb(n_neighbors, dd) for dd in range(n_neighbors + 1)])
    lam = g * np.sqrt(np.arange(n_neighbors + 1)) * t
    f = closed_form_block(k, lam)
    target = np.where(np.arange(n_neighbors + 1) == 0, np.exp(6j * k), -1.0)
    overlap = np.sum(degeneracy * f * np.conj(target))
    purity = np.sum(degeneracy * np.abs(f) ** 2)
    fid = float((abs(overlap) ** 2 + purity) / (n * (n + 1)))
    return f, fid
