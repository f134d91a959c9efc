"""Multi-controlled Z from resonant ``|11> <-> |20>`` / ``|02>`` rotations on a chain of qutrits.

Each resonant gate is an ideal two-level Rabi rotation ``cos(g t) - i sin(g t) sigma_x``
on the pair subspace; every other level is untouched. Durations are in units of
``pi / g``: 1/2 hides ``|11>`` in a level-2 state, 1 gives ``|11>`` a sign, and 3/2
brings a hidden state back with the opposite phase of the hide.

Qubits are labelled 1..n. The four-qubit sequence flips ``|0110>``; every extra qubit
adds an outer hide/unhide pair and a NOT conjugation, so ``n`` qubits flip
``|0 1...1 0>`` after ``(2n - 3) pi / g`` of interaction time.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import Operator

__all__ = [
    "ResonantGate",
    "NotGate",
    "CostRow",
    "build_fsbsw_sequence",
    "sequence_duration",
    "flipped_state",
    "simulate_fsbsw",
    "computational_diagonal",
    "cost_comparison",
    "write_cost_csv",
]

_ALLOWED = {Fraction(1, 2), Fraction(1), Fraction(3, 2)}


@dataclass(frozen=True)
class ResonantGate:
    """Rotation between ``|11>`` and ``|20>`` (``"20"``) or ``|02>`` (``"02"``) on qubits ``i < j``."""

    i: int
    j: int
    duration: Fraction
    transition: str = "02"

    def __post_init__(self):
        object.__setattr__(self, "duration", Fraction(self.duration))
        if self.duration not in _ALLOWED:
            raise ValueError(f"duration must be one of 1/2, 1, 3/2 (units of pi/g), got {self.duration}")
        if self.transition not in ("02", "20"):
            raise ValueError("transition must be '02' or '20'")
        if self.i == self.j:
            raise ValueError("gate needs two distinct qubits")


@dataclass(frozen=True)
class NotGate:
    """``|0> <-> |1>`` on one qubit; level 2 is left alone."""

    qubit: int


@dataclass(frozen=True)
class CostRow:
    method: str
    n: int
    two_qubit_time_cz: float | None
    single_qubit_count: int | None
    note: str = ""


def _base4(q):
    a, b, c, d = q
    return [
        ResonantGate(a, b, Fraction(1, 2), "20"),
        ResonantGate(c, d, Fraction(1, 2), "02"),
        ResonantGate(b, c, Fraction(1), "02"),
        ResonantGate(c, d, Fraction(3, 2), "02"),
        ResonantGate(a, b, Fraction(3, 2), "20"),
    ]


def _build(qubits):
    n = len(qubits)
    if n == 3:
        a, b, c = qubits
        return [
            ResonantGate(b, c, Fraction(1, 2), "02"),
            ResonantGate(a, b, Fraction(1), "02"),
            ResonantGate(b, c, Fraction(3, 2), "02"),
        ]
    if n == 4:
        return _base4(qubits)
    first, second = qubits[0], qubits[1]
    return (
        [ResonantGate(first, second, Fraction(1, 2), "20"), NotGate(second)]
        + _build(qubits[1:])
        + [NotGate(second), ResonantGate(first, second, Fraction(3, 2), "20")]
    )


def build_fsbsw_sequence(n: int) -> list:
    """Gate list for ``n >= 3`` qubits, first gate first."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return _build(tuple(range(1, n + 1)))


def sequence_duration(seq) -> Fraction:
    """Total interaction time in units of ``pi / g``."""
    return sum((g.duration for g in seq if isinstance(g, ResonantGate)), Fraction(0))


def flipped_state(n: int) -> str:
    """Bit string that picks up the sign: ``110`` for three qubits, ``0 1^(n-2) 0`` otherwise."""
    if n == 3:
        return "110"
    return "0" + "1" * (n - 2) + "0"


def _digits(n):
    idx = np.arange(3**n)
    return np.stack([(idx // 3 ** (n - 1 - q)) % 3 for q in range(n)], axis=1)


def _apply(state, gate, digits):
    n = digits.shape[1]
    out = state.copy()
    if isinstance(gate, NotGate):
        q = gate.qubit - 1
        col = digits[:, q]
        stride = 3 ** (n - 1 - q)
        zero = np.nonzero(col == 0)[0]
        out[zero] = state[zero + stride]
        out[zero + stride] = state[zero]
        return out
    qi, qj = gate.i - 1, gate.j - 1
    si, sj = 3 ** (n - 1 - qi), 3 ** (n - 1 - qj)
    src = np.nonzero((digits[:, qi] == 1) & (digits[:, qj] == 1))[0]
    dst = src + si - sj if gate.transition == "20" else src - si + sj
    angle = np.pi * float(gate.duration)  # g t with t in units of pi / g
    c, s = np.cos(angle), np.sin(angle)
    out[src] = c * state[src] - 1j * s * state[dst]
    out[dst] = -1j * s * state[src] + c * state[dst]
    return out


def simulate_fsbsw(n: int, not_qubits=()) -> Operator:
    """Unitary of the sequence on ``3^n`` levels, optionally wrapped in NOTs on ``not_qubits``."""
    seq = build_fsbsw_sequence(n)
    wrap = [NotGate(q) for q in not_qubits]
    seq = wrap + seq + wrap
    digits = _digits(n)
    u = np.eye(3**n, dtype=complex)
    for gate in seq:
        u = _apply(u, gate, digits)
    return Operator(u, (3,) * n)


def computational_diagonal(u: Operator, n: int) -> tuple[np.ndarray, float]:
    """Diagonal of the computational block and the largest off-diagonal magnitude in it."""
    digits = _digits(n)
    idx = np.nonzero(np.all(digits < 2, axis=1))[0]
    block = u.data[np.ix_(idx, idx)]
    off = block - np.diag(np.diag(block))
    return np.diag(block), float(np.abs(off).max(initial=0.0))


def cost_comparison(n: int = 4, N: int = 5, t_factor: float = 0.333) -> list[CostRow]:
    """Two-qubit time (in CZ units, one CZ = pi/g) and single-qubit rotation layers."""
    rows = [
        CostRow("quantum walk", n, round(2 * N * t_factor, 2), 2 * N, "ancilla z rotations, one per walk step"),
        CostRow("FSBSW", n, float(2 * n - 3), 1, "one compensating z rotation on each qubit, applied in parallel"),
    ]
    if n == 4:
        rows.append(CostRow("1,2Q", n, 13.0, None, "single-qubit gates not counted"))
    else:
        rows.append(CostRow("1,2Q", n, None, None, "only the four-qubit count is tabulated"))
    return rows


def write_cost_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "n", "two_qubit_time_cz", "single_qubit_count"])
        for r in rows:
            w.writerow([r.method, r.n, "" if r.two_qubit_time_cz is None else r.two_qubit_time_cz,
                        "" if r.single_qubit_count is None else r.single_qubit_count])
