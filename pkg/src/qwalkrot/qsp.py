"""Quantum signal processing with the signal rotation ``W(x) = exp(-i arccos(x) sigma_x)``.

A phase sequence ``(phi_0, ..., phi_d)`` produces the 2x2 product
``e^{i phi_d Z} W(x) ... e^{i phi_1 Z} W(x) e^{i phi_0 Z}`` whose top-left entry is the
response polynomial. Top-left is the first basis state, i.e. the ancilla ``|1>`` of the
embedding, so with ``x = cos(Lambda t)`` the response is the diagonal of the interleaved
sequence on a singular-value block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import least_squares

from .linalg import Operator, average_gate_fidelity

__all__ = [
    "PhaseSequence",
    "TargetPolynomial",
    "PhaseFindingError",
    "ConditionReport",
    "signal_operator",
    "qsp_unitary",
    "qsp_response",
    "target_poly_ab",
    "target_poly_a",
    "reflection_polynomial",
    "walk_phases",
    "walk_product",
    "verify_walk_polynomial",
    "check_conditions",
    "find_phases",
    "chebyshev_grid",
    "qsp_reflection_fidelity",
    "signal_reflection_fidelity",
    "phases_to_json",
    "phases_from_json",
]


class PhaseFindingError(RuntimeError):
    """The optimiser did not reach the requested residual after all restarts."""

    def __init__(self, residual: float, tol: float, restarts: int):
        super().__init__(f"phase finding did not converge: residual {residual:.3e} > {tol:.1e} after {restarts} starts")
        self.residual = residual
        self.tol = tol
        self.restarts = restarts


@dataclass(frozen=True)
class PhaseSequence:
    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        if len(self.phases) < 1:
            raise ValueError("a phase sequence needs at least phi_0")

    @property
    def degree(self) -> int:
        return len(self.phases) - 1

    def __len__(self):
        return len(self.phases)


@dataclass(frozen=True)
class TargetPolynomial:
    """Polynomial target stored by its power-basis coefficients (lowest order first)."""

    coefficients: tuple[complex, ...]
    label: str = ""

    def __post_init__(self):
        coef = np.trim_zeros(np.asarray(self.coefficients, dtype=complex), "b")
        if len(coef) == 0:
            coef = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coefficients", tuple(coef))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def parity(self) -> int | None:
        """0 for even, 1 for odd, None for mixed."""
        c = np.abs(np.asarray(self.coefficients))
        odd = c[1::2].max(initial=0.0) > 1e-14
        even = c[0::2].max(initial=0.0) > 1e-14
        if odd and even:
            return None
        return 1 if odd else 0

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(np.imag(self.coefficients)) < 1e-14))

    def __call__(self, x):
        x = np.asarray(x)
        out = np.zeros(np.shape(x), dtype=complex)
        for c in reversed(self.coefficients):
            out = out * x + c
        if self.is_real and np.isrealobj(x):
            return out.real
        return out

    @classmethod
    def from_polynomial(cls, p: Polynomial, label: str = "") -> TargetPolynomial:
        return cls(tuple(p.coef), label)


def signal_operator(x: float) -> Operator:
    if not -1.0 - 1e-12 <= x <= 1.0 + 1e-12:
        raise ValueError(f"signal must lie in [-1, 1], got {x}")
    s = np.sqrt(max(0.0, 1.0 - x * x))
    return Operator([[x, -1j * s], [-1j * s, x]], (2,))


def _products(phases, x):
    """Stack of 2x2 products for every signal value in ``x`` (vectorised over x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    # start from e^{i phi_0 Z} |.>, carried as the full 2x2 matrix
    u = np.zeros((len(x), 2, 2), dtype=complex)
    u[:, 0, 0] = np.exp(1j * phases[0])
    u[:, 1, 1] = np.exp(-1j * phases[0])
    for phi in phases[1:]:
        e, ec = np.exp(1j * phi), np.exp(-1j * phi)
        a0, a1 = u[:, 0, :].copy(), u[:, 1, :].copy()
        u[:, 0, :] = e * (x[:, None] * a0 - 1j * s[:, None] * a1)
        u[:, 1, :] = ec * (-1j * s[:, None] * a0 + x[:, None] * a1)
    return u


def qsp_unitary(seq: PhaseSequence, x: float) -> Operator:
    return Operator(_products(seq.phases, [x])[0], (2,))


def qsp_response(seq: PhaseSequence, x):
    """Top-left entry of the phase-sequence product; accepts scalars or arrays."""
    out = _products(seq.phases, x)[:, 0, 0]
    return out[0] if np.ndim(x) == 0 else out


def target_poly_ab(a: float, b: float) -> TargetPolynomial:
    """Degree-10 even target: +1 at ``x = +-1``, -1 at ``0, +-a, +-b``."""
    x2 = Polynomial([0.0, 0.0, 1.0])
    p = 2 * x2 * (x2 - a * a) ** 2 * (x2 - b * b) ** 2 / ((1 - a * a) ** 2 * (1 - b * b) ** 2) - 1
    return TargetPolynomial.from_polynomial(p, f"two-node reflection ({a}, {b})")


def target_poly_a(a: float) -> TargetPolynomial:
    """Degree-6 even target: +1 at ``x = +-1``, -1 at ``0, +-a``."""
    x2 = Polynomial([0.0, 0.0, 1.0])
    p = 2 * x2 * (x2 - a * a) ** 2 / (1 - a * a) ** 2 - 1
    return TargetPolynomial.from_polynomial(p, f"one-node reflection ({a})")


def reflection_polynomial(nodes, merge_tol: float = 1e-6) -> TargetPolynomial:
    """``2 x^2 prod_m (x^2 - c_m^2)^2 / (1 - c_m^2)^2 - 1``: equals -1 at every ``+-c_m`` and at 0.

    Generalises the two targets above to an arbitrary set of signal values that must be
    sent to -1 while ``x = 1`` stays at +1.
    """
    x2 = Polynomial([0.0, 0.0, 1.0])
    p = 2 * x2
    squares = []
    for c in sorted(float(c) ** 2 for c in nodes):
        # nodes closer than merge_tol are treated as one (and as 0 near the origin)
        if c < merge_tol or (squares and c - squares[-1] < merge_tol):
            continue
        if c > 1 - 1e-12:
            raise ValueError("a node at |x| = 1 cannot be sent to -1")
        squares.append(c)
    for c in squares:
        p = p * (x2 - c) ** 2 / (1 - c) ** 2
    return TargetPolynomial.from_polynomial(p - 1, "reflection")


def walk_phases(N: int) -> PhaseSequence:
    """Phases of the k = 0 interleaved walk: ``phi_0 = 0`` and ``phi_j = 2 pi j / N``."""
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    return PhaseSequence((0.0,) + tuple(2 * np.pi * j / N for j in range(1, 2 * N + 1)))


def walk_product(N: int, x: float) -> np.ndarray:
    """``R_N W(x) R_{N-1} W(x) ... R_1 W(x)`` with ``R_j = diag(w^j, w^-j)``, ``w = e^{2 pi i / N}``."""
    w = signal_operator(x).data
    out = np.eye(2, dtype=complex)
    for j in range(1, N + 1):
        r = np.diag([np.exp(2j * np.pi * j / N), np.exp(-2j * np.pi * j / N)])
        out = r @ w @ out
    return out


@dataclass(frozen=True)
class WalkPolynomialReport:
    N: int
    max_top_left_error: float
    max_trace_error: float
    max_square_error: float
    max_imag_top_left: float

    def max_error(self) -> float:
        return max(self.max_top_left_error, self.max_trace_error, self.max_square_error)


def verify_walk_polynomial(N: int, xs) -> WalkPolynomialReport:
    """Check ``<0|W_N|0> = x^N``, ``tr W_N = 2 x^N`` and ``<i|W_N^2|i> = 2 x^(2N) - 1`` on a grid."""
    if N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N}")
    e_top = e_tr = e_sq = e_im = 0.0
    for x in np.asarray(xs, dtype=float):
        w = walk_product(N, x)
        w2 = w @ w
        e_top = max(e_top, abs(w[0, 0] - x**N))
        e_tr = max(e_tr, abs(np.trace(w) - 2 * x**N))
        e_sq = max(e_sq, abs(w2[0, 0] - (2 * x ** (2 * N) - 1)), abs(w2[1, 1] - (2 * x ** (2 * N) - 1)))
        e_im = max(e_im, abs(w[0, 0].imag))
    return WalkPolynomialReport(N, e_top, e_tr, e_sq, e_im)


@dataclass(frozen=True)
class ConditionReport:
    """Numerical check of the three achievability conditions for a real target."""

    bounded_inside: bool
    growing_outside: bool
    imaginary_axis: bool
    parity_ok: bool

    @property
    def ok(self) -> bool:
        return self.bounded_inside and self.growing_outside and self.imaginary_axis and self.parity_ok


def check_conditions(target: TargetPolynomial, degree: int | None = None, grid: int = 2001, tol: float = 1e-9):
    """``|P| <= 1`` on [-1, 1], ``|P| >= 1`` outside, and ``P(ix) P*(ix) >= 1`` on the real line.

    The imaginary-axis condition is only required for even degree; odd polynomials
    vanish at 0 and cannot satisfy it.
    """
    d = target.degree if degree is None else degree
    xs = np.linspace(-1.0, 1.0, grid)
    inside = bool(np.all(np.abs(target(xs)) <= 1 + tol))
    out = np.concatenate([-np.geomspace(1.0, 50.0, grid // 2), np.geomspace(1.0, 50.0, grid // 2)])
    outside = bool(np.all(np.abs(target(out)) >= 1 - tol))
    parity_ok = target.degree <= d and target.parity == d % 2
    if d % 2 == 0:
        ys = np.linspace(-50.0, 50.0, grid)
        conj_poly = TargetPolynomial(tuple(np.conj(target.coefficients)))
        prod = target(1j * ys) * conj_poly(1j * ys)
        imag_ok = bool(np.all(prod.real >= 1 - tol))
    else:
        imag_ok = True
    return ConditionReport(inside, outside, imag_ok, bool(parity_ok))


def chebyshev_grid(n: int = 201) -> np.ndarray:
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


def _starts(d: int, rng: np.random.Generator, restarts: int):
    sym = np.zeros(d)
    sym[0] = sym[-1] = np.pi / 4
    yield sym
    yield np.zeros(d)
    for _ in range(restarts):
        yield rng.uniform(-np.pi, np.pi, d)


def find_phases(
    target: TargetPolynomial | Callable,
    d: int,
    tol: float = 1e-6,
    grid_size: int = 201,
    restarts: int = 20,
    seed: int = 0,
) -> PhaseSequence:
    """Least-squares fit of a degree-``d`` phase sequence to ``target`` on a Chebyshev grid.

    Only ``phi_1 .. phi_d`` are free; ``phi_0`` is fixed by ``response(1) = target(1)``,
    since at ``x = 1`` the product is ``exp(i sum(phi) Z)``. Starts from a symmetric guess,
    then zeros, then seeded random restarts. Raises :class:`PhaseFindingError` when no
    start reaches ``tol`` in sup norm.
    """
    if isinstance(target, TargetPolynomial):
        rep = check_conditions(target, d)
        if not rep.ok:
            raise ValueError(f"target is not achievable at degree {d}: {rep}")
    xs = chebyshev_grid(grid_size)
    want = np.asarray(target(xs), dtype=complex)
    anchor = float(np.angle(complex(target(np.array([1.0]))[0])))

    def full(free):
        return np.concatenate([[anchor - free.sum()], free])

    def resid(free):
        diff = _products(full(free), xs)[:, 0, 0] - want
        return np.concatenate([diff.real, diff.imag])

    rng = np.random.default_rng(seed)
    best, best_err = None, np.inf
    for start in _starts(d, rng, restarts):
        sol = least_squares(resid, start, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
        r = resid(sol.x)
        err = float(np.max(np.hypot(r[:grid_size], r[grid_size:])))
        if err < best_err:
            best, best_err = sol.x, err
        if best_err < tol:
            break
    if best_err >= tol:
        raise PhaseFindingError(best_err, tol, restarts + 2)
    phases = np.mod(full(best) + np.pi, 2 * np.pi) - np.pi
    return PhaseSequence(phases)


def signal_reflection_fidelity(seq: PhaseSequence, signals, multiplicities, reflected) -> float:
    """Average gate fidelity of the diagonal ``M = response(signal)`` against ``+1 / -1``.

    ``reflected`` flags the blocks that should keep ``+1``; all others target ``-1``.
    """
    signals = np.asarray(signals, dtype=float)
    mult = np.asarray(multiplicities, dtype=int)
    resp = qsp_response(seq, signals)
    diag = np.repeat(resp, mult)
    target = np.repeat(np.where(np.asarray(reflected, dtype=bool), 1.0, -1.0), mult)
    return average_gate_fidelity(np.diag(diag), target)


def qsp_reflection_fidelity(seq: PhaseSequence, singular_values, multiplicities, t: float) -> float:
    """Fidelity of reflecting the zero-singular-value subspace with signals ``cos(Lambda t)``."""
    lam = np.asarray(singular_values, dtype=float)
    return signal_reflection_fidelity(seq, np.cos(lam * t), multiplicities, lam == 0.0)


def phases_to_json(seq: PhaseSequence) -> str:
    return json.dumps(list(seq.phases))


def phases_from_json(text: str) -> PhaseSequence:
    data = json.loads(text)
    if not isinstance(data, list) or not all(isinstance(v, (int, float)) for v in data):
        raise ValueError("phase sequence must be a JSON array of numbers")
    return PhaseSequence(data)
