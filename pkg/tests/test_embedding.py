import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from qwalkrot import embedding as em
from qwalkrot.linalg import SIGMA_X, annihilation, average_gate_fidelity, kron
from conftest import random_hermitian


def _random_matrix(rng, n, dark=1):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a[:, :dark] = 0.0
    return a


def test_zero_matrix_gives_zero_hamiltonian():
    assert em.embed(np.zeros((3, 3))).h.allclose(np.zeros((6, 6)))


def test_hermitian_matrix_gives_sigma_x_product(rng):
    a = random_hermitian(rng, 4)
    assert em.embed(a).h.allclose(kron(SIGMA_X, a))


def test_annihilation_operator_gives_exchange_form():
    a = annihilation(4)
    h = em.embed(a).h.data
    # ancilla |1> is index 0: the coupling lowers the oscillator while raising the ancilla
    assert np.allclose(h[:4, 4:], a)
    assert np.allclose(h[4:, :4], a.conj().T)
    assert np.allclose(h[:4, :4], 0) and np.allclose(h[4:, 4:], 0)


def test_block_evolution_matches_matrix_exponential(rng):
    sys = em.embed(_random_matrix(rng, 5))
    for t in (0.0, 0.31, 1.7):
        assert em.block_evolution(sys, t).allclose(em.evolve_embedded(sys, t), atol=1e-10)


def test_quarter_period_swaps_block_and_dark_state_is_stationary(rng):
    sys = em.embed(_random_matrix(rng, 4))
    lam = sys.blocks.singular_values
    L, R = sys.blocks.left_vectors, sys.blocks.right_vectors
    j = 0  # largest singular value
    u = em.evolve_embedded(sys, np.pi / (2 * lam[j])).data
    start = np.concatenate([L[:, j], np.zeros(4)])
    assert np.allclose(u @ start, np.concatenate([np.zeros(4), -1j * R[:, j]]))
    dark = np.nonzero(sys.zero_mask)[0][0]
    start = np.concatenate([L[:, dark], np.zeros(4)])
    assert np.allclose(em.evolve_embedded(sys, 0.77).data @ start, start)


def test_zero_matrix_sequence_is_pure_phase():
    sys = em.embed(np.zeros((3, 3)))
    k, N = 0.23, 5
    block = em.ancilla_block(em.rotation_sequence(sys, 0.4, k, N), 1)
    assert np.allclose(block, np.exp(2j * N * k) * np.eye(3))


def test_reflection_at_zero_momentum(rng):
    sys = em.embed(_random_matrix(rng, 4))
    ideal = em.ideal_rotation(sys, 0.0, 3).data
    L = sys.blocks.left_vectors[:, sys.zero_mask]
    assert np.allclose(ideal, 2 * L @ L.conj().T - np.eye(4))


@pytest.mark.parametrize("k,phi", [(0.0, np.pi), (np.pi / 10, np.pi / 2), (np.pi / 5, 0.0)])
def test_rotation_angle(k, phi):
    sys = em.embed(np.diag([0.0, 1.0]))
    assert em.rotation_target(sys, k, 5).phi == pytest.approx(phi)


def test_rotation_target_projector_and_phase_agree_with_ideal(rng):
    sys = em.embed(_random_matrix(rng, 4, dark=2))
    k, N = 0.3, 3
    tgt = em.rotation_target(sys, k, N)
    expected = np.exp(-2j * tgt.phi) * tgt.projector - (np.eye(4) - tgt.projector)
    assert np.allclose(em.ideal_rotation(sys, k, N).data, expected)


def test_error_bound_oracles():
    assert em.error_bound(1.0, np.pi / 2, 3) == pytest.approx(0, abs=1e-15)
    assert em.error_bound(1.0, np.pi / 3, 5) == pytest.approx(0.0625)


def test_sequence_converges_to_ideal_rotation(rng):
    a = _random_matrix(rng, 4)
    a /= np.linalg.norm(a, 2)
    sys = em.embed(a)
    lam = sys.blocks.singular_values
    t = np.pi / 2 / lam.max()
    fids = [average_gate_fidelity(em.ancilla_block(em.rotation_sequence(sys, t, 0.2, N), 1),
                                  em.ideal_rotation(sys, 0.2, N)) for N in (3, 9, 41)]
    assert fids[-1] > fids[0]


def _block_deviation(sys, t, k, N):
    block = em.ancilla_block(em.rotation_sequence(sys, t, k, N), 1)
    L = sys.blocks.left_vectors
    dev = []
    for j, zero in enumerate(sys.zero_mask):
        if zero:
            continue
        dev.append(np.linalg.norm(block @ L[:, j] + L[:, j]))
    return np.array(dev)


@hsettings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([3, 5, 7]), st.floats(0.1, 1.5))
def test_nondark_block_deviation_within_bound(seed, N, t):
    rng = np.random.default_rng(seed)
    sys = em.embed(_random_matrix(rng, 3))
    lam = sys.blocks.singular_values[~sys.zero_mask]
    dev = _block_deviation(sys, t, 0.0, N)
    assert np.all(dev <= em.error_bound(lam, t, N) + 1e-9)


@hsettings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(-np.pi, np.pi), st.sampled_from([1, 3, 5]))
def test_dark_subspace_gets_exact_phase(seed, k, N):
    rng = np.random.default_rng(seed)
    sys = em.embed(_random_matrix(rng, 4, dark=2))
    block = em.ancilla_block(em.rotation_sequence(sys, 0.6, k, N), 1)
    L = sys.blocks.left_vectors[:, sys.zero_mask]
    assert np.allclose(block @ L, np.exp(2j * N * k) * L, atol=1e-10)
    # ancilla |0>: right dark vectors pick up the conjugate phase
    block0 = em.ancilla_block(em.rotation_sequence(sys, 0.6, k, N), 0)
    R = sys.blocks.right_vectors[:, sys.zero_mask]
    assert np.allclose(block0 @ R, np.exp(-2j * N * k) * R, atol=1e-10)


@hsettings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.0, 2.0))
def test_sequence_is_unitary(seed, t):
    sys = em.embed(_random_matrix(np.random.default_rng(seed), 3))
    assert em.rotation_sequence(sys, t, 0.4, 3).unitarity_error() < 1e-10


def test_even_N_rejected():
    with pytest.raises(ValueError):
        em.rotation_sequence(em.embed(np.eye(2)), 0.1, 0.0, 2)
