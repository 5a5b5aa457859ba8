import numpy as np
import pytest

from pcoherent import entanglement, linalg, quantum
from pcoherent.errors import NumericalFailure

SQRT2 = np.sqrt(2.0)


def test_h_spectrum_and_bell_expectation(rho_e, h_matrix):
    np.testing.assert_allclose(linalg.eigvalsh(h_matrix), [-3, -1, -1, 1], atol=1e-8)
    np.testing.assert_allclose(np.trace(h_matrix @ rho_e).real, 1.0, atol=1e-10)


def test_product_max_of_h_is_zero(h_matrix):
    pm = entanglement.product_state_max(quantum.HermitianGamble(h_matrix, (2, 2)), restarts=256, rng_seed=0)
    assert abs(pm.value) <= 1e-6
    np.testing.assert_allclose(pm.upper_bound, 1.0, atol=1e-12)
    # the attaining state really attains the value
    np.testing.assert_allclose(linalg.qform(h_matrix, pm.state), pm.value, atol=1e-12)


def test_product_max_never_below_random_sampling(h_matrix):
    # sampled product states are an independent lower bound on the supremum
    rng = np.random.default_rng(1)
    for seed in range(5):
        G = linalg.random_hermitian(6, seed)
        g = quantum.HermitianGamble(G, (2, 3))
        pm = entanglement.product_state_max(g, restarts=64, rng_seed=seed)
        sampled = max(linalg.qform(G, linalg.ProductState([linalg.random_unit(2, rng), linalg.random_unit(3, rng)])) for _ in range(2000))
        assert pm.value >= sampled - 1e-9
        assert pm.value <= pm.upper_bound + 1e-9


def test_product_max_of_tensor_product_is_product_of_tops():
    A = linalg.random_density(2, 3)
    B = linalg.random_density(3, 4)
    g = quantum.HermitianGamble(np.kron(A, B), (2, 3))
    pm = entanglement.product_state_max(g, restarts=16, rng_seed=0)
    np.testing.assert_allclose(pm.value, np.linalg.eigvalsh(A)[-1] * np.linalg.eigvalsh(B)[-1], atol=1e-10)


def test_single_system_product_max_is_lambda_max():
    G = linalg.random_hermitian(3, 8)
    pm = entanglement.product_state_max(quantum.HermitianGamble(G, 3))
    np.testing.assert_allclose(pm.value, np.linalg.eigvalsh(G)[-1], atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_see_saw_is_monotone(seed):
    rng = np.random.default_rng(seed)
    dims = (2, 2, 2) if seed % 2 else (3, 2)
    G = linalg.random_hermitian(int(np.prod(dims)), rng)
    start = [linalg.random_unit(d, rng) for d in dims]
    value, state, history = entanglement.see_saw(quantum.HermitianGamble(G, dims), start)
    assert np.all(np.diff(history) >= -1e-12)
    np.testing.assert_allclose(linalg.qform(G, state), value, atol=1e-10)


def test_threads_reproduce_serial_result(h_matrix):
    g = quantum.HermitianGamble(linalg.random_hermitian(8, 2), (2, 2, 2))
    serial = entanglement.product_state_max(g, restarts=32, rng_seed=7, threads=1)
    parallel = entanglement.product_state_max(g, restarts=32, rng_seed=7, threads=4)
    assert serial.value == parallel.value
    assert serial.best_restart == parallel.best_restart
    assert serial.state == parallel.state


def test_witness_check_on_bell_state(rho_e, h_matrix):
    r = entanglement.witness_check(h_matrix, rho_e, 0.5, (2, 2), restarts=256, rng_seed=0)
    # hand values: Tr((H - I/2) rho_e) = 1/2 and the product max of H - I/2 is -1/2
    assert r.condition_holds
    np.testing.assert_allclose(r.trace_value, 0.5, atol=1e-6)
    np.testing.assert_allclose(r.product_max, -0.5, atol=1e-6)
    assert r.band_nonempty
    np.testing.assert_allclose(r.epsilon_band, (0.0, 1.0), atol=1e-6)


def test_witness_check_fails_without_shift(rho_e, h_matrix):
    # sup over product states of H is 0, attained, so the strict test needs eps > 0
    r = entanglement.witness_check(h_matrix, rho_e, 0.0, (2, 2), restarts=64)
    assert not r.condition_holds


def test_witness_check_fails_for_identity(rho_e):
    r = entanglement.witness_check(np.eye(4), rho_e, 0.5, (2, 2), restarts=16)
    assert not r.condition_holds
    assert not r.band_nonempty


def test_witness_check_rejects_bad_input(rho_e, h_matrix):
    with pytest.raises(ValueError):
        entanglement.witness_check(h_matrix, rho_e, -0.1, (2, 2))
    with pytest.raises(ValueError):
        entanglement.witness_check(h_matrix, rho_e, 0.5)  # no composite shape


def test_ppt_of_bell_state(rho_e):
    r = entanglement.ppt_check(rho_e, (2, 2))
    assert r.entangled is True and r.exact
    np.testing.assert_allclose(r.min_eigenvalue, -0.5, atol=1e-9)
    W = entanglement.witness_from_ppt(rho_e, (2, 2))
    np.testing.assert_allclose(np.trace(rho_e @ W.G).real, -0.5, atol=1e-8)
    assert linalg.eigvalsh(W.G)[0] < 0
    neg = entanglement.product_state_max(-W, restarts=256, rng_seed=0)
    assert -neg.value >= -1e-6


def _random_entangled(seed):
    rng = np.random.default_rng(seed)
    psi = linalg.random_unit(4, rng)
    p = rng.uniform(0.0, 0.5)
    return (1 - p) * np.outer(psi, psi.conj()) + p * np.eye(4) / 4


@pytest.mark.parametrize("seed", range(12))
def test_witness_sandwich_and_dutch_book(seed):
    rho = _random_entangled(seed)
    ppt = entanglement.ppt_check(rho, (2, 2))
    if not ppt.entangled:
        with pytest.raises(ValueError):
            entanglement.witness_from_ppt(rho, (2, 2))
        return
    W = entanglement.witness_from_ppt(rho, (2, 2), restarts=64, rng_seed=seed)
    assert linalg.eigvalsh(W.G)[0] < 0
    neg = entanglement.product_state_max(-W, restarts=64, rng_seed=seed)
    assert neg.value <= 1e-6
    # -W is strictly desirable under rho; a small shift keeps it desirable and negative on products
    eps = -np.trace(rho @ W.G).real / 2
    r = entanglement.witness_check(-W, rho, eps, restarts=64, rng_seed=seed)
    assert r.condition_holds


@pytest.mark.parametrize(
    "rho",
    [np.eye(4) / 4, np.kron(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), np.kron(linalg.random_density(2, 1), linalg.random_density(2, 2))],
)
def test_separable_states_give_no_witness(rho):
    assert entanglement.ppt_check(rho, (2, 2)).entangled is False
    with pytest.raises(ValueError):
        entanglement.witness_from_ppt(rho, (2, 2))


def test_ppt_inconclusive_beyond_two_by_three():
    rho = np.eye(9) / 9
    r = entanglement.ppt_check(rho, (3, 3))
    assert r.entangled is None and not r.exact
    r23 = entanglement.ppt_check(np.eye(6) / 6, (2, 3))
    assert r23.entangled is False and r23.exact


def test_chsh_operator_and_spectrum():
    S = entanglement.chsh_operator(entanglement.BOX2_ANGLES)
    np.testing.assert_allclose(linalg.eigvalsh(S.G), [-2 * SQRT2, 0, 0, 2 * SQRT2], atol=1e-8)
    # hand oracle in the computational basis: S = sqrt2 (X⊗X + Z⊗Z)
    X, Z = linalg.PAULI_X, linalg.PAULI_Z
    np.testing.assert_allclose(S.G, SQRT2 * (np.kron(X, X) + np.kron(Z, Z)), atol=1e-12)


def test_bell_gap_report(rho_e):
    r = entanglement.bell_gap_report(entanglement.BOX2_ANGLES, rho_e, restarts=256, rng_seed=0)
    np.testing.assert_allclose(r.quantum_value, 2 * SQRT2, atol=1e-9)
    np.testing.assert_allclose(r.lambda_max, 2 * SQRT2, atol=1e-8)
    np.testing.assert_allclose(r.product_max, SQRT2, atol=1e-6)
    assert r.chain_holds
    assert r.product_max <= r.classical_bound < r.lambda_max


def test_spin_observable():
    np.testing.assert_allclose(entanglement.spin_observable(0.0), linalg.PAULI_Z, atol=1e-15)
    np.testing.assert_allclose(entanglement.spin_observable(np.pi / 2), linalg.PAULI_X, atol=1e-15)
    with pytest.raises(ValueError):
        entanglement.ChshConfig(np.nan, 0, 0, 0)
