"""Small worked examples for each public operation, with hand-computed values."""

import numpy as np
import pytest

from pcoherent import classical, entanglement, linalg, quantum, quasiprob, sos
from pcoherent.errors import UndefinedConditional
from pcoherent.solvers import LinearProgram, SemidefiniteProgram, solve_lp, solve_sdp

X, Z = linalg.PAULI_X, linalg.PAULI_Z
SQRT2 = np.sqrt(2.0)
E0, E1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / SQRT2


# hermitian core


def test_eigh_examples(h_matrix):
    np.testing.assert_allclose(linalg.eigvalsh(h_matrix), [-3, -1, -1, 1], atol=1e-12)
    np.testing.assert_allclose(linalg.eigvalsh(np.eye(5)), np.ones(5))
    np.testing.assert_allclose(linalg.eigvalsh(np.diag([3.0, -2.0])), [-2, 3])


def test_sign_tests(rho_e, h_matrix):
    assert linalg.is_psd(rho_e) and not linalg.is_psd(h_matrix) and linalg.is_psd(np.zeros((3, 3)))
    assert linalg.is_nd(-np.eye(2)) and not linalg.is_nd(h_matrix) and not linalg.is_nd(np.zeros((2, 2)))


def test_kron_examples():
    np.testing.assert_array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(linalg.kron(Z, Z), np.diag([1, -1, -1, 1]))
    assert linalg.kron(X, X)[0, 3] == 1


def test_partial_trace_examples(rho_e):
    np.testing.assert_allclose(linalg.partial_trace(rho_e, (2, 2), [1]), np.eye(2) / 2)
    np.testing.assert_allclose(linalg.partial_trace(rho_e, (2, 2), [0]), np.eye(2) / 2)
    A, B = linalg.random_hermitian(2, 0), linalg.random_hermitian(3, 1)
    np.testing.assert_allclose(linalg.partial_trace(np.kron(A, B), (2, 3), [0]), np.trace(B) * A, atol=1e-12)
    with pytest.raises(ValueError):
        linalg.partial_trace(rho_e, (2, 3), [0])


def test_qform_examples(h_matrix):
    s = linalg.ProductState([linalg.random_unit(2, 3), linalg.random_unit(2, 4)])
    assert linalg.qform(np.eye(4), s) == pytest.approx(1)
    assert linalg.qform(h_matrix, linalg.ProductState([PLUS, PLUS])) == pytest.approx(0, abs=1e-15)
    assert linalg.qform(np.kron(Z, Z), linalg.ProductState([E0, E1])) == pytest.approx(-1)


def test_random_unit_examples():
    assert np.linalg.norm(linalg.random_unit(4, 5)) == pytest.approx(1, abs=1e-12)
    np.testing.assert_array_equal(linalg.random_unit(4, 5), linalg.random_unit(4, 5))
    rng = np.random.default_rng(0)
    xs = np.array([linalg.random_unit(3, rng) for _ in range(100_000)])
    mean = np.einsum("ki,kj->ij", xs, xs.conj()) / len(xs)
    assert np.abs(mean - np.eye(3) / 3).max() <= 0.02


# convex solvers


def test_lp_examples():
    # max gamma with (0,1) - gamma (1,1) - l1 (-1,1) - l2 (1,-1) >= 0
    c = [1, 0, 0]
    A = [[1, -1, 1], [1, 1, -1]]
    rep = solve_lp(LinearProgram(c=c, A_ub=A, b_ub=[0, 1], lb=[-np.inf, 0, 0], sense="max"))
    assert rep.objective == pytest.approx(0.5)
    rep = solve_lp(LinearProgram(c=[1], A_ub=[[1], [1]], b_ub=[3, 5], lb=[-np.inf], sense="max"))
    assert rep.objective == pytest.approx(3)
    # -1 - l (-1, -1) >= 0 is feasible at l = 1
    rep = solve_lp(LinearProgram(c=[0], A_ub=[[-1], [-1]], b_ub=[-1, -1]))
    assert rep.status == "optimal" and rep.primal[0] >= 1


def test_sdp_examples():
    rep = solve_sdp(SemidefiniteProgram([(2, "psd")], [np.diag([1.0, 2.0])], [[np.eye(2)]], [1.0]))
    assert rep.objective == pytest.approx(1, abs=1e-8)
    np.testing.assert_allclose(rep.primal[0], np.diag([1, 0]), atol=1e-6)
    rep = solve_sdp(SemidefiniteProgram([(4, "psd")], [np.kron(Z, Z)], [[np.eye(4)]], [1.0]))
    assert rep.objective == pytest.approx(-1, abs=1e-8)
    raw = sos.gram_feasibility_sdp(sos.motzkin())
    assert solve_sdp(raw).status == "infeasible"


# classical gambles


COIN = [[-1, 1], [1, -1]]
WIDE = [[-0.1, 1], [1, -0.1]]


def test_classical_examples():
    assert classical.is_coherent(classical.AssessmentSet(COIN))
    assert classical.is_coherent(classical.AssessmentSet([], omega_size=2))
    bad = classical.AssessmentSet([[-1, 1], [1.5, -1], [-2, 0.5]])
    book = classical.dutch_book(bad)
    assert book.coefficients[1] > 0 and book.coefficients[2] > 0
    coin = classical.AssessmentSet(COIN)
    assert classical.natural_extension_contains(coin, [-0.5, 0.5])
    assert classical.natural_extension_contains(coin, [1, 1])
    assert not classical.natural_extension_contains(classical.AssessmentSet([], omega_size=2), [-1, 2])
    wide = classical.AssessmentSet(WIDE)
    assert classical.lower_prevision(wide, [0, 1]) == pytest.approx(1 / 11)
    assert classical.upper_prevision(wide, [0, 1]) == pytest.approx(10 / 11)
    assert classical.upper_prevision(coin, [0, 1]) == pytest.approx(0.5)
    empty = classical.AssessmentSet([], omega_size=4)
    f = np.array([2.0, -1.0, 3.0, 0.5])
    assert classical.lower_prevision(empty, f) == pytest.approx(f.min())
    assert classical.upper_prevision(empty, f) == pytest.approx(f.max())


def test_credal_witness_examples():
    np.testing.assert_allclose(classical.credal_witness(classical.AssessmentSet(COIN)).pmf, [0.5, 0.5])
    p = classical.credal_witness(classical.AssessmentSet([], omega_size=3)).pmf
    assert abs(p.sum() - 1) < 1e-12 and np.all(p >= 0)
    p = classical.credal_witness(classical.AssessmentSet(WIDE)).pmf
    assert 1 / 11 - 1e-12 <= p[0] <= 10 / 11 + 1e-12


# quantum gambles


def test_sigma_class_examples(h_matrix):
    assert quantum.sigma_class(np.eye(2)) == "p_nonnegative"
    assert quantum.sigma_class(quantum.HermitianGamble(h_matrix, (2, 2))) == "indefinite-region"
    assert quantum.sigma_class(-np.eye(2)) == "p_negative"


def test_p_coherence_examples(h_matrix):
    assert quantum.is_p_coherent(quantum.QuantumAssessmentSet([-h_matrix], (2, 2)))
    a = quantum.QuantumAssessmentSet([-2 * np.eye(2)], 2)
    c = quantum.p_incoherence_certificate(a)
    assert c.lam[0] == pytest.approx(0.5, abs=1e-7)
    np.testing.assert_allclose(c.M, 0, atol=1e-7)
    assert quantum.is_p_coherent(quantum.QuantumAssessmentSet([], 2))


def test_quantum_prevision_examples(rho_e, h_matrix):
    vac = quantum.QuantumAssessmentSet([], (2, 2))
    S = entanglement.chsh_operator().G
    assert quantum.lower_prevision_sdp(vac, S) == pytest.approx(-2 * SQRT2, abs=1e-7)
    assert quantum.upper_prevision_sdp(vac, S) == pytest.approx(2 * SQRT2, abs=1e-7)
    assert quantum.upper_prevision_sdp(vac, np.eye(4)) == pytest.approx(1, abs=1e-7)
    F = linalg.random_hermitian(4, 2)
    assert quantum.lower_prevision_sdp(vac, F) == pytest.approx(np.linalg.eigvalsh(F)[0], abs=1e-7)
    pinned = quantum.pin_state_assessments(rho_e, (2, 2))
    assert quantum.lower_prevision_sdp(pinned, h_matrix) == pytest.approx(1, abs=1e-7)
    assert quantum.upper_prevision_sdp(pinned, h_matrix) == pytest.approx(1, abs=1e-7)


def test_dual_state_examples(rho_e):
    np.testing.assert_allclose(quantum.dual_state(quantum.QuantumAssessmentSet([], 3)), np.eye(3) / 3, atol=1e-7)
    np.testing.assert_allclose(quantum.dual_state(quantum.pin_state_assessments(rho_e, (2, 2))), rho_e, atol=1e-7)
    rho = quantum.dual_state(quantum.QuantumAssessmentSet([Z], 2))
    assert np.trace(Z @ rho).real >= -1e-9


def test_born_examples(rho_e):
    P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    np.testing.assert_allclose(quantum.born_probabilities(P0, [P0, P1]), [1, 0])
    basis = [np.diag(np.eye(4)[i]) for i in range(4)]
    np.testing.assert_allclose(quantum.born_probabilities(rho_e, basis), [0.5, 0, 0, 0.5])
    U = linalg.random_unitary(2, 0)
    Q = np.outer(U[:, 0], U[:, 0].conj())
    np.testing.assert_allclose(quantum.born_probabilities(np.eye(2) / 2, [Q, np.eye(2) - Q]), [0.5, 0.5], atol=1e-12)


def test_luder_and_evolution_examples(rho_e):
    post = quantum.luder_condition(rho_e, np.kron(np.diag([1.0, 0.0]), np.eye(2)))
    np.testing.assert_allclose(post, np.diag([1.0, 0, 0, 0]), atol=1e-12)
    rho = linalg.random_density(3, 1)
    np.testing.assert_allclose(quantum.luder_condition(rho, np.eye(3)), rho, atol=1e-12)
    with pytest.raises(UndefinedConditional):
        quantum.luder_condition(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    np.testing.assert_allclose(quantum.unitary_evolve(rho, np.eye(3)), rho, atol=1e-12)
    np.testing.assert_allclose(quantum.unitary_evolve(np.diag([1.0, 0.0]), X), np.diag([0.0, 1.0]), atol=1e-12)


# entanglement


def test_product_max_examples(h_matrix):
    assert abs(entanglement.product_state_max(quantum.HermitianGamble(h_matrix, (2, 2))).value) <= 1e-6
    assert entanglement.product_state_max(quantum.HermitianGamble(np.eye(4), (2, 2)), restarts=8).value == pytest.approx(1)
    S = entanglement.chsh_operator()
    assert entanglement.product_state_max(S).value == pytest.approx(SQRT2, abs=1e-6)


def test_witness_examples(rho_e, h_matrix):
    assert entanglement.witness_check(h_matrix, rho_e, 0.5, (2, 2)).condition_holds
    fails = entanglement.witness_check(np.eye(4), np.eye(4) / 4, 0.0, (2, 2), restarts=8)
    assert not fails.condition_holds and fails.product_max == pytest.approx(1)
    # S - (2 + eps) I with eps = 0.4
    r = entanglement.witness_check(entanglement.chsh_operator(), rho_e, 2.4)
    assert r.condition_holds
    assert r.trace_value == pytest.approx(2 * SQRT2 - 2.4, abs=1e-9)
    assert r.product_max == pytest.approx(SQRT2 - 2.4, abs=1e-6)


def test_ppt_examples(rho_e):
    r = entanglement.ppt_check(rho_e, (2, 2))
    assert r.entangled and r.min_eigenvalue == pytest.approx(-0.5)
    r = entanglement.ppt_check(np.eye(4) / 4, (2, 2))
    assert r.entangled is False and r.min_eigenvalue == pytest.approx(0.25)
    P00 = np.diag([1.0, 0, 0, 0])
    assert entanglement.ppt_check(P00, (2, 2)).entangled is False
    np.testing.assert_array_equal(linalg.partial_transpose(P00, (2, 2)), P00)


def test_witness_from_ppt_examples(rho_e):
    W = entanglement.witness_from_ppt(rho_e, (2, 2))
    assert np.trace(rho_e @ W.G).real == pytest.approx(-0.5)
    with pytest.raises(ValueError):
        entanglement.witness_from_ppt(np.eye(4) / 4, (2, 2))
    rho = 0.95 * rho_e + 0.05 * np.eye(4) / 4
    W = entanglement.witness_from_ppt(rho, (2, 2))
    assert np.trace(rho @ W.G).real < 0


def test_chsh_examples(rho_e):
    S = entanglement.chsh_operator(entanglement.BOX2_ANGLES).G
    np.testing.assert_allclose(S, SQRT2 * (np.kron(X, X) + np.kron(Z, Z)), atol=1e-12)
    S0 = entanglement.chsh_operator(entanglement.ChshConfig(0, 0, 0, 0)).G
    np.testing.assert_allclose(S0, 2 * np.kron(Z, Z), atol=1e-12)
    np.testing.assert_allclose(linalg.eigvalsh(S), [-2 * SQRT2, 0, 0, 2 * SQRT2], atol=1e-12)
    assert np.trace(S @ rho_e).real == pytest.approx(2 * SQRT2)
    assert np.trace(S @ np.eye(4) / 4).real == pytest.approx(0, abs=1e-15)


# signed charges


def test_charge_examples():
    v = linalg.random_unit(2, 0)
    c = quasiprob.SignedCharge([(linalg.ProductState([v]), 1.0)])
    np.testing.assert_allclose(quasiprob.charge_moment_matrix(c), np.outer(v, v.conj()), atol=1e-15)
    np.testing.assert_allclose(quasiprob.marginal_moments(c, 0), np.outer(v, v.conj()), atol=1e-15)
    c = quasiprob.SignedCharge([(linalg.ProductState([E0]), 0.5), (linalg.ProductState([E1]), 0.5)])
    np.testing.assert_allclose(quasiprob.charge_moment_matrix(c), np.eye(2) / 2)


def test_fit_examples(rho_e):
    c = quasiprob.fit_signed_charge(rho_e, (2, 2), 20, 0)
    assert c.min_weight < 0
    mixed = np.eye(4) / 4
    quasiprob.fit_signed_charge(mixed, (2, 2), 20, 0)
    assert quasiprob.nonnegative_charge(mixed, (2, 2), 64, 1) is not None
    atom = linalg.ProductState([E0, E0])
    c = quasiprob.nonnegative_charge(np.diag([1.0, 0, 0, 0]), (2, 2), 1, atoms=[atom])
    np.testing.assert_allclose(c.weights, [1.0])


def test_eigen_charge_examples():
    c = quasiprob.eigen_charge(np.diag([0.3, 0.7]))
    np.testing.assert_allclose(c.weights, [0.3, 0.7])
    np.testing.assert_allclose(np.abs(c.atoms[0][0].factors[0]), [1, 0])
    c = quasiprob.eigen_charge(np.eye(2) / 2)
    np.testing.assert_allclose(c.weights, [0.5, 0.5])
    u, w = c.atoms[0][0].factors[0], c.atoms[1][0].factors[0]
    assert abs(np.vdot(u, w)) < 1e-12
    for seed in range(10):
        rho = linalg.random_density(2, seed)
        np.testing.assert_allclose(quasiprob.charge_moment_matrix(quasiprob.eigen_charge(rho)), rho, atol=1e-9)


# real sums of squares


def test_poly_from_gram_examples():
    G = np.zeros((10, 10), dtype=np.int64)
    G[0, 0] = 1
    assert sos.poly_from_gram(G) == sos.ONE
    full = sos.poly_from_gram(np.eye(10, dtype=np.int64))
    assert full == sos.Poly2({b: 1 for b in [(0, 0), (2, 0), (0, 2), (4, 0), (2, 2), (0, 4), (6, 0), (4, 2), (2, 4), (0, 6)]})
    G = [[0] * 10 for _ in range(10)]
    G[1][2] = G[2][1] = sos.Fraction(1, 2)
    assert sos.poly_from_gram(G) == sos.X1 * sos.X2


def test_sos_examples():
    circle = (sos.X1 * sos.X1 + sos.X2 * sos.X2 - sos.ONE) * (sos.X1 * sos.X1 + sos.X2 * sos.X2 - sos.ONE)
    assert not sos.gram_sos_feasible(sos.motzkin()).sos
    assert sos.gram_sos_feasible(circle).sos
    assert sos.gram_sos_feasible(sos.Poly2({(2, 2): 1})).sos
    assert sos.grid_min(circle) == pytest.approx(0, abs=1e-4)
    assert sos.motzkin().coeff(2, 2) == -1


def test_moment_examples():
    Z = sos.ze_matrix()
    assert sos.lb_evaluate(Z, -sos.motzkin()) == 31
    assert sos.lb_evaluate(Z, sos.ONE) == 1
    assert sos.lb_evaluate(Z, sos.X1 * sos.X1) == 353
    assert linalg.is_psd(Z.Z.astype(float))
    assert Z.z(2, 2) == 66 and Z.z(6, 0) == 706955894
    for var in (1, 2):
        assert linalg.is_psd(sos.marginal_moment_matrix(Z, var).astype(float))
