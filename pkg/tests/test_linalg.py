import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcoherent import linalg


@pytest.mark.parametrize("dim", [1, 2, 3, 4, 6, 8, 12, 16])
def test_eigh_reconstruction(dim):
    for seed in range(5):
        A = linalg.random_hermitian(dim, seed)
        w, V = linalg.eigh(A)
        err = np.abs(A - V @ np.diag(w) @ V.conj().T).max()
        assert err <= 1e-8 * max(1.0, np.abs(A).max())
        np.testing.assert_allclose(V.conj().T @ V, np.eye(dim), atol=1e-10)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-9)
        assert np.all(np.diff(w) >= 0)


def test_eigh_degenerate_and_diagonal():
    w, V = linalg.eigh(np.diag([3.0, 1.0, 1.0, -2.0]))
    np.testing.assert_allclose(w, [-2, 1, 1, 3])
    np.testing.assert_allclose(np.abs(V.conj().T @ V), np.eye(4), atol=1e-12)


def test_hermitian_validation():
    with pytest.raises(ValueError):
        linalg.hermitian([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        linalg.hermitian(np.ones((2, 3)))
    with pytest.raises(ValueError):
        linalg.hermitian([[np.nan, 0], [0, 1]])
    M = linalg.hermitian([[1, 1j], [-1j, 2]])
    assert not M.flags.writeable


def test_unit_vector():
    with pytest.raises(ValueError):
        linalg.unit_vector([1.0, 1.0])
    np.testing.assert_allclose(linalg.unit_vector([3.0, 4.0], normalize=True), [0.6, 0.8])
    with pytest.raises(ValueError):
        linalg.unit_vector([0.0, 0.0], normalize=True)


@pytest.mark.parametrize("seed", range(20))
def test_psd_and_nd_are_exclusive(seed):
    rng = np.random.default_rng(seed)
    A = linalg.random_hermitian(4, rng)
    choice = seed % 4
    if choice == 1:
        A = A @ A
    elif choice == 2:
        A = -(A @ A) - 0.1 * np.eye(4)
    elif choice == 3:
        A = np.zeros((4, 4))
    assert not (linalg.is_psd(A) and linalg.is_nd(A))


def test_psd_boundary():
    P = np.diag([1.0, 0.0])
    assert linalg.is_psd(P)
    assert not linalg.is_nd(-P)  # lambda_max = 0 is not strictly negative
    assert linalg.is_nd(-np.eye(2))


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_kron_trace(seed):
    rng = np.random.default_rng(seed)
    A = linalg.random_hermitian(2, rng)
    B = linalg.random_hermitian(3, rng)
    np.testing.assert_allclose(np.trace(linalg.kron(A, B)), np.trace(A) * np.trace(B), atol=1e-10)


def _partial_trace_oracle(a, dims, keep):
    # independent einsum contraction
    m = len(dims)
    t = a.reshape(list(dims) * 2)
    letters = "abcdefghij"
    row = list(letters[:m])
    col = list(letters[m : 2 * m])
    for j in range(m):
        if j not in keep:
            col[j] = row[j]
    out = "".join(row[j] for j in keep) + "".join(col[j] for j in keep)
    r = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[j] for j in keep]))
    return r.reshape(d, d)


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 1], [0, 2], [1, 2]])
def test_partial_trace_against_einsum(keep):
    dims = (2, 3, 2)
    rho = linalg.random_density(12, 7)
    np.testing.assert_allclose(linalg.partial_trace(rho, dims, keep), _partial_trace_oracle(rho, dims, keep), atol=1e-12)


def test_partial_trace_composes():
    dims = (2, 3, 2)
    rho = linalg.random_density(12, 3)
    step = linalg.partial_trace(linalg.partial_trace(rho, dims, [0, 2]), (2, 2), [0])
    at_once = linalg.partial_trace(rho, dims, [0])
    np.testing.assert_allclose(step, at_once, atol=1e-12)


def test_partial_trace_product():
    A, B = linalg.random_density(2, 1), linalg.random_density(3, 2)
    np.testing.assert_allclose(linalg.partial_trace(np.kron(A, B), (2, 3), [1]), B, atol=1e-12)
    np.testing.assert_allclose(linalg.partial_trace(np.kron(A, B), (2, 3), [0]), A, atol=1e-12)


def test_partial_transpose_of_bell_state(rho_e):
    pt = linalg.partial_transpose(rho_e, (2, 2), 1)
    # the swap operator over two: eigenvalues 1/2 (x3) and -1/2
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(pt, swap / 2, atol=1e-15)
    np.testing.assert_allclose(linalg.eigvalsh(pt), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_is_transpose_on_product():
    A = linalg.random_hermitian(2, 4)
    B = linalg.random_hermitian(3, 5)
    np.testing.assert_allclose(linalg.partial_transpose(np.kron(A, B), (2, 3), 1), np.kron(A, B.T), atol=1e-12)
    np.testing.assert_allclose(linalg.partial_transpose(np.kron(A, B), (2, 3), 0), np.kron(A.T, B), atol=1e-12)


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_qform_equals_trace_with_projector(seed):
    rng = np.random.default_rng(seed)
    G = linalg.random_hermitian(6, rng)
    s = linalg.ProductState([linalg.random_unit(2, rng), linalg.random_unit(3, rng)])
    np.testing.assert_allclose(linalg.qform(G, s), np.trace(G @ s.projector()).real, atol=1e-10)


def test_product_state_validation_and_equality():
    x = np.array([1.0, 0.0])
    s = linalg.ProductState([x, x])
    assert s == linalg.ProductState([x.copy(), x.copy()])
    assert s != linalg.ProductState([x, np.array([0.0, 1.0])])
    assert s.dims == (2, 2)
    with pytest.raises(ValueError):
        linalg.ProductState([[1.0, 1.0]])


def test_random_generators_are_seeded():
    np.testing.assert_array_equal(linalg.random_hermitian(4, 11), linalg.random_hermitian(4, 11))
    U = linalg.random_unitary(5, 2)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(5), atol=1e-12)
    rho = linalg.random_density(4, 9, rank=2)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.sum(np.linalg.eigvalsh(rho) > 1e-10) == 2


def test_spectral_norm():
    A = linalg.random_hermitian(5, 0)
    np.testing.assert_allclose(linalg.spectral_norm(A), np.linalg.norm(A, 2), rtol=1e-10)
