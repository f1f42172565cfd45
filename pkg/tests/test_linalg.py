import numpy as np
import pytest

from qinst import linalg as la
from qinst.errors import NegativeEigenvalueError, NotHermitianError

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def rand_matrix(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def test_kron_identity():
    assert np.allclose(la.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_entangled_vector_invariant():
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert np.allclose(la.kron(X, X) @ phi, phi)


def test_kron_shapes():
    a = np.ones((2, 3))
    b = np.ones((3, 2))
    assert la.kron(a, b).shape == (6, 6)


def test_vectorize_identity_and_pauli():
    assert np.allclose(la.vectorize(np.eye(2)), [1, 0, 0, 1])
    assert np.allclose(la.vectorize(X), [0, 1, 1, 0])


def test_vectorize_inner_product_is_trace():
    rng = np.random.default_rng(0)
    f = rand_matrix(rng, 3, 3)
    g = rand_matrix(rng, 3, 3)
    lhs = np.vdot(la.vectorize(f), la.vectorize(g))
    assert abs(lhs - np.trace(f.conj().T @ g)) < 1e-12


def test_devectorize_round_trip():
    rng = np.random.default_rng(1)
    f = rand_matrix(rng, 4, 3)
    assert np.allclose(la.devectorize(la.vectorize(f), 4, 3), f)
    assert np.allclose(la.devectorize([1, 0, 0, 1], 2, 2), np.eye(2))
    with pytest.raises(ValueError):
        la.devectorize([1, 0, 0], 2, 2)


def test_kron_acts_as_left_right_multiplication():
    rng = np.random.default_rng(2)
    b, a, f = (rand_matrix(rng, 2, 2) for _ in range(3))
    lhs = la.kron(b, a) @ la.vectorize(f)
    assert np.allclose(lhs, la.vectorize(b @ f @ a.T), atol=1e-12)


def test_partial_trace_product_states():
    assert np.allclose(
        la.partial_trace(la.kron(np.eye(2), np.eye(3)), [2, 3], keep=[0]), 3 * np.eye(2)
    )
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    marg = la.partial_trace(np.outer(phi, phi.conj()), [2, 2], keep=[0])
    assert np.allclose(marg, np.eye(2) / 2)


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(3)
    x = rand_matrix(rng, 12, 12)
    for keep in ([0], [1], [0, 1], [1, 2]):
        red = la.partial_trace(x, [2, 3, 2], keep=keep)
        assert abs(np.trace(red) - np.trace(x)) < 1e-12


def test_partial_trace_choi_application_matches_kraus():
    # dephasing channel: Tr_in[(1 x rho^T) R] == sum K rho K^dag
    kraus = [np.eye(2) / np.sqrt(2), Z / np.sqrt(2)]
    r = sum(np.outer(la.vectorize(k), la.vectorize(k).conj()) for k in kraus)
    rng = np.random.default_rng(4)
    rho = rand_matrix(rng, 2, 2)
    lhs = la.partial_trace(la.kron(np.eye(2), rho.T) @ r, [2, 2], keep=[0])
    rhs = sum(k @ rho @ k.conj().T for k in kraus)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_transpose_conjugate_adjoint():
    assert np.allclose(la.transpose_op(X), X)
    assert np.allclose(la.conjugate_op(Y), -Y)
    assert la.adjoint_op(np.ones((2, 3))).shape == (3, 2)
    rng = np.random.default_rng(5)
    f = rand_matrix(rng, 3, 3)
    one = la.vectorize(np.eye(3))
    assert np.allclose(la.kron(np.eye(3), f.T) @ one, la.vectorize(f), atol=1e-12)


def test_herm_sqrt_basic():
    assert np.allclose(la.herm_sqrt(np.eye(4)), np.eye(4))
    assert np.allclose(la.herm_sqrt(np.diag([4.0, 1.0, 0.0])), np.diag([2.0, 1.0, 0.0]))


def test_herm_sqrt_squares_back():
    kraus = [np.eye(2) / np.sqrt(2), Z / np.sqrt(2)]
    r = sum(np.outer(la.vectorize(k), la.vectorize(k).conj()) for k in kraus)
    s = la.herm_sqrt(r)
    assert np.linalg.norm(s @ s - r) <= 1e-9 * np.linalg.norm(r)


def test_herm_sqrt_rejects_bad_input():
    with pytest.raises(NotHermitianError):
        la.herm_sqrt(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NegativeEigenvalueError):
        la.herm_sqrt(np.diag([1.0, -0.5]))


def test_herm_pinv_sqrt():
    assert np.allclose(la.herm_pinv_sqrt(np.diag([4.0, 0.0])), np.diag([0.5, 0.0]))
    assert np.allclose(la.herm_pinv_sqrt(np.eye(3)), np.eye(3))
    rng = np.random.default_rng(6)
    g = rand_matrix(rng, 4, 2)
    h = g @ g.conj().T  # rank 2 PSD
    pis = la.herm_pinv_sqrt(h)
    assert np.allclose(pis @ h @ pis, la.support_projector(h), atol=1e-9)


def test_support_basis():
    v = np.array([1, 0, 0, 1], dtype=complex)
    b = la.support_basis(np.outer(v, v.conj()))
    assert b.shape == (4, 1)
    assert abs(abs(np.vdot(b[:, 0], v / np.sqrt(2))) - 1) < 1e-12
    kraus = [np.eye(2) / np.sqrt(2), Z / np.sqrt(2)]
    r = sum(np.outer(la.vectorize(k), la.vectorize(k).conj()) for k in kraus)
    assert la.numerical_rank(r) == 2
    assert la.support_basis(np.zeros((3, 3))).shape == (3, 0)


def test_swap_operator():
    assert np.allclose(la.swap_operator(1), [[1.0]])
    e = la.swap_operator(2)
    perm = np.zeros((4, 4))
    perm[0, 0] = perm[3, 3] = perm[1, 2] = perm[2, 1] = 1
    assert np.allclose(e, perm)
    rng = np.random.default_rng(7)
    a, b = rand_matrix(rng, 3, 3), rand_matrix(rng, 3, 3)
    e3 = la.swap_operator(3)
    assert np.allclose(e3 @ la.kron(a, b) @ e3, la.kron(b, a), atol=1e-12)
    assert np.allclose(e3 @ e3, np.eye(9))
    assert np.allclose(e3, e3.conj().T)


def test_eigh_desc_reconstruction():
    rng = np.random.default_rng(8)
    h = rand_matrix(rng, 5, 5)
    h = h + h.conj().T
    w, u = la.eigh_desc(h)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.linalg.norm(h - (u * w) @ u.conj().T) <= 1e-10 * max(1, np.linalg.norm(h))
    assert np.linalg.norm(u.conj().T @ u - np.eye(5)) <= 1e-10
