import numpy as np
import pytest

from simchar.snf import (
    IntegerSolver,
    exact_determinant,
    integer_solve,
    kernel_basis,
    smith_normal_form,
    unimodular_inverse,
)


def test_identity():
    res = smith_normal_form(np.eye(3, dtype=int))
    assert res.diag == [1, 1, 1]
    assert res.rank == 3


def test_hand_elimination_example():
    # gcd of entries is 2; second divisor |det|/2 = |16-24|/2 = 4
    A = [[2, 4], [6, 8]]
    res = smith_normal_form(A)
    assert res.diag == [2, 4]
    assert res.verify(A)


def test_zero_matrix():
    res = smith_normal_form(np.zeros((3, 4), dtype=int))
    assert res.rank == 0
    assert all(d == 0 for d in res.diag)


@pytest.mark.parametrize("seed", range(8))
def test_random_matrices_full_contract(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(1, 7, size=2)
    A = rng.integers(-6, 7, size=(m, n))
    res = smith_normal_form(A, want_inverse=True)
    assert res.verify(A)
    assert abs(exact_determinant(res.U)) == 1
    assert abs(exact_determinant(res.V)) == 1
    nz = [d for d in res.diag if d != 0]
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    assert np.all(res.U @ res.Uinv == np.eye(m, dtype=object))
    assert np.all(res.V @ res.Vinv == np.eye(n, dtype=object))


@pytest.mark.parametrize("seed", range(5))
def test_kernel_basis_annihilates(seed):
    rng = np.random.default_rng(100 + seed)
    A = rng.integers(-4, 5, size=(4, 6))
    K = kernel_basis(A)
    if K.size:
        assert np.all(A.astype(object) @ K == 0)
    # saturated: rank of kernel equals nullity over Q
    assert K.shape[1] == 6 - np.linalg.matrix_rank(A)


def test_integer_solve_roundtrip():
    rng = np.random.default_rng(7)
    A = rng.integers(-5, 6, size=(4, 5))
    x_true = rng.integers(-3, 4, size=5)
    b = A @ x_true
    x = integer_solve(A, b)
    assert x is not None
    assert np.all(A.astype(object) @ x == b.astype(object))


def test_integer_solve_detects_unsolvable():
    # 2x = 1 has no integer solution
    assert integer_solve([[2]], [1]) is None


def test_unimodular_inverse():
    U = np.array([[1, 2], [0, 1]])
    Ui = unimodular_inverse(U)
    assert np.all(U.astype(object) @ Ui == np.eye(2, dtype=object))
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])


def test_solver_reuse_many_rhs():
    A = np.array([[1, 2, 0], [0, 2, 2]])
    solver = IntegerSolver(A)
    for rhs, solvable in [((1, 0), True), ((0, 2), True), ((0, 1), False)]:
        x = solver.solve(np.array(rhs))
        assert (x is not None) == solvable
        if x is not None:
            assert np.all(A.astype(object) @ x == np.array(rhs, dtype=object))


def test_triplet_golden_roundtrip(tmp_path):
    from simchar.snf import read_matrix_triplets, write_matrix_triplets

    A = np.array([[0, 2, 0], [-3, 0, 7]])
    p = write_matrix_triplets(A, str(tmp_path / "m.txt"))
    B = read_matrix_triplets(p)
    assert np.array_equal(np.array(B, dtype=int), A)
    # format golden: header then sorted nonzero triplets
    assert open(p).read() == "2 3\n0 1 2\n1 0 -3\n1 2 7\n"
