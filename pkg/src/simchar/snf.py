"""Exact integer matrix algebra: Smith normal form and integer linear solves.

All arithmetic uses Python integers (via numpy object arrays), so there is no
overflow; pivoting picks the smallest nonzero magnitude to keep entry growth
bounded at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _as_object_matrix(A) -> np.ndarray:
    M = np.asarray(A)
    out = np.empty(M.shape, dtype=object)
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            out[i, j] = int(M[i, j])
    return out


def _identity_obj(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


@dataclass
class SnfResult:
    """U @ A @ V == diag(diag) exactly, with U, V unimodular."""

    U: np.ndarray
    V: np.ndarray
    diag: list
    rank: int
    Uinv: np.ndarray | None = None
    Vinv: np.ndarray | None = None

    def D(self, shape) -> np.ndarray:
        out = np.zeros(shape, dtype=object)
        for i, d in enumerate(self.diag):
            out[i, i] = d
        return out

    def verify(self, A) -> bool:
        A = _as_object_matrix(A)
        D = self.D(A.shape)
        return bool(np.all(self.U @ A @ self.V == D))


def smith_normal_form(A, want_inverse: bool = False) -> SnfResult:
    """Smith normal form with unimodular transforms.

    Returns SnfResult with U @ A @ V diagonal, nonnegative, and satisfying the
    divisibility chain d1 | d2 | ...; ``want_inverse`` additionally tracks the
    inverses of U and V through the elementary operations.
    """
    M = _as_object_matrix(A)
    m, n = M.shape
    U = _identity_obj(m)
    V = _identity_obj(n)
    Uinv = _identity_obj(m) if want_inverse else None
    Vinv = _identity_obj(n) if want_inverse else None

    def row_add(i, j, q):  # row_i += q * row_j
        M[i, :] += q * M[j, :]
        U[i, :] += q * U[j, :]
        if Uinv is not None:
            Uinv[:, j] -= q * Uinv[:, i]

    def col_add(i, j, q):  # col_i += q * col_j
        M[:, i] += q * M[:, j]
        V[:, i] += q * V[:, j]
        if Vinv is not None:
            Vinv[j, :] -= q * Vinv[i, :]

    def row_swap(i, j):
        if i == j:
            return
        M[[i, j], :] = M[[j, i], :]
        U[[i, j], :] = U[[j, i], :]
        if Uinv is not None:
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def col_swap(i, j):
        if i == j:
            return
        M[:, [i, j]] = M[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]
        if Vinv is not None:
            Vinv[[i, j], :] = Vinv[[j, i], :]

    def row_neg(i):
        M[i, :] = -M[i, :]
        U[i, :] = -U[i, :]
        if Uinv is not None:
            Uinv[:, i] = -Uinv[:, i]

    t = 0
    while t < min(m, n):
        sub = M[t:, t:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        # smallest nonzero magnitude pivot
        vals = np.abs(sub[nz])
        best = int(np.argmin(vals))
        pi, pj = int(nz[0][best]) + t, int(nz[1][best]) + t
        row_swap(t, pi)
        col_swap(t, pj)
        if M[t, t] < 0:
            row_neg(t)
        dirty = False
        for r in range(t + 1, m):
            if M[r, t] != 0:
                q = M[r, t] // M[t, t]
                if q:
                    row_add(r, t, -q)
                if M[r, t] != 0:
                    dirty = True
        for c in range(t + 1, n):
            if M[t, c] != 0:
                q = M[t, c] // M[t, t]
                if q:
                    col_add(c, t, -q)
                if M[t, c] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility fix-up: fold in a non-divisible entry and re-pivot
        piv = M[t, t]
        rest = M[t + 1:, t + 1:]
        if rest.size:
            bad = np.nonzero(np.vectorize(lambda x: x % piv != 0)(rest)) \
                if piv != 1 else (np.array([], int), np.array([], int))
            if len(bad[0]):
                row_add(t, int(bad[0][0]) + t + 1, 1)
                continue
        t += 1

    diag = [int(M[i, i]) for i in range(min(m, n))]
    rank = sum(1 for d in diag if d != 0)
    return SnfResult(U=U, V=V, diag=diag, rank=rank, Uinv=Uinv, Vinv=Vinv)


def kernel_basis(A) -> np.ndarray:
    """Integer basis (columns) of the kernel lattice of A; saturated in Z^n."""
    A = _as_object_matrix(A)
    if A.shape[1] == 0:
        return np.zeros((0, 0), dtype=object)
    if A.shape[0] == 0:
        return _identity_obj(A.shape[1])
    res = smith_normal_form(A)
    return res.V[:, res.rank:]


class IntegerSolver:
    """Solve A x = b over the integers for many right-hand sides."""

    def __init__(self, A):
        self.A = _as_object_matrix(A)
        self.res = smith_normal_form(self.A)

    def solve(self, b):
        """An integer solution of A x = b, or None if none exists."""
        m, n = self.A.shape
        b = np.array([int(v) for v in np.asarray(b).ravel()], dtype=object)
        if b.shape[0] != m:
            raise ValueError("rhs length mismatch")
        c = self.res.U @ b
        y = np.zeros(n, dtype=object)
        for i in range(min(m, n)):
            d = self.res.diag[i]
            if d == 0:
                if c[i] != 0:
                    return None
            else:
                q, r = divmod(int(c[i]), d)
                if r != 0:
                    return None
                y[i] = q
        for i in range(min(m, n), m):
            if c[i] != 0:
                return None
        return self.res.V @ y


def integer_solve(A, b):
    return IntegerSolver(A).solve(b)


def exact_determinant(A) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    M = _as_object_matrix(A).copy()
    n = M.shape[0]
    if n != M.shape[1]:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k, k] == 0:
            piv = next((r for r in range(k + 1, n) if M[r, k] != 0), None)
            if piv is None:
                return 0
            M[[k, piv], :] = M[[piv, k], :]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i, j] = (M[i, j] * M[k, k] - M[i, k] * M[k, j]) // prev
        prev = M[k, k]
    return sign * int(M[n - 1, n - 1])


def write_matrix_triplets(A, path: str) -> str:
    """Serialize an integer matrix as 'rows cols' then 'i j value' per
    nonzero entry; the golden-file format of the exact-algebra tests."""
    A = _as_object_matrix(A)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            if A[i, j] != 0:
                lines.append(f"{i} {j} {A[i, j]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_matrix_triplets(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    rows, cols = int(lines[0][0]), int(lines[0][1])
    A = np.zeros((rows, cols), dtype=object)
    for i, j, v in lines[1:]:
        A[int(i), int(j)] = int(v)
    return A


def unimodular_inverse(U) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix (integer entries)."""
    U = _as_object_matrix(U)
    n = U.shape[0]
    M = [[Fraction(int(U[i, j])) for j in range(n)] for i in range(n)]
    inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        f = M[col][col]
        M[col] = [v / f for v in M[col]]
        inv[col] = [v / f for v in inv[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                g = M[r][col]
                M[r] = [a - g * b for a, b in zip(M[r], M[col])]
                inv[r] = [a - g * b for a, b in zip(inv[r], inv[col])]
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            v = inv[i][j]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out[i, j] = int(v)
    return out
