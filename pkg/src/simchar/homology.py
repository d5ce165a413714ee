"""Integral and field homology of simplicial complexes, with torsion and bases.

Homology and cohomology of the dual integer cochain complex share one routine
on a pair of consecutive differentials; torsion comes from the Smith normal
form of the inclusion of boundaries into cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import SimplicialComplex
from .errors import DegreeOutOfRange, IndexOutOfRange
from .snf import (
    IntegerSolver,
    kernel_basis,
    smith_normal_form,
    _as_object_matrix,
)


@dataclass
class HomologySummary:
    """Betti number, invariant factors and integer bases in one degree."""

    degree: int
    betti: int
    torsion: list = field(default_factory=list)
    cycle_basis: np.ndarray | None = None
    boundary_basis: np.ndarray | None = None
    free_basis: np.ndarray | None = None
    torsion_basis: list | None = None  # list of (cycle vector, order)

    @property
    def torsion_order(self) -> int:
        out = 1
        for q in self.torsion:
            out *= int(q)
        return out


def _pair_homology(degree: int, d_out, d_in, coefficients: str) -> HomologySummary:
    """Homology of ... -> C --d_out--> lower with incoming d_in: higher -> C."""
    d_out = np.asarray(d_out)
    d_in = np.asarray(d_in)
    n = d_out.shape[1]
    if coefficients == "field":
        r_out = _float_rank(d_out)
        r_in = _float_rank(d_in)
        return HomologySummary(degree=degree, betti=n - r_out - r_in)

    Z = kernel_basis(d_out)  # n x z
    z = Z.shape[1]
    if d_in.shape[1] == 0:
        W = np.zeros((z, 0), dtype=object)
    else:
        solver = IntegerSolver(Z)
        cols = []
        for j in range(d_in.shape[1]):
            x = solver.solve(d_in[:, j])
            if x is None:
                raise RuntimeError("boundary not inside cycle lattice")
            cols.append(x)
        W = np.column_stack(cols) if cols else np.zeros((z, 0), dtype=object)

    res = smith_normal_form(W, want_inverse=True)
    r = res.rank
    basis = Z @ res.Uinv  # columns: adapted cycle basis
    torsion = [int(d) for d in res.diag[:r] if d > 1]
    torsion_basis = [
        (np.array([int(v) for v in basis[:, i]], dtype=object), int(res.diag[i]))
        for i in range(r)
        if res.diag[i] > 1
    ]
    free = basis[:, r:]
    bnd = basis[:, :r] * np.array(res.diag[:r], dtype=object)[None, :] \
        if r else np.zeros((n, 0), dtype=object)
    return HomologySummary(
        degree=degree,
        betti=z - r,
        torsion=torsion,
        cycle_basis=Z,
        boundary_basis=bnd,
        free_basis=free,
        torsion_basis=torsion_basis,
    )


def _float_rank(A) -> int:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    return int(np.linalg.matrix_rank(A))


def _chain_pair(X: SimplicialComplex, k: int):
    if not 0 <= k <= X.dim:
        raise DegreeOutOfRange(f"degree {k} not in 0..{X.dim}")
    n_k = X.n_simplices(k)
    d_out = X.boundary_matrix(k) if k >= 1 else np.zeros((0, n_k), dtype=np.int64)
    d_in = (
        X.boundary_matrix(k + 1)
        if k < X.dim
        else np.zeros((n_k, 0), dtype=np.int64)
    )
    return d_out, d_in


def _cochain_pair(X: SimplicialComplex, k: int):
    if not 0 <= k <= X.dim:
        raise DegreeOutOfRange(f"degree {k} not in 0..{X.dim}")
    n_k = X.n_simplices(k)
    d_out = (
        X.boundary_matrix(k + 1).T
        if k < X.dim
        else np.zeros((0, n_k), dtype=np.int64)
    )
    d_in = X.boundary_matrix(k).T if k >= 1 else np.zeros((n_k, 0), dtype=np.int64)
    return d_out, d_in


def homology(X: SimplicialComplex, k: int, coefficients: str = "Z") -> HomologySummary:
    """H_k of the integral chain complex (or its field Betti number)."""
    key = ("homology", k, coefficients)
    if key not in X.cache:
        d_out, d_in = _chain_pair(X, k)
        X.cache[key] = _pair_homology(k, d_out, d_in, coefficients)
    return X.cache[key]


def cohomology(X: SimplicialComplex, k: int, coefficients: str = "Z") -> HomologySummary:
    """H^k of the dual integer cochain complex Hom(I_., Z)."""
    key = ("cohomology", k, coefficients)
    if key not in X.cache:
        d_out, d_in = _cochain_pair(X, k)
        X.cache[key] = _pair_homology(k, d_out, d_in, coefficients)
    return X.cache[key]


def betti_numbers(X: SimplicialComplex, coefficients: str = "field") -> tuple:
    return tuple(homology(X, k, coefficients).betti for k in range(X.dim + 1))


def cocycle_lift(X: SimplicialComplex, k: int, class_index: int) -> np.ndarray:
    """Integer k-cocycle realising the dual basis (mod torsion) of the chosen
    free cycle basis: it pairs to delta_{ij} with free_basis column i."""
    hs = homology(X, k, "Z")
    if class_index >= hs.betti or class_index < 0:
        raise IndexOutOfRange(
            f"class {class_index} outside 0..{hs.betti - 1} in degree {k}"
        )
    key = ("cocycle_solver", k)
    if key not in X.cache:
        n_k = X.n_simplices(k)
        d_up = (
            X.boundary_matrix(k + 1).T
            if k < X.dim
            else np.zeros((0, n_k), dtype=np.int64)
        )
        A = np.vstack([_as_object_matrix(d_up), hs.free_basis.T])
        X.cache[key] = (IntegerSolver(A), d_up.shape[0])
    solver, n_up = X.cache[key]
    rhs = np.zeros(n_up + hs.betti, dtype=object)
    rhs[n_up + class_index] = 1
    x = solver.solve(rhs)
    if x is None:
        raise RuntimeError("dual cocycle system unsolvable; UCT violated upstream")
    return np.array([int(v) for v in x], dtype=np.int64)
