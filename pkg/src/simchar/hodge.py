"""Combinatorial Hodge theory on the embedded cochain complex of a pair.

The embedded subcomplex in base coordinates carries the Whitney mass matrices
as its Gram matrices, so adjoints are metric (gram^-1 d^T gram), Laplacians
are gram-self-adjoint, and spectra come from symmetric-definite generalized
eigenproblems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg as sla

from .errors import EmptySubspace, SingularGram
from .homology import homology
from .whitney import ComplexPair

DEFAULT_KERNEL_THRESHOLD = 1e-12


def safe_exp(x: float) -> float:
    """exp without overflow warnings: saturates to inf / underflows to 0."""
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def _nsimp(X, k: int) -> int:
    return X.n_simplices(k) if 0 <= k <= X.dim else 0


def _gram(pair: ComplexPair, k: int) -> np.ndarray:
    if 0 <= k <= pair.base.dim:
        return pair.gram(k)
    return np.zeros((0, 0))


def _dmat(pair: ComplexPair, k: int) -> np.ndarray:
    """Coboundary C^k -> C^{k+1} on the base, as float, degree-safe."""
    n_k = _nsimp(pair.base, k)
    n_k1 = _nsimp(pair.base, k + 1)
    if n_k == 0 or k < 0:
        return np.zeros((n_k1, n_k))
    if k >= pair.base.dim:
        return np.zeros((0, n_k))
    return pair.d_base(k).astype(float)


@dataclass
class HodgeFrame:
    """All metric-linear-algebra data of one degree of the embedded complex."""

    pair: ComplexPair
    degree: int
    gram: np.ndarray
    d: np.ndarray            # C^p -> C^{p+1}
    d_down: np.ndarray       # C^{p-1} -> C^p
    delta: np.ndarray        # adjoint C^p -> C^{p-1}
    delta_up: np.ndarray     # adjoint C^{p+1} -> C^p
    laplacian: np.ndarray
    eigenvalues: np.ndarray  # clipped: entries below threshold are exact zeros
    eigenvectors: np.ndarray  # gram-orthonormal columns
    harmonic_basis: np.ndarray
    proj_harmonic: np.ndarray
    proj_im_d: np.ndarray
    proj_im_delta: np.ndarray
    betti: int
    kernel_threshold: float
    diagnostics: dict = field(default_factory=dict)
    harmonic_integral_basis: np.ndarray | None = None
    h_matrix: np.ndarray | None = None

    @property
    def dim_im_delta_up(self) -> int:
        return int(np.round(np.trace(self.proj_im_delta)))

    def inner(self, a, b) -> float:
        return float(np.asarray(a, float) @ self.gram @ np.asarray(b, float))

    def norm(self, a) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))


def _projector_onto_columns(B: np.ndarray, G: np.ndarray) -> np.ndarray:
    """G-orthogonal projector onto the column space of B."""
    n = G.shape[0]
    if B.size == 0:
        return np.zeros((n, n))
    M = B.T @ G @ B
    return B @ np.linalg.pinv(M, hermitian=True) @ B.T @ G


def build_frame(
    pair: ComplexPair,
    p: int,
    kernel_threshold: float = DEFAULT_KERNEL_THRESHOLD,
) -> HodgeFrame:
    """Assemble Gram, adjoints, Laplacian, spectrum and projectors in degree p.

    Eigenvalues below kernel_threshold * max eigenvalue are clipped to zero
    and their eigenvectors form the harmonic space; its dimension is checked
    against the field Betti number.
    """
    n_p = _nsimp(pair.base, p)
    G = _gram(pair, p)
    if n_p:
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError as err:
            raise SingularGram(f"gram matrix in degree {p} not SPD") from err
    d = _dmat(pair, p)
    d_down = _dmat(pair, p - 1)
    G_up = _gram(pair, p + 1)
    G_down = _gram(pair, p - 1)

    if n_p == 0:
        empty = np.zeros((0, 0))
        return HodgeFrame(
            pair=pair, degree=p, gram=empty, d=d, d_down=d_down,
            delta=np.zeros((_nsimp(pair.base, p - 1), 0)),
            delta_up=np.zeros((0, _nsimp(pair.base, p + 1))),
            laplacian=empty, eigenvalues=np.zeros(0),
            eigenvectors=empty, harmonic_basis=empty,
            proj_harmonic=empty, proj_im_d=empty, proj_im_delta=empty,
            betti=0, kernel_threshold=kernel_threshold,
        )

    S_up = d.T @ G_up @ d if d.shape[0] else np.zeros((n_p, n_p))
    if d_down.shape[1]:
        X = np.linalg.solve(G_down, d_down.T @ G)  # delta_p
        A_down = (d_down.T @ G).T @ X
        delta = X
    else:
        A_down = np.zeros((n_p, n_p))
        delta = np.zeros((_nsimp(pair.base, p - 1), n_p))
    A = 0.5 * (S_up + A_down + (S_up + A_down).T)
    w, vec = sla.eigh(A, G)
    w = np.clip(w, 0.0, None)
    lam_max = w.max() if w.size else 0.0
    zero = w <= kernel_threshold * max(lam_max, 1.0)
    w = np.where(zero, 0.0, w)

    delta_up = (
        np.linalg.solve(G, d.T @ G_up)
        if d.shape[0]
        else np.zeros((n_p, _nsimp(pair.base, p + 1)))
    )
    laplacian = np.linalg.solve(G, A)
    harmonic = vec[:, zero]
    P_h = harmonic @ harmonic.T @ G
    P_d = _projector_onto_columns(d_down, G) if d_down.shape[1] else np.zeros((n_p, n_p))
    P_del = (
        _projector_onto_columns(delta_up, G)
        if delta_up.shape[1]
        else np.zeros((n_p, n_p))
    )
    betti = homology(pair.base, p, "field").betti if p <= pair.base.dim else 0

    frame = HodgeFrame(
        pair=pair, degree=p, gram=G, d=d, d_down=d_down, delta=delta,
        delta_up=delta_up, laplacian=laplacian, eigenvalues=w,
        eigenvectors=vec, harmonic_basis=harmonic,
        proj_harmonic=P_h, proj_im_d=P_d, proj_im_delta=P_del,
        betti=betti, kernel_threshold=kernel_threshold,
    )
    frame.diagnostics = {
        "self_adjoint_residual": _self_adjoint_residual(laplacian, G),
        "projector_sum_residual": float(
            np.abs(P_h + P_d + P_del - np.eye(n_p)).max()
        ),
        "harmonic_dim": int(harmonic.shape[1]),
        "betti": betti,
    }
    return frame


def _self_adjoint_residual(L: np.ndarray, G: np.ndarray) -> float:
    if L.size == 0:
        return 0.0
    M = G @ L
    return float(np.abs(M - M.T).max() / max(np.abs(M).max(), 1.0))


def pencil_nonzero_eigenvalues(
    S: np.ndarray, G: np.ndarray, threshold: float = DEFAULT_KERNEL_THRESHOLD
) -> np.ndarray:
    """Nonzero eigenvalues of the symmetric-definite pencil (S, G)."""
    if S.size == 0:
        return np.zeros(0)
    w = sla.eigh(0.5 * (S + S.T), G, eigvals_only=True)
    w = np.clip(w, 0.0, None)
    lam_max = w.max() if w.size else 0.0
    return w[w > threshold * max(lam_max, 1.0)]


@dataclass
class RestrictedDet:
    """Product of the nonzero spectrum of the Laplacian on one invariant
    subspace, with the finite-zeta cross path exp(-zeta'(0))."""

    value: float
    log_value: float
    eigenvalues: np.ndarray
    zeta_path_value: float
    relative_gap: float
    empty: bool = False


def restricted_determinant(frame: HodgeFrame, subspace: str) -> RestrictedDet:
    """det of the degree-p Laplacian on 'im_delta_up', 'im_d_down' or the
    full 'nonzero' complement of the kernel; empty subspaces give 1, flagged.

    The value is accumulated in the log domain; the same spectrum is pushed
    through zeta(s) = sum u^-s with a numerically differentiated zeta'(0) as
    an independent route to exp(-zeta'(0)).
    """
    pair, p = frame.pair, frame.degree
    if subspace == "im_delta_up":
        S = frame.d.T @ _gram(pair, p + 1) @ frame.d if frame.d.shape[0] else np.zeros((0, 0))
        eigs = pencil_nonzero_eigenvalues(S, frame.gram, frame.kernel_threshold) \
            if S.size else np.zeros(0)
    elif subspace == "im_d_down":
        G_down = _gram(pair, p - 1)
        S = (
            frame.d_down.T @ frame.gram @ frame.d_down
            if frame.d_down.shape[1]
            else np.zeros((0, 0))
        )
        eigs = pencil_nonzero_eigenvalues(S, G_down, frame.kernel_threshold) \
            if S.size else np.zeros(0)
    elif subspace == "nonzero":
        eigs = frame.eigenvalues[frame.eigenvalues > 0.0]
    else:
        raise ValueError(f"unknown subspace {subspace!r}")

    if eigs.size == 0:
        return RestrictedDet(
            value=1.0, log_value=0.0, eigenvalues=eigs,
            zeta_path_value=1.0, relative_gap=0.0, empty=True,
        )
    logs = np.log(eigs)
    log_value = float(np.sort(logs).sum())
    value = safe_exp(log_value)
    zeta_value = _zeta_regularized(eigs)
    gap = abs(value - zeta_value) / max(abs(value), 1e-300) \
        if math.isfinite(value) else 0.0
    return RestrictedDet(
        value=value, log_value=log_value, eigenvalues=np.sort(eigs),
        zeta_path_value=zeta_value, relative_gap=float(gap),
    )


def _zeta_regularized(eigs: np.ndarray) -> float:
    """exp(-zeta'(0)) with zeta(s) = sum u^-s, derivative taken numerically."""
    vals = [mpmath.mpf(float(u)) for u in eigs]

    def zeta(s):
        return mpmath.fsum(u ** (-s) for u in vals)

    dz = mpmath.diff(zeta, 0)
    out = mpmath.e ** (-dz)
    if out > mpmath.mpf("1e308"):
        return math.inf
    return float(out)


def harmonic_integral_basis(frame: HodgeFrame, lifts) -> tuple:
    """Harmonic projections of integer cocycle lifts; their periods over the
    integral cycle basis equal the lifts' (projection subtracts an exact
    piece).  Returns (basis matrix with one column per class, h Gram matrix)
    and records both on the frame.
    """
    cols = [np.asarray(z, float) for z in lifts]
    if not cols:
        n = frame.gram.shape[0]
        rho, h = np.zeros((n, 0)), np.zeros((0, 0))
    else:
        Z = np.column_stack(cols)
        rho = frame.proj_harmonic @ Z
        h = rho.T @ frame.gram @ rho
        h = 0.5 * (h + h.T)
    frame.harmonic_integral_basis = rho
    frame.h_matrix = h
    return rho, h


def h_determinant(h: np.ndarray) -> float:
    """det of an h-matrix with the empty-product convention det([]) = 1."""
    if h.size == 0:
        return 1.0
    sign, logdet = np.linalg.slogdet(h)
    if sign <= 0:
        raise EmptySubspace("h-matrix is not positive definite")
    return float(np.exp(logdet))
