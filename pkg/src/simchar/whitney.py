"""Whitney elementary forms, exact simplex integration, and the cochain
embedding of a complex into its subdivision.

Integration never uses quadrature: a Whitney k-form pulled back to a child
simplex is a polynomial in the child's barycentric coordinates, and monomials
integrate in closed form,

    int_Delta  nu^beta  dlambda  =  beta! / (|beta| + k)!

over the standard k-simplex in Lebesgue lambda-coordinates.  With
``exact=True`` everything runs in Fraction arithmetic (float coordinates are
converted losslessly), so identities like RW = id and Stokes hold with zero
residual.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import SimplicialComplex, barycentric_coords, base_vertex_weights
from .errors import DegreeMismatch, NoParentLink


# ---------------------------------------------------------------- cochains


@dataclass
class Cochain:
    """Coefficient vector over the k-simplex basis of a fixed complex."""

    complex: SimplicialComplex
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        n = (
            self.complex.n_simplices(self.degree)
            if 0 <= self.degree <= self.complex.dim
            else 0
        )
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.shape != (n,):
            raise ValueError(f"expected {n} coefficients, got {self.coeffs.shape}")

    def d(self) -> "Cochain":
        if self.degree >= self.complex.dim:
            return Cochain(self.complex, self.degree + 1, np.zeros(0))
        mat = self.complex.coboundary_matrix(self.degree)
        return Cochain(self.complex, self.degree + 1, mat @ self.coeffs)

    def pair(self, chain: np.ndarray):
        """Evaluate on an integer/real chain in the same degree."""
        return np.asarray(chain) @ self.coeffs


# ------------------------------------------------------------ whitney forms


@dataclass
class WhitneyForm:
    """Piecewise-polynomial form stored symbolically per top simplex.

    ``terms[t]`` is a list of (coefficient, alpha, wedge): the form restricted
    to top simplex t is  sum  coeff * mu^alpha * dmu_{w1} ^ ... ^ dmu_{wk}
    with alpha a local-vertex exponent tuple and wedge a tuple of local
    vertex indices.
    """

    degree: int
    base: SimplicialComplex
    terms: dict


def whitney(tau: Cochain) -> WhitneyForm:
    """The Whitney form of a cochain: for an elementary k-cochain on
    (p_0, ..., p_k) it is k! * sum_i (-1)^i mu_{p_i} dmu_{p_0} ^ ...
    (omit i) ... ^ dmu_{p_k}; extended linearly."""
    X = tau.complex
    k = tau.degree
    n = X.dim
    fact = math.factorial(k)
    terms: dict = {t: [] for t in range(X.n_simplices(n))}
    sign_k = X.orientation[k]
    coeffs = tau.coeffs
    exact = coeffs.dtype == object
    for t, top in enumerate(X.simplices[n]):
        local = {v: i for i, v in enumerate(top)}
        for face in itertools.combinations(top, k + 1):
            si = X.index[k].get(face)
            if si is None:
                continue
            c = coeffs[si]
            if c == 0:
                continue
            c = c * int(sign_k[si])
            loc = tuple(local[v] for v in face)
            if k == 0:
                alpha = tuple(1 if i == loc[0] else 0 for i in range(n + 1))
                terms[t].append((c, alpha, ()))
                continue
            for i in range(k + 1):
                alpha = tuple(1 if j == loc[i] else 0 for j in range(n + 1))
                wedge = loc[:i] + loc[i + 1:]
                coef = c * ((-1) ** i) * fact
                if exact:
                    coef = Fraction(coef)
                terms[t].append((coef, alpha, wedge))
    return WhitneyForm(degree=k, base=X, terms=terms)


def _monomial_integral(B, alpha, k: int, exact: bool):
    """Integral over the standard k-simplex of prod_v mu_v(lambda)^alpha_v,
    where mu_v interpolates the barycentric matrix B ((k+1) x (n+1))."""
    factors = []
    for v, e in enumerate(alpha):
        factors.extend([v] * e)
    if not factors:
        one = Fraction(1) if exact else 1.0
        return one / math.factorial(k)
    total = Fraction(0) if exact else 0.0
    for choice in itertools.product(range(k + 1), repeat=len(factors)):
        beta = [0] * (k + 1)
        coef = Fraction(1) if exact else 1.0
        for f, j in zip(factors, choice):
            coef = coef * B[j][f]
            beta[j] += 1
        num = 1
        for b in beta:
            num *= math.factorial(b)
        denom = math.factorial(sum(beta) + k)
        if exact:
            total += coef * Fraction(num, denom)
        else:
            total += coef * (num / denom)
    return total


def _det(M, exact: bool):
    size = len(M)
    if size == 0:
        return Fraction(1) if exact else 1.0
    if not exact:
        return float(np.linalg.det(np.asarray(M, dtype=float)))
    if size == 1:
        return M[0][0]
    if size == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    out = Fraction(0)
    for j in range(size):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        out += (-1) ** j * M[0][j] * _det(minor, True)
    return out


def _pullback_integral(B, coeff, alpha, wedge, k: int, exact: bool):
    """Integral over one child k-simplex (barycentric rows B) of
    coeff * mu^alpha * dmu_wedge, in the child's sorted-vertex orientation."""
    if k == 0:
        val = Fraction(1) if exact else 1.0
        for v, e in enumerate(alpha):
            for _ in range(e):
                val = val * B[0][v]
        return coeff * val
    mat = [[B[j + 1][w] - B[0][w] for w in wedge] for j in range(k)]
    det = _det(mat, exact)
    if det == 0:
        return Fraction(0) if exact else 0.0
    mono = _monomial_integral(B, alpha, k, exact)
    return coeff * det * mono


def _containing_top(X: SimplicialComplex):
    key = "containing_top"
    if key not in X.cache:
        table = {}
        n = X.dim
        for t, top in enumerate(X.simplices[n]):
            for k in range(n + 1):
                for face in itertools.combinations(top, k + 1):
                    table.setdefault((k, X.index[k][face]), t)
        X.cache[key] = table
    return X.cache[key]


def _bary_rows(fine, base, child_vertex_ids, ref_tuple, exact: bool):
    """Barycentric rows of the child's vertices w.r.t. a reference base
    simplex.  The exact path reads the canonical per-vertex weights so that
    every reference frame sees identical rational geometry."""
    if not exact:
        ref_pts = base.vertices[list(ref_tuple)]
        child_pts = fine.vertices[list(child_vertex_ids)]
        B = barycentric_coords(ref_pts, child_pts, exact=False)
        return [list(row) for row in np.atleast_2d(B)]
    weights = base_vertex_weights(fine, base)
    pos = {v: i for i, v in enumerate(ref_tuple)}
    rows = []
    for v in child_vertex_ids:
        anc, w = weights[v]
        row = [Fraction(0)] * len(ref_tuple)
        for x, wx in zip(anc, w):
            row[pos[x]] = wx
        rows.append(row)
    return rows


def integrate_simplex(
    w: WhitneyForm, Xp: SimplicialComplex, idx: int, exact: bool = False
):
    """Integral of ``w`` over the oriented basis k-simplex ``idx`` of ``Xp``,
    which must descend from (or be) the form's base complex."""
    base = w.base
    k = w.degree
    if not Xp.descends_from(base):
        raise NoParentLink("chain complex does not descend from the form's base")
    adim, aidx = (
        Xp.ancestor_simplex(base, k, idx) if Xp is not base else (k, idx)
    )
    t = _containing_top(base)[(adim, aidx)]
    top = base.simplices[base.dim][t]
    B = _bary_rows(Xp, base, Xp.simplices[k][idx], top, exact)
    total = Fraction(0) if exact else 0.0
    for coeff, alpha, wedge in w.terms[t]:
        total += _pullback_integral(B, coeff, alpha, wedge, k, exact)
    return total * int(Xp.orientation[k][idx])


def integrate(w: WhitneyForm, Xp: SimplicialComplex, chain, exact: bool = False):
    """Integral of ``w`` against a coefficient chain on ``Xp`` in its degree."""
    chain = np.asarray(chain)
    if chain.shape != (Xp.n_simplices(w.degree),):
        raise DegreeMismatch("chain length does not match the form degree")
    total = Fraction(0) if exact else 0.0
    for idx in np.nonzero(chain)[0]:
        total += chain[idx] * integrate_simplex(w, Xp, int(idx), exact=exact)
    return total


def de_rham_map(w: WhitneyForm, Xp: SimplicialComplex, exact: bool = False) -> Cochain:
    """Componentwise integration of ``w`` over the basis simplices of ``Xp``."""
    n = Xp.n_simplices(w.degree)
    vals = np.empty(n, dtype=object if exact else float)
    for idx in range(n):
        vals[idx] = integrate_simplex(w, Xp, idx, exact=exact)
    return Cochain(Xp, w.degree, vals)


# -------------------------------------------------------- embedding matrices


def embedding_matrix(
    fine: SimplicialComplex,
    base: SimplicialComplex,
    k: int,
    exact: bool = False,
) -> np.ndarray:
    """Matrix of W': C^k(base) -> C^k(fine), entry (c, sigma) the integral of
    the Whitney form of sigma over the child simplex c.  Its column span is
    the embedded subcomplex E^k(base, fine)."""
    if not fine.descends_from(base):
        raise NoParentLink("fine complex does not descend from base")
    n_f = fine.n_simplices(k)
    n_b = base.n_simplices(k)
    out = np.zeros((n_f, n_b), dtype=object if exact else float)
    fact = math.factorial(k)
    for ci in range(n_f):
        adim, aidx = fine.ancestor_simplex(base, k, ci)
        anc = base.simplices[adim][aidx]
        B = _bary_rows(fine, base, fine.simplices[k][ci], anc, exact)
        s_c = int(fine.orientation[k][ci])
        local = {v: i for i, v in enumerate(anc)}
        for face in itertools.combinations(anc, k + 1):
            si = base.index[k].get(face)
            if si is None:
                continue
            loc = tuple(local[v] for v in face)
            val = Fraction(0) if exact else 0.0
            if k == 0:
                alpha = tuple(1 if i == loc[0] else 0 for i in range(adim + 1))
                val = _pullback_integral(B, 1, alpha, (), 0, exact)
            else:
                for i in range(k + 1):
                    alpha = tuple(
                        1 if j == loc[i] else 0 for j in range(adim + 1)
                    )
                    wedge = loc[:i] + loc[i + 1:]
                    val += _pullback_integral(
                        B, (-1) ** i * fact, alpha, wedge, k, exact
                    )
            out[ci, si] = val * s_c * int(base.orientation[k][si])
    return out


def embed(tau: Cochain, fine: SimplicialComplex, exact: bool = False) -> Cochain:
    """W' applied to a base cochain, yielding its image in C^k(fine)."""
    W = embedding_matrix(fine, tau.complex, tau.degree, exact=exact)
    return Cochain(fine, tau.degree, W @ tau.coeffs)


# ------------------------------------------------------------- inner product


def _metric_data(X: SimplicialComplex, t: int):
    """Per top simplex: barycentric-gradient Gram matrix and volume."""
    pts = X.vertices[list(X.simplices[X.dim][t])]
    n = X.dim
    E = (pts[1:] - pts[0]).T
    EtE = E.T @ E
    C = np.linalg.inv(EtE)
    G = np.zeros((n + 1, n + 1))
    G[1:, 1:] = C
    G[0, 1:] = -C.sum(axis=0)
    G[1:, 0] = G[0, 1:]
    G[0, 0] = C.sum()
    vol = math.sqrt(max(np.linalg.det(EtE), 0.0)) / math.factorial(n)
    return G, vol


def mass_matrix(X: SimplicialComplex, k: int) -> np.ndarray:
    """Gram matrix of elementary k-cochains under <a, b> = int <Wa, Wb> dvol,
    assembled per top simplex from closed-form barycentric integrals."""
    key = ("mass", k)
    if key in X.cache:
        return X.cache[key]
    n = X.dim
    nk = X.n_simplices(k)
    M = np.zeros((nk, nk))
    fact2 = math.factorial(k) ** 2
    sign_k = X.orientation[k]
    for t, top in enumerate(X.simplices[n]):
        G, vol = _metric_data(X, t)
        quad = vol / ((n + 1) * (n + 2))  # int mu_i mu_j, off-diagonal
        local = {v: i for i, v in enumerate(top)}
        faces = [
            (X.index[k][f], tuple(local[v] for v in f))
            for f in itertools.combinations(top, k + 1)
        ]
        for ai in range(len(faces)):
            si, la = faces[ai]
            for bi in range(ai, len(faces)):
                ti, lb = faces[bi]
                acc = 0.0
                for i in range(k + 1):
                    rows = la[:i] + la[i + 1:]
                    for j in range(k + 1):
                        cols = lb[:j] + lb[j + 1:]
                        minor = G[np.ix_(rows, cols)] if k else np.zeros((0, 0))
                        det = float(np.linalg.det(minor)) if k else 1.0
                        w = quad * (2.0 if la[i] == lb[j] else 1.0)
                        acc += (-1) ** (i + j) * det * w
                val = fact2 * acc * int(sign_k[si]) * int(sign_k[ti])
                M[si, ti] += val
                if si != ti:
                    M[ti, si] += val
    X.cache[key] = M
    return M


def inner_product(a: Cochain, b: Cochain) -> float:
    """L2-type inner product of two cochains on the same complex."""
    if a.complex is not b.complex or a.degree != b.degree:
        raise DegreeMismatch("cochains live on different complexes or degrees")
    M = mass_matrix(a.complex, a.degree)
    return float(np.asarray(a.coeffs, float) @ M @ np.asarray(b.coeffs, float))


# ---------------------------------------------------------------- pair view


class ComplexPair:
    """A complex together with a distinguished subdivision: the embedded
    cochain subcomplex E^.(base, fine) with its inner product and both
    refinement maps.

    In base coordinates the Gram matrix of E^k is the Whitney mass matrix of
    the base complex (the embedded piecewise form of a base cochain is the
    base Whitney form itself); the equality with the pushed-forward fine-side
    Gram W'^T M' W' is asserted in the test suite.
    """

    def __init__(self, base: SimplicialComplex, fine: SimplicialComplex):
        if not fine.descends_from(base):
            raise NoParentLink("fine complex does not descend from base")
        self.base = base
        self.fine = fine
        self._cache: dict = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def embedding(self, k: int, exact: bool = False) -> np.ndarray:
        return self._memo(
            ("W", k, exact),
            lambda: embedding_matrix(self.fine, self.base, k, exact=exact),
        )

    def gram(self, k: int) -> np.ndarray:
        return mass_matrix(self.base, k)

    def gram_fine(self, k: int) -> np.ndarray:
        return mass_matrix(self.fine, k)

    def d_base(self, k: int) -> np.ndarray:
        return self.base.coboundary_matrix(k)

    def d_fine(self, k: int) -> np.ndarray:
        return self.fine.coboundary_matrix(k)

    def chain_subdivision(self, k: int) -> np.ndarray:
        from .complexes import subdivision_chain_matrix

        return self._memo(
            ("sd", k), lambda: subdivision_chain_matrix(self.fine, self.base, k)
        )

    def cochain_transport(self, k: int) -> np.ndarray:
        from .complexes import last_vertex_cochain_matrix

        return self._memo(
            ("lv", k), lambda: last_vertex_cochain_matrix(self.fine, self.base, k)
        )

    def to_fine(self, v: np.ndarray, k: int) -> np.ndarray:
        """Base-coordinate E-element to its fine cochain vector."""
        return self.embedding(k) @ np.asarray(v)

    def from_fine(self, w: np.ndarray, k: int) -> np.ndarray:
        """Left-inverse of the embedding (least squares; exact on E)."""
        W = self.embedding(k)
        sol, *_ = np.linalg.lstsq(W, np.asarray(w, float), rcond=None)
        return sol
