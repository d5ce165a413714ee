"""Oriented affine simplicial complexes embedded in Euclidean space.

Conventions used throughout the package:

* A k-simplex is stored as a sorted tuple of vertex indices.  The chain/cochain
  basis element attached to it is ``sign * [sorted tuple]`` where ``sign`` is
  the entry of ``orientation[k]``.  For k < dim all signs are +1 (the sorted
  tuple is the basis); top-dimensional signs are induced from a global
  orientation so that the sum of all top basis elements is a cycle.
* ``boundary_matrix(k)`` maps degree-k chains to degree-(k-1) chains in these
  bases; coboundaries on cochains are its transpose.
* A subdivision stores, per simplex, the simplex of the parent complex whose
  (possibly perturbed) barycenters span it, plus per-vertex origin data, so
  that downstream integration never searches geometry.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import (
    BoundaryDetected,
    DegenerateSimplex,
    DegreeOutOfRange,
    NonOrientable,
    PerturbationEscapedSimplex,
)

_DEGENERACY_RTOL = 1e-13


def simplex_volume(pts: np.ndarray) -> float:
    """Affine k-volume of the simplex spanned by the rows of ``pts``."""
    pts = np.asarray(pts, dtype=float)
    k = pts.shape[0] - 1
    if k == 0:
        return 1.0
    edges = pts[1:] - pts[0]
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    if det <= 0.0:
        return 0.0
    return math.sqrt(det) / math.factorial(k)


def simplex_inradius(pts: np.ndarray) -> float:
    """Inradius of a k-simplex within its affine hull: k*vol / sum of facet volumes."""
    pts = np.asarray(pts, dtype=float)
    k = pts.shape[0] - 1
    if k == 0:
        return 0.0
    vol = simplex_volume(pts)
    facet_sum = sum(
        simplex_volume(np.delete(pts, i, axis=0)) for i in range(k + 1)
    )
    return k * vol / facet_sum


def barycentric_coords(simplex_pts, x, exact: bool = False):
    """Barycentric coordinates of point(s) ``x`` with respect to a simplex.

    Solves the normal equations of the affine system, which is exact for
    points in the affine hull.  With ``exact=True`` all arithmetic is done in
    ``Fraction`` (float inputs are converted losslessly).
    """
    if exact:
        P = [[Fraction(v) for v in row] for row in np.atleast_2d(simplex_pts)]
        X = np.atleast_2d(x)
        k = len(P) - 1
        out = []
        for row in X:
            xv = [Fraction(v) for v in row]
            if k == 0:
                out.append([Fraction(1)])
                continue
            E = [[P[j + 1][d] - P[0][d] for j in range(k)] for d in range(len(xv))]
            rhs = [xv[d] - P[0][d] for d in range(len(xv))]
            A = [[sum(E[d][i] * E[d][j] for d in range(len(xv))) for j in range(k)]
                 for i in range(k)]
            b = [sum(E[d][i] * rhs[d] for d in range(len(xv))) for i in range(k)]
            lam = _solve_fraction(A, b)
            out.append([Fraction(1) - sum(lam)] + lam)
        arr = np.empty((len(out), k + 1), dtype=object)
        for i, row in enumerate(out):
            arr[i, :] = row
        return arr if np.ndim(x) > 1 else arr[0]
    P = np.asarray(simplex_pts, dtype=float)
    X = np.atleast_2d(np.asarray(x, dtype=float))
    k = P.shape[0] - 1
    if k == 0:
        res = np.ones((X.shape[0], 1))
        return res if np.ndim(x) > 1 else res[0]
    E = (P[1:] - P[0]).T
    lam = np.linalg.solve(E.T @ E, E.T @ (X - P[0]).T).T
    res = np.column_stack([1.0 - lam.sum(axis=1), lam])
    return res if np.ndim(x) > 1 else res[0]


def _solve_fraction(A, b):
    """Gaussian elimination over Fraction for a small square system."""
    n = len(b)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular exact system")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [v / inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [vr - f * vc for vr, vc in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


class SimplicialComplex:
    """A finite oriented simplicial complex with an affine embedding.

    Attributes
    ----------
    dim : top dimension n.
    vertices : (V, N) float array of embedded coordinates.
    simplices : list over k of lists of sorted vertex tuples.
    index : list over k of dicts tuple -> position.
    orientation : list over k of +-1 int arrays (see module docstring).
    parent : the complex this one subdivides, or None.
    parent_simplex : per degree, list of (pdim, pidx) simplices of the parent
        containing each simplex (None when parent is None).
    vertex_origin : per vertex, (k, idx) simplex of the parent whose centre
        point it is ((0, old_index) for inherited vertices).
    """

    def __init__(
        self,
        vertices,
        top_simplices,
        *,
        require_closed: bool = True,
        require_orientable: bool = True,
        top_signs=None,
        parent: "SimplicialComplex | None" = None,
        vertex_origin=None,
        check_degenerate: bool = True,
    ):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2:
            raise ValueError("vertices must be a 2-d coordinate array")
        tops = [tuple(sorted(int(v) for v in s)) for s in top_simplices]
        if not tops:
            raise ValueError("no top simplices")
        dims = {len(t) - 1 for t in tops}
        if len(dims) != 1:
            raise ValueError("top simplices must all share one dimension")
        self.dim = dims.pop()
        if self.dim > self.vertices.shape[1]:
            raise ValueError("embedding dimension below manifold dimension")
        for t in tops:
            if len(set(t)) != len(t):
                raise DegenerateSimplex(f"repeated vertex in simplex {t}")

        self.simplices: list[list[tuple]] = [[] for _ in range(self.dim + 1)]
        seen = [set() for _ in range(self.dim + 1)]
        for t in tops:
            for k in range(self.dim + 1):
                for face in itertools.combinations(t, k + 1):
                    if face not in seen[k]:
                        seen[k].add(face)
                        self.simplices[k].append(face)
        for k in range(self.dim + 1):
            self.simplices[k].sort()
        self.index = [
            {s: i for i, s in enumerate(self.simplices[k])}
            for k in range(self.dim + 1)
        ]

        if check_degenerate:
            lengths = self._edge_lengths() if self.dim >= 1 else np.array([1.0])
            ref = float(lengths.max()) if lengths.size else 1.0
            for t in self.simplices[self.dim]:
                vol = simplex_volume(self.vertices[list(t)])
                if vol <= _DEGENERACY_RTOL * ref**self.dim:
                    raise DegenerateSimplex(f"zero-volume simplex {t}")

        self.orientation = [
            np.ones(len(self.simplices[k]), dtype=np.int64)
            for k in range(self.dim + 1)
        ]
        self._coface_table = self._build_cofaces()
        if require_closed:
            for fi, cof in enumerate(self._coface_table):
                if len(cof) != 2:
                    face = self.simplices[self.dim - 1][fi] if self.dim else ()
                    raise BoundaryDetected(
                        f"codimension-1 simplex {face} has {len(cof)} cofaces"
                    )
        if top_signs is not None:
            signs = np.asarray(top_signs, dtype=np.int64)
            if signs.shape != (len(self.simplices[self.dim]),):
                raise ValueError("top_signs has wrong length")
            self.orientation[self.dim] = signs
            if require_closed and require_orientable:
                self._check_cancellation()
        elif require_orientable and self.dim >= 1:
            self.orientation[self.dim] = self._orient_tops(strict=require_closed)

        self.parent = parent
        self.vertex_origin = vertex_origin
        self.parent_simplex: list | None = None
        if parent is not None:
            if vertex_origin is None:
                raise ValueError("subdivision requires vertex_origin data")
            self._fill_parent_links()
        self._boundary_cache: dict[int, np.ndarray] = {}
        self.cache: dict = {}  # memo space for derived algebraic data

    # ----------------------------------------------------------------- basic
    def n_simplices(self, k: int) -> int:
        return len(self.simplices[k])

    @property
    def f_vector(self) -> tuple:
        return tuple(len(s) for s in self.simplices)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(s) for k, s in enumerate(self.simplices))

    def points(self, k: int, idx: int) -> np.ndarray:
        return self.vertices[list(self.simplices[k][idx])]

    def _edge_lengths(self) -> np.ndarray:
        if self.dim < 1 or not self.simplices[1]:
            return np.zeros(0)
        seg = np.array(
            [self.vertices[b] - self.vertices[a] for a, b in self.simplices[1]]
        )
        return np.linalg.norm(seg, axis=1)

    def mesh(self) -> float:
        """Supremum of edge lengths (Euclidean proxy for geodesic distance)."""
        lengths = self._edge_lengths()
        return float(lengths.max()) if lengths.size else 0.0

    def fullness(self) -> float:
        """inf over top simplices of vol(sigma) / mesh^n."""
        if self.dim < 1:
            raise DegreeOutOfRange("fullness needs top dimension >= 1")
        h = self.mesh()
        vols = [simplex_volume(self.points(self.dim, i))
                for i in range(self.n_simplices(self.dim))]
        return float(min(vols) / h**self.dim)

    def top_volumes(self) -> np.ndarray:
        return np.array(
            [simplex_volume(self.points(self.dim, i))
             for i in range(self.n_simplices(self.dim))]
        )

    # ------------------------------------------------------------ orientation
    def _build_cofaces(self):
        """For each (n-1)-simplex, list of (top index, boundary position)."""
        if self.dim == 0:
            return []
        table = [[] for _ in self.simplices[self.dim - 1]]
        for ti, t in enumerate(self.simplices[self.dim]):
            for i in range(self.dim + 1):
                face = t[:i] + t[i + 1:]
                table[self.index[self.dim - 1][face]].append((ti, i))
        return table

    def _orient_tops(self, strict: bool) -> np.ndarray:
        n_top = len(self.simplices[self.dim])
        signs = np.zeros(n_top, dtype=np.int64)
        adjacency = [[] for _ in range(n_top)]
        for cof in self._coface_table:
            if len(cof) == 2:
                (t1, i1), (t2, i2) = cof
                # induced orientations must cancel: s1*(-1)^i1 = -s2*(-1)^i2
                rel = -((-1) ** (i1 + i2))
                adjacency[t1].append((t2, rel))
                adjacency[t2].append((t1, rel))
        for root in range(n_top):
            if signs[root]:
                continue
            signs[root] = 1
            stack = [root]
            while stack:
                cur = stack.pop()
                for other, rel in adjacency[cur]:
                    want = rel * signs[cur]
                    if signs[other] == 0:
                        signs[other] = want
                        stack.append(other)
                    elif signs[other] != want:
                        raise NonOrientable(
                            "no consistent global orientation exists"
                        )
        return signs

    def _check_cancellation(self):
        for fi, cof in enumerate(self._coface_table):
            if len(cof) != 2:
                continue
            (t1, i1), (t2, i2) = cof
            s = self.orientation[self.dim]
            if s[t1] * (-1) ** i1 + s[t2] * (-1) ** i2 != 0:
                raise NonOrientable(
                    f"induced orientations do not cancel on face {fi}"
                )

    # --------------------------------------------------------------- algebra
    def boundary_matrix(self, k: int) -> np.ndarray:
        """Integer matrix of the boundary map C_k -> C_{k-1} in the basis of
        oriented simplices; entry (tau, sigma) is the incidence sign."""
        if not 1 <= k <= self.dim:
            raise DegreeOutOfRange(f"boundary degree {k} not in 1..{self.dim}")
        if k in self._boundary_cache:
            return self._boundary_cache[k]
        rows = len(self.simplices[k - 1])
        cols = len(self.simplices[k])
        B = np.zeros((rows, cols), dtype=np.int64)
        s_hi = self.orientation[k]
        s_lo = self.orientation[k - 1]
        for ci, simp in enumerate(self.simplices[k]):
            for i in range(k + 1):
                face = simp[:i] + simp[i + 1:]
                ri = self.index[k - 1][face]
                B[ri, ci] += s_hi[ci] * (-1) ** i * s_lo[ri]
        self._boundary_cache[k] = B
        return B

    def coboundary_matrix(self, k: int) -> np.ndarray:
        """Matrix of d: C^k -> C^{k+1} (transpose of boundary in degree k+1)."""
        if k == self.dim:
            return np.zeros((0, len(self.simplices[k])), dtype=np.int64)
        return self.boundary_matrix(k + 1).T

    # ------------------------------------------------------------ subdivision
    def _fill_parent_links(self):
        par = []
        for k in range(self.dim + 1):
            links = []
            for simp in self.simplices[k]:
                origins = [self.vertex_origin[v] for v in simp]
                links.append(max(origins, key=lambda o: o[0]))
            par.append(links)
        self.parent_simplex = par

    def descends_from(self, base: "SimplicialComplex") -> bool:
        cur = self
        while cur is not None:
            if cur is base:
                return True
            cur = cur.parent
        return False

    def ancestor_simplex(self, base: "SimplicialComplex", k: int, idx: int):
        """Simplex (adim, aidx) of ``base`` containing the given simplex."""
        cur = self
        cdim, cidx = k, idx
        while cur is not base:
            if cur.parent is None:
                raise ValueError("complex does not descend from the given base")
            cdim, cidx = cur.parent_simplex[cdim][cidx]
            cur = cur.parent
        return cdim, cidx


def build_complex(vertex_coords, top_simplices, top_signs=None) -> SimplicialComplex:
    """Build a closed oriented complex from coordinates and top simplices.

    Raises NonOrientable / DegenerateSimplex / BoundaryDetected per the
    manifold checks; use the SimplicialComplex constructor directly for open
    or chain-level-only complexes.
    """
    return SimplicialComplex(
        vertex_coords,
        top_simplices,
        require_closed=True,
        require_orientable=True,
        top_signs=top_signs,
    )


# --------------------------------------------------------------- subdivision


def _flag_children(n: int):
    """All permutations of 0..n; each yields one flag child of a top simplex."""
    return itertools.permutations(range(n + 1))


def _relative_orientation(frame_basis: np.ndarray, pts_parent, pts_child) -> int:
    """Sign of det(child frame) * det(parent frame) in a shared tangent basis."""
    ep = (np.asarray(pts_parent, float)[1:] - np.asarray(pts_parent, float)[0]).T
    ec = (np.asarray(pts_child, float)[1:] - np.asarray(pts_child, float)[0]).T
    dp = np.linalg.det(frame_basis.T @ ep)
    dc = np.linalg.det(frame_basis.T @ ec)
    return int(np.sign(dp) * np.sign(dc))


def _tangent_basis(pts: np.ndarray) -> np.ndarray:
    edges = (np.asarray(pts, float)[1:] - np.asarray(pts, float)[0]).T
    q, _ = np.linalg.qr(edges)
    return q


def _subdivide(X: SimplicialComplex, centre_point) -> SimplicialComplex:
    """Shared machinery of barycentric and perturbed subdivision.

    ``centre_point(k, idx)`` returns the inserted point for simplex (k, idx);
    it is called dimension by dimension, edges first.
    """
    n = X.dim
    vid = {}
    coords = []
    origins = []
    for k in range(n + 1):
        for idx in range(X.n_simplices(k)):
            vid[(k, idx)] = len(coords)
            coords.append(centre_point(k, idx))
            origins.append((k, idx))

    tops = []
    signs = []
    coords_arr = np.array(coords, dtype=float)
    for ti, t in enumerate(X.simplices[n]):
        s_t = int(X.orientation[n][ti])
        basis = _tangent_basis(X.vertices[list(t)])
        parent_pts = X.vertices[list(t)]
        for perm in _flag_children(n):
            chain_vids = []
            acc = []
            for i in range(n + 1):
                acc.append(t[perm[i]])
                face = tuple(sorted(acc))
                chain_vids.append(vid[(i, X.index[i][face])])
            child_pts = coords_arr[sorted(chain_vids)]
            rel = _relative_orientation(basis, parent_pts, child_pts)
            tops.append(tuple(sorted(chain_vids)))
            signs.append(s_t * rel)

    return SimplicialComplex(
        coords_arr,
        tops,
        require_closed=False,
        require_orientable=False,
        top_signs=np.array(signs, dtype=np.int64),
        parent=X,
        vertex_origin=origins,
    )


def barycentric_subdivide(X: SimplicialComplex) -> SimplicialComplex:
    """Standard barycentric subdivision with parent links."""

    def centre(k, idx):
        return X.points(k, idx).mean(axis=0)

    return _subdivide(X, centre)


def perturbed_subdivide(
    X: SimplicialComplex,
    seed: int,
    scale: float = 0.1,
    max_retries: int = 50,
) -> SimplicialComplex:
    """Barycentric subdivision with seeded in-simplex displacement of every
    inserted centre, dimension by dimension; deterministic given ``seed``.

    The displacement magnitude is at most ``scale * inradius`` of the simplex
    and the point must stay strictly inside the open simplex, else the draw
    is retried up to ``max_retries`` times before PerturbationEscapedSimplex.
    """
    if not 0.0 < scale < 0.5:
        raise ValueError("scale must lie in (0, 1/2)")

    def centre(k, idx):
        pts = X.points(k, idx)
        bary = pts.mean(axis=0)
        if k == 0:
            return bary
        rng = np.random.default_rng((int(seed), k, idx))
        frame = _tangent_basis(pts)
        r = simplex_inradius(pts)
        for _ in range(max_retries):
            direction = rng.normal(size=k)
            norm = np.linalg.norm(direction)
            if norm < 1e-12:
                continue
            magnitude = scale * r * rng.uniform(0.5, 1.0)
            cand = bary + frame @ (direction / norm) * magnitude
            lam = barycentric_coords(pts, cand)
            if np.all(lam > 1e-9):
                return cand
        raise PerturbationEscapedSimplex(
            f"perturbation of simplex ({k}, {idx}) left the open simplex"
        )

    return _subdivide(X, centre)


# --------------------------------------------------- maps between refinements


def subdivision_chain_matrix(
    fine: SimplicialComplex, base: SimplicialComplex, k: int
) -> np.ndarray:
    """Integer matrix of the subdivision chain map C_k(base) -> C_k(fine).

    Column sigma of the result lists the children of sigma with their
    orientations relative to sigma; it commutes with the boundary maps.
    """
    if not fine.descends_from(base):
        raise ValueError("fine complex does not descend from base")
    M = np.zeros((fine.n_simplices(k), base.n_simplices(k)), dtype=np.int64)
    if k == 0:
        for ci in range(fine.n_simplices(0)):
            adim, aidx = fine.ancestor_simplex(base, 0, ci)
            if adim == 0:
                M[ci, aidx] = 1
        return M
    frames = {}
    for ci in range(fine.n_simplices(k)):
        adim, aidx = fine.ancestor_simplex(base, k, ci)
        if adim != k:
            continue
        if aidx not in frames:
            frames[aidx] = _tangent_basis(base.points(k, aidx))
        rel = _relative_orientation(
            frames[aidx], base.points(k, aidx), fine.points(k, ci)
        )
        s_c = int(fine.orientation[k][ci])
        s_p = int(base.orientation[k][aidx])
        M[ci, aidx] = rel * s_c * s_p
    return M


def _last_vertex_map_one_level(child: SimplicialComplex) -> list[int]:
    """child vertex -> parent vertex: the largest vertex of its origin simplex."""
    parent = child.parent
    out = []
    for (k, idx) in child.vertex_origin:
        out.append(max(parent.simplices[k][idx]))
    return out


def last_vertex_cochain_matrix(
    fine: SimplicialComplex, base: SimplicialComplex, k: int
) -> np.ndarray:
    """Integer matrix of the last-vertex pullback C^k(base) -> C^k(fine).

    The last-vertex map is a simplicial approximation to the identity, so the
    pullback is a cochain map inducing an isomorphism on cohomology; composed
    across levels when ``fine`` is an iterated subdivision.
    """
    if not fine.descends_from(base):
        raise ValueError("fine complex does not descend from base")
    chain = []
    cur = fine
    while cur is not base:
        chain.append(cur)
        cur = cur.parent
    total = np.eye(base.n_simplices(k), dtype=np.int64)
    for child in reversed(chain):
        parent = child.parent
        vmap = _last_vertex_map_one_level(child)
        L = np.zeros(
            (child.n_simplices(k), parent.n_simplices(k)), dtype=np.int64
        )
        for ci, simp in enumerate(child.simplices[k]):
            image = [vmap[v] for v in simp]
            if len(set(image)) != len(image):
                continue
            order = np.argsort(image)
            parity = _permutation_sign(order)
            target = tuple(sorted(image))
            ti = parent.index[k].get(target)
            if ti is None:
                continue
            L[ci, ti] = (
                parity
                * int(child.orientation[k][ci])
                * int(parent.orientation[k][ti])
            )
        total = L @ total
    return total


def base_vertex_weights(X: SimplicialComplex, base: SimplicialComplex) -> list:
    """Exact barycentric weights of every vertex of ``X`` with respect to the
    base complex it subdivides.

    Returns, per vertex, a pair (base simplex tuple, Fraction weights) with
    the weights summing to one.  Each vertex's weights are derived once from
    its origin simplex and composed down the subdivision chain, so all
    reference frames in exact integration share consistent rational geometry
    even though stored coordinates are floats.
    """
    if X is base:
        return [((v,), (Fraction(1),)) for v in range(X.vertices.shape[0])]
    key = ("base_weights", base)
    if key in X.cache:
        return X.cache[key]
    if X.parent is None:
        raise ValueError("complex does not descend from the given base")
    parent_w = base_vertex_weights(X.parent, base)
    out = []
    for v, (k, idx) in enumerate(X.vertex_origin):
        S = X.parent.simplices[k][idx]
        pts = X.parent.points(k, idx)
        w0 = barycentric_coords(pts, X.vertices[v], exact=True)
        acc: dict = {}
        for u_local, u in enumerate(S):
            anc_u, wu = parent_w[u]
            if w0[u_local] == 0:
                continue
            for x_local, x in enumerate(anc_u):
                if wu[x_local] == 0:
                    continue
                acc[x] = acc.get(x, Fraction(0)) + w0[u_local] * wu[x_local]
        anc = tuple(sorted(acc))
        out.append((anc, tuple(acc[x] for x in anc)))
    X.cache[key] = out
    return out


def _permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
