"""Differential characters of the embedded-cochain model: coordinates, the
field-strength and class maps with their exact sequences, spark triples, and
the model-axiom verifier.

A character of degree p is stored by coordinates (z, tau, c):

* z in [0,1)^{b_p}: position on the harmonic torus, in the basis of harmonic
  p-cochains with integral periods;
* tau: a coexact fluctuation in im(delta_{p+1}), in base coordinates;
* c: a class in H^{p+1} of the integer cochains of the fine complex, split
  into free coordinates (against transported dual cocycles) and torsion
  coordinates modulo their orders.

Evaluation on an integer p-cycle alpha of the fine complex is

    f(alpha) = z . periods(alpha) + (W'tau)(alpha) + T_c(alpha)   mod Z,

with T_c the pinned lift of the class: a deterministic least-squares solve
for free generators, an exact rational potential for torsion generators.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complexes import SimplicialComplex
from .errors import ExactnessViolation, NotACycle, NotASpark
from .hodge import HodgeFrame, build_frame
from .homology import cohomology, cocycle_lift, homology
from .rationality import find_integer_relation
from .snf import IntegerSolver, _as_object_matrix
from .whitney import ComplexPair, Cochain, mass_matrix

SPARK_TOL = 1e-10
CERT_TOL = 1e-9


def frac01(x):
    """Representative in [0,1) of x mod Z."""
    return np.mod(x, 1.0)


def circle_dist(x) -> float:
    """Distance to the nearest integer (the R/Z metric)."""
    f = float(np.mod(x, 1.0))
    return min(f, 1.0 - f)


@dataclass
class CharacterCoords:
    degree: int
    z: np.ndarray
    tau: np.ndarray
    c_free: np.ndarray
    c_tor: tuple = ()

    def __post_init__(self):
        self.z = frac01(np.asarray(self.z, float))
        self.tau = np.asarray(self.tau, float)
        self.c_free = np.asarray(self.c_free, dtype=np.int64)


@dataclass
class SparkTriple:
    degree: int
    a: np.ndarray            # fine p-cochain over the working field
    e: np.ndarray            # field strength, base coordinates of E^{p+1}
    r: np.ndarray            # integer fine (p+1)-cocycle


@dataclass
class TopologyData:
    """Integer topology of the fine complex aligned with the base complex:
    free cycle bases transported by the subdivision chain map, dual cocycles
    transported by the last-vertex pullback, torsion generators with their
    exact rational potentials."""

    cycles_p: np.ndarray
    cycles_p1: np.ndarray
    duals_p: np.ndarray
    duals_p1: np.ndarray
    torsion_p1: list  # (generator vector, order, Fraction potential vector)
    tor_order_p1: int
    betti_p: int
    betti_p1: int


def _transported_topology(
    pair: ComplexPair, p: int, assume_torsion_free: bool
) -> TopologyData:
    base, fine = pair.base, pair.fine
    n = base.dim

    def free_cycles(k):
        if k > n:
            return np.zeros((0, 0), dtype=np.int64)
        hs = homology(base, k, "Z")
        if hs.betti == 0:
            return np.zeros((fine.n_simplices(k), 0), dtype=np.int64)
        sd = pair.chain_subdivision(k)
        F = np.asarray(hs.free_basis, dtype=object)
        out = sd.astype(object) @ F
        return np.array([[int(v) for v in row] for row in out], dtype=np.int64)

    def duals(k):
        if k > n:
            return np.zeros((0, 0), dtype=np.int64)
        hs = homology(base, k, "Z")
        if hs.betti == 0:
            return np.zeros((fine.n_simplices(k), 0), dtype=np.int64)
        lv = pair.cochain_transport(k)
        cols = [lv @ cocycle_lift(base, k, j) for j in range(hs.betti)]
        return np.column_stack(cols).astype(np.int64)

    cyc_p, cyc_p1 = free_cycles(p), free_cycles(p + 1)
    du_p, du_p1 = duals(p), duals(p + 1)

    torsion = []
    if not assume_torsion_free and p + 1 <= fine.dim:
        co = cohomology(fine, p + 1, "Z")
        d_fine = (
            fine.coboundary_matrix(p) if p <= fine.dim else
            np.zeros((fine.n_simplices(p + 1), 0), dtype=np.int64)
        )
        if co.torsion_basis:
            solver = IntegerSolver(d_fine)
            for t_vec, q in co.torsion_basis:
                rhs = np.array([int(q) * int(v) for v in t_vec], dtype=object)
                s = solver.solve(rhs)
                if s is None:
                    raise RuntimeError("torsion potential unsolvable")
                pot = np.array(
                    [Fraction(int(v), int(q)) for v in s], dtype=object
                )
                torsion.append(
                    (np.array([int(v) for v in t_vec], dtype=np.int64), int(q), pot)
                )
    tor_order = 1
    for _, q, _ in torsion:
        tor_order *= q
    bp = homology(base, p, "field").betti if p <= n else 0
    bp1 = homology(base, p + 1, "field").betti if p + 1 <= n else 0
    return TopologyData(
        cycles_p=cyc_p, cycles_p1=cyc_p1, duals_p=du_p, duals_p1=du_p1,
        torsion_p1=torsion, tor_order_p1=tor_order, betti_p=bp, betti_p1=bp1,
    )


class CharacterSpace:
    """Coordinates, lifts and maps for Diff^p of one Cheeger-Simons pair."""

    def __init__(
        self,
        pair: ComplexPair,
        p: int,
        kernel_threshold: float = 1e-12,
        assume_torsion_free: bool = False,
    ):
        self.pair = pair
        self.p = p
        self.frame_p: HodgeFrame = build_frame(pair, p, kernel_threshold)
        self.frame_p1: HodgeFrame = build_frame(pair, p + 1, kernel_threshold)
        self.topology = _transported_topology(pair, p, assume_torsion_free)

        from .hodge import harmonic_integral_basis

        base = pair.base
        lifts_p = [cocycle_lift(base, p, j) for j in range(self.frame_p.betti)] \
            if p <= base.dim else []
        self.rho_p, self.h_p = harmonic_integral_basis(self.frame_p, lifts_p)
        lifts_p1 = [
            cocycle_lift(base, p + 1, j) for j in range(self.frame_p1.betti)
        ] if p + 1 <= base.dim else []
        self.rho_p1, self.h_p1 = harmonic_integral_basis(self.frame_p1, lifts_p1)

        self.W_p = pair.embedding(p) if p <= base.dim else np.zeros((0, 0))
        self.W_p1 = pair.embedding(p + 1) if p + 1 <= base.dim else np.zeros((0, 0))
        self.fine_rho_p = self.W_p @ self.rho_p if self.rho_p.size else \
            np.zeros((pair.fine.n_simplices(p) if p <= pair.fine.dim else 0, 0))

        self._free_lifts: list | None = None
        self._class_solver = None

    # --------------------------------------------------------------- lifts
    @property
    def betti_p(self) -> int:
        return self.topology.betti_p

    @property
    def betti_p1(self) -> int:
        return self.topology.betti_p1

    def _d_fine(self, k: int) -> np.ndarray:
        fine = self.pair.fine
        if 0 <= k < fine.dim:
            return fine.coboundary_matrix(k).astype(float)
        n_k = fine.n_simplices(k) if 0 <= k <= fine.dim else 0
        n_k1 = fine.n_simplices(k + 1) if k + 1 <= fine.dim else 0
        return np.zeros((n_k1, n_k))

    def free_lifts(self) -> list:
        """Deterministic least-squares lifts T_j with d T_j = W'(rho_j) - r_j."""
        if self._free_lifts is None:
            d = self._d_fine(self.p)
            out = []
            for j in range(self.betti_p1):
                rhs = self.W_p1 @ self.rho_p1[:, j] - self.topology.duals_p1[:, j]
                sol, *_ = np.linalg.lstsq(d, rhs, rcond=None)
                resid = np.abs(d @ sol - rhs).max() if rhs.size else 0.0
                if resid > 1e-8:
                    raise ExactnessViolation(
                        f"class lift {j} unsolvable, residual {resid:.2e}"
                    )
                out.append(sol)
            self._free_lifts = out
        return self._free_lifts

    def lift_vector(self, ch: CharacterCoords) -> np.ndarray:
        """T_c as a float fine p-cochain (free part + exact torsion part)."""
        n = self.pair.fine.n_simplices(self.p)
        T = np.zeros(n)
        for j, m in enumerate(ch.c_free):
            if m:
                T = T + float(m) * self.free_lifts()[j]
        for coord, (t_vec, q, pot) in zip(ch.c_tor, self.topology.torsion_p1):
            if coord % q:
                T = T - (coord % q) * np.array([float(v) for v in pot])
        return T

    def _lift_eval_exact(self, ch: CharacterCoords, alpha: np.ndarray) -> Fraction:
        """Torsion part of T_c(alpha), exactly in Q."""
        total = Fraction(0)
        for coord, (t_vec, q, pot) in zip(ch.c_tor, self.topology.torsion_p1):
            k = coord % q
            if k:
                dot = sum(Fraction(int(a)) * w for a, w in zip(alpha, pot))
                total -= k * dot
        return total

    # ---------------------------------------------------------------- maps
    def field_strength(self, ch: CharacterCoords) -> Cochain:
        """delta_1: the closed integral-period (p+1)-form d(tau) + harmonic
        representative of the free class; independent of z."""
        base = self.pair.base
        n_p1 = base.n_simplices(self.p + 1) if self.p + 1 <= base.dim else 0
        v = np.zeros(n_p1)
        if ch.tau.size and self.frame_p.d.shape[0]:
            v = v + self.frame_p.d @ ch.tau
        if self.rho_p1.size and ch.c_free.size:
            v = v + self.rho_p1 @ ch.c_free.astype(float)
        return Cochain(base, self.p + 1, v)

    def delta1(self, ch: CharacterCoords) -> Cochain:
        return self.field_strength(ch)

    def delta2(self, ch: CharacterCoords):
        """The integral class: free coordinates and torsion coordinates."""
        tor = tuple(
            c % q for c, (_, q, _) in zip(ch.c_tor, self.topology.torsion_p1)
        )
        return np.array(ch.c_free, dtype=np.int64), tor

    def lift_pairing(self, ch: CharacterCoords, alpha) -> float:
        """T_c(alpha): least-squares lifts for the free part, exact rational
        potentials for the torsion part."""
        alpha = np.asarray(alpha)
        val = 0.0
        for j, m in enumerate(ch.c_free):
            if m:
                val += float(m) * float(self.free_lifts()[j] @ alpha.astype(float))
        val += float(self._lift_eval_exact(ch, alpha) % 1)
        return val

    def evaluate(self, ch: CharacterCoords, alpha) -> float:
        """f(alpha) in [0,1) for an integer p-cycle of the fine complex."""
        alpha = np.asarray(alpha)
        fine = self.pair.fine
        if self.p >= 1:
            bd = fine.boundary_matrix(self.p) @ alpha
            if bd.size and np.any(bd):
                raise NotACycle("alpha has nonzero boundary")
        val = 0.0
        if ch.z.size:
            periods = self.fine_rho_p.T @ alpha.astype(float)
            val += float(ch.z @ periods)
        if ch.tau.size:
            val += float((self.W_p @ ch.tau) @ alpha.astype(float))
        val += self.lift_pairing(ch, alpha)
        return float(frac01(val))

    # --------------------------------------------------------------- sparks
    def to_spark(self, ch: CharacterCoords) -> SparkTriple:
        a = np.zeros(self.pair.fine.n_simplices(self.p))
        if ch.z.size:
            a = a + self.fine_rho_p @ ch.z
        if ch.tau.size:
            a = a + self.W_p @ ch.tau
        a = a + self.lift_vector(ch)
        e = self.field_strength(ch).coeffs
        r = np.zeros(self.topology.duals_p1.shape[0], dtype=np.int64)
        for j, m in enumerate(ch.c_free):
            r = r + int(m) * self.topology.duals_p1[:, j]
        for coord, (t_vec, q, _) in zip(ch.c_tor, self.topology.torsion_p1):
            r = r + int(coord % q) * t_vec
        spark = SparkTriple(degree=self.p, a=a, e=np.asarray(e, float), r=r)
        resid = self.spark_residual(spark)
        if resid > SPARK_TOL:
            raise NotASpark(f"spark equation residual {resid:.2e}")
        return spark

    def spark_residual(self, sp: SparkTriple) -> float:
        d = self._d_fine(self.p)
        lhs = d @ sp.a
        rhs = (self.W_p1 @ sp.e if sp.e.size else np.zeros(lhs.shape)) - sp.r
        res = np.abs(lhs - rhs).max() if lhs.size else 0.0
        d_up = self._d_fine(self.p + 1)
        if d_up.shape[0] and sp.r.size:
            res = max(res, np.abs(d_up @ sp.r.astype(float)).max())
        return float(res)

    def _class_coordinates(self, r: np.ndarray):
        """Free and torsion coordinates of an integer cocycle class [r]."""
        m = self.topology.cycles_p1.T.astype(np.int64) @ r.astype(np.int64) \
            if self.topology.cycles_p1.size else np.zeros(0, dtype=np.int64)
        resid = r.astype(object).copy()
        for j, mj in enumerate(np.atleast_1d(m)):
            resid = resid - int(mj) * self.topology.duals_p1[:, j].astype(object)
        tor_coords = []
        if self.topology.torsion_p1:
            if self._class_solver is None:
                d_fine = self.pair.fine.coboundary_matrix(self.p) \
                    if self.p < self.pair.fine.dim else \
                    np.zeros((self.topology.duals_p1.shape[0], 0), dtype=np.int64)
                cols = [t for t, _, _ in self.topology.torsion_p1]
                A = np.column_stack(cols + [d_fine]) if cols else d_fine
                self._class_solver = (IntegerSolver(A), len(cols))
            solver, k = self._class_solver
            sol = solver.solve(resid)
            if sol is None:
                raise ExactnessViolation("class reduction unsolvable over Z")
            tor_coords = [
                int(sol[i]) % self.topology.torsion_p1[i][1] for i in range(k)
            ]
        return np.atleast_1d(m).astype(np.int64), tuple(tor_coords)

    def from_spark(self, sp: SparkTriple) -> CharacterCoords:
        resid = self.spark_residual(sp)
        if resid > SPARK_TOL:
            raise NotASpark(f"spark equation residual {resid:.2e}")
        m, tor = self._class_coordinates(sp.r)
        ch0 = CharacterCoords(
            degree=self.p, z=np.zeros(self.betti_p),
            tau=np.zeros(self.frame_p.gram.shape[0]), c_free=m, c_tor=tor,
        )
        g = sp.a - self.lift_vector(ch0)
        # coexact part from the field strength: d tau = e - harmonic(c)
        rhs = np.asarray(sp.e, float).copy()
        if self.rho_p1.size and m.size:
            rhs = rhs - self.rho_p1 @ m.astype(float)
        tau = self._solve_coexact(rhs)
        h = g - self.W_p @ tau if tau.size else g
        if self.topology.cycles_p.size:
            periods = self.topology.cycles_p.T.astype(float) @ h
        else:
            periods = np.zeros(0)
        return CharacterCoords(
            degree=self.p, z=frac01(periods), tau=tau, c_free=m, c_tor=tor
        )

    def _solve_coexact(self, rhs: np.ndarray) -> np.ndarray:
        """The unique tau in im(delta_{p+1}) with d tau = rhs."""
        fr = self.frame_p
        if fr.gram.size == 0:
            return np.zeros(0)
        d = fr.d
        if d.shape[0] == 0 or not rhs.size:
            return np.zeros(fr.gram.shape[0])
        # parametrize tau = delta_up @ y and solve (d delta_up) y = rhs
        A = d @ fr.delta_up
        y, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        return fr.delta_up @ y

    def equivalence_certificate(self, s1: SparkTriple, s2: SparkTriple):
        """Solve a - a' = db + Psi(s), r - r' = -ds; returns (b, s, residuals).

        Raises NotASpark when the sparks are not equivalent (distinct classes
        or field strengths).
        """
        e_gap = np.abs(np.asarray(s1.e) - np.asarray(s2.e)).max() \
            if np.asarray(s1.e).size else 0.0
        if e_gap > CERT_TOL:
            raise NotASpark(f"field strengths differ by {e_gap:.2e}")
        d_int = self.pair.fine.coboundary_matrix(self.p) \
            if self.p < self.pair.fine.dim else \
            np.zeros((s1.r.shape[0], self.pair.fine.n_simplices(self.p)),
                     dtype=np.int64)
        target = (s2.r - s1.r).astype(object)
        s = IntegerSolver(d_int).solve(target)
        if s is None:
            raise NotASpark("classes differ; no integer s with ds = r' - r")
        s = np.array([int(v) for v in s], dtype=np.int64)
        g = s1.a - s2.a - s.astype(float)
        if self.topology.cycles_p.size:
            periods = self.topology.cycles_p.T.astype(float) @ g
            n_int = np.round(periods)
            if np.abs(periods - n_int).max() > CERT_TOL:
                raise NotASpark("periods of a - a' - s are not integral")
            u = (self.topology.duals_p.astype(np.int64) @
                 n_int.astype(np.int64))
        else:
            u = np.zeros_like(s)
        s_total = s + u
        h = g - u.astype(float)
        d_down = self._d_fine(self.p - 1)
        if d_down.shape[1]:
            b, *_ = np.linalg.lstsq(d_down, h, rcond=None)
            resid = float(np.abs(d_down @ b - h).max())
        else:
            b = np.zeros(0)
            resid = float(np.abs(h).max()) if h.size else 0.0
        if resid > CERT_TOL:
            raise NotASpark(f"db + Psi(s) residual {resid:.2e}")
        return b, s_total, resid

    # ------------------------------------------------------------- sampling
    def random_character(self, rng: np.random.Generator) -> CharacterCoords:
        z = rng.uniform(size=self.betti_p)
        n_p1 = self.frame_p1.gram.shape[0]
        tau = self.frame_p.delta_up @ rng.normal(size=n_p1) \
            if n_p1 else np.zeros(self.frame_p.gram.shape[0])
        m = rng.integers(-2, 3, size=self.betti_p1)
        tor = tuple(
            int(rng.integers(0, q)) for _, q, _ in self.topology.torsion_p1
        )
        return CharacterCoords(self.p, z, tau, m, tor)

    def random_cycle(self, rng: np.random.Generator, span: int = 3) -> np.ndarray:
        fine = self.pair.fine
        alpha = np.zeros(fine.n_simplices(self.p), dtype=np.int64)
        if self.topology.cycles_p.size:
            coefs = rng.integers(-span, span + 1, size=self.topology.cycles_p.shape[1])
            alpha = alpha + self.topology.cycles_p @ coefs
        if self.p + 1 <= fine.dim:
            beta = rng.integers(-span, span + 1, size=fine.n_simplices(self.p + 1))
            alpha = alpha + fine.boundary_matrix(self.p + 1) @ beta
        return alpha


def _grammify(pair, k):
    return mass_matrix(pair.base, k)


# ------------------------------------------------------------ model verifier


@dataclass
class ModelReport:
    """Outcome of checking the five model axioms on one pair."""

    seed: int | None
    freeness: bool
    pairing: list
    pairing_ok: bool
    integrality: str            # pass | heuristic-pass | fail
    integrality_witnesses: list
    stokes_residual: float
    de_rham: list
    de_rham_ok: bool

    @property
    def passed(self) -> bool:
        return (
            self.freeness
            and self.pairing_ok
            and self.integrality != "fail"
            and self.de_rham_ok
        )

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "freeness": self.freeness,
            "pairing": self.pairing,
            "pairing_ok": self.pairing_ok,
            "integrality": self.integrality,
            "integrality_witnesses": self.integrality_witnesses,
            "stokes_residual": self.stokes_residual,
            "de_rham": self.de_rham,
            "de_rham_ok": self.de_rham_ok,
            "passed": self.passed,
        }


def verify_model(
    pair: ComplexPair,
    seed: int | None = None,
    max_coeff: int = 10**6,
    relation_tol: float = 1e-12,
) -> ModelReport:
    """Check the model axioms on (base, fine):

    1. chain groups free: structural;
    2. pairing nondegenerate on the embedded side: the embedding matrices
       have full column rank in every degree;
    3. integrality: per parent simplex, the vector of child integrals of its
       elementary form admits no small integer relation (PSLQ heuristic); a
       found relation is a failure witness;
    4. Stokes: the embedding commutes with the coboundaries;
    5. de Rham: embedded and dual cohomology dimensions agree and the period
       pairing of closed embedded cochains against cycles has full rank.
    """
    base, fine = pair.base, pair.fine
    n = base.dim

    pairing = []
    pairing_ok = True
    for k in range(n + 1):
        W = pair.embedding(k)
        rank = int(np.linalg.matrix_rank(W)) if W.size else 0
        ok = rank == base.n_simplices(k)
        pairing.append({"degree": k, "rank": rank, "dim": base.n_simplices(k),
                        "full_column_rank": ok})
        pairing_ok &= ok

    witnesses = []
    any_checked = False
    for k in range(1, n + 1):
        W = pair.embedding(k)
        W_exact = None
        groups: dict = {}
        for ci in range(fine.n_simplices(k)):
            adim, aidx = fine.ancestor_simplex(base, k, ci)
            if adim == k:
                groups.setdefault(aidx, []).append(ci)
        for aidx, children in sorted(groups.items()):
            if len(children) < 2:
                continue
            any_checked = True
            integrals = [float(W[ci, aidx]) for ci in children]
            rel = find_integer_relation(
                integrals, max_coeff=max_coeff, tol=relation_tol
            )
            if rel is None:
                continue
            # PSLQ proposes; exact rational arithmetic disposes.  The
            # integrals are exact dyadic rationals, so only a relation that
            # vanishes identically is a genuine independence failure; float
            # pigeonhole hits are rejected here.
            if W_exact is None:
                W_exact = pair.embedding(k, exact=True)
            exact_resid = sum(
                a * W_exact[ci, aidx] for a, ci in zip(rel, children)
            )
            if exact_resid == 0:
                witnesses.append({
                    "degree": k,
                    "parent": list(base.simplices[k][aidx]),
                    "integrals": integrals,
                    "relation": rel,
                })
    if witnesses:
        integrality = "fail"
    elif any_checked:
        integrality = "heuristic-pass"
    else:
        integrality = "pass"

    stokes = 0.0
    for k in range(n):
        lhs = fine.coboundary_matrix(k).astype(float) @ pair.embedding(k)
        rhs = pair.embedding(k + 1) @ base.coboundary_matrix(k).astype(float)
        if lhs.size:
            stokes = max(stokes, float(np.abs(lhs - rhs).max()))

    de_rham = []
    de_rham_ok = True
    for k in range(n + 1):
        dim_e = homology(base, k, "field").betti
        dim_f = homology(fine, k, "field").betti
        hs_fine = homology(fine, k, "Z")
        ok = dim_e == dim_f
        inj_rank = 0
        if dim_e:
            from .snf import kernel_basis

            d_b = base.coboundary_matrix(k)
            closed = kernel_basis(d_b) if d_b.shape[0] else \
                _as_object_matrix(np.eye(base.n_simplices(k), dtype=np.int64))
            P = (
                np.asarray(hs_fine.free_basis, float).T
                @ pair.embedding(k)
                @ np.asarray(closed, float)
            )
            inj_rank = int(np.linalg.matrix_rank(P)) if P.size else 0
            ok &= inj_rank == dim_e
        de_rham.append({"degree": k, "dim_embedded": dim_e, "dim_dual": dim_f,
                        "injectivity_rank": inj_rank, "ok": ok})
        de_rham_ok &= ok

    return ModelReport(
        seed=seed, freeness=True, pairing=pairing, pairing_ok=pairing_ok,
        integrality=integrality, integrality_witnesses=witnesses,
        stokes_residual=stokes, de_rham=de_rham, de_rham_ok=de_rham_ok,
    )


# ----------------------------------------------------------- exact sequences


@dataclass
class GridReport:
    """Dimensions/orders of the nine groups of the 3x3 exact grid in one
    degree, with the rank identities and membership residuals that verify
    exactness.  Each node is (real dimension, free discrete rank, torsion
    order)."""

    degree: int
    nodes: dict
    checks: dict

    @property
    def passed(self) -> bool:
        return all(v.get("ok", True) for v in self.checks.values())

    def as_dict(self) -> dict:
        return {"degree": self.degree, "nodes": self.nodes,
                "checks": self.checks, "passed": self.passed}


def _node(vdim: int, rank: int, tor: int):
    return {"dim": int(vdim), "rank": int(rank), "torsion_order": int(tor)}


def grid_check(space: CharacterSpace) -> GridReport:
    """Rank bookkeeping of the 3x3 commutative grid at degree p.

    All nine signatures are assembled from independent sources (integer SNF
    of the fine complex, matrix ranks of the embedded coboundary, projector
    traces of the Hodge frame) and each row/column is verified additively;
    failures raise ExactnessViolation naming the node.
    """
    pair, p = space.pair, space.p
    base, fine = pair.base, pair.fine

    b_k = homology(fine, p, "Z").betti
    hs_k = homology(fine, p, "Z")
    b_k1 = homology(fine, p + 1, "Z").betti if p + 1 <= fine.dim else 0
    tor_up = cohomology(fine, p + 1, "Z").torsion_order if p + 1 <= fine.dim else 1
    tor_hk = hs_k.torsion_order

    d_k = base.coboundary_matrix(p) if p < base.dim else np.zeros((0, 0))
    rank_dk = int(np.linalg.matrix_rank(d_k)) if d_k.size else 0
    dim_imdelta = space.frame_p.dim_im_delta_up

    nodes = {
        "H(E)/im_integral": _node(b_k, 0, 1),
        "ker_delta2": _node(b_k + dim_imdelta, 0, 1),
        "dE": _node(rank_dk, 0, 1),
        "H(cone)": _node(b_k, 0, tor_up),
        "spark_group": _node(b_k + dim_imdelta, b_k1, tor_up),
        "Z_integral(E)": _node(rank_dk, b_k1, 1),
        "ker_psi": _node(0, 0, tor_up),
        "H_int": _node(0, b_k1, tor_up),
        "im_psi": _node(0, b_k1, 1),
    }

    rows = [
        ("H(E)/im_integral", "ker_delta2", "dE"),
        ("H(cone)", "spark_group", "Z_integral(E)"),
        ("ker_psi", "H_int", "im_psi"),
    ]
    cols = [
        ("H(E)/im_integral", "H(cone)", "ker_psi"),
        ("ker_delta2", "spark_group", "H_int"),
        ("dE", "Z_integral(E)", "im_psi"),
    ]
    checks = {}
    for name, (a, b, c) in [
        (f"row{i}", r) for i, r in enumerate(rows)
    ] + [(f"col{i}", c) for i, c in enumerate(cols)]:
        na, nb, nc = nodes[a], nodes[b], nodes[c]
        ok = (
            na["dim"] + nc["dim"] == nb["dim"]
            and na["rank"] + nc["rank"] == nb["rank"]
            and na["torsion_order"] * nc["torsion_order"] == nb["torsion_order"]
        )
        alt = na["dim"] - nb["dim"] + nc["dim"]
        checks[name] = {"ok": ok, "alternating_dim_sum": int(alt)}
        if not ok:
            raise ExactnessViolation(f"grid additivity fails on {name}: {a},{b},{c}")

    checks["uct_torsion"] = {
        "ok": tor_up == tor_hk,
        "cochain_side": int(tor_up),
        "chain_side": int(tor_hk),
    }
    checks["rank_d_vs_im_delta"] = {
        "ok": rank_dk == dim_imdelta,
        "rank_d": rank_dk,
        "dim_im_delta": dim_imdelta,
    }
    checks["harmonic_vs_betti"] = {
        "ok": space.frame_p.harmonic_basis.shape[1] == b_k,
        "harmonic_dim": int(space.frame_p.harmonic_basis.shape[1]),
        "betti": int(b_k),
    }

    # membership of (w, [u]) pairs: periods of the harmonic representative and
    # the integer representative agree on the homology basis
    resid = 0.0
    if space.betti_p1:
        diff = space.topology.cycles_p1.T.astype(float) @ (
            space.W_p1 @ space.rho_p1
            - space.topology.duals_p1.astype(float)
        )
        resid = float(np.abs(diff).max())
    tor_pair_ok = True
    for t_vec, q, _ in space.topology.torsion_p1:
        if space.topology.cycles_p1.size:
            pairing = space.topology.cycles_p1.T.astype(np.int64) @ t_vec
            tor_pair_ok &= not np.any(pairing)
    checks["q_membership"] = {"ok": resid <= 1e-9 and tor_pair_ok,
                              "period_residual": resid}

    # delta_1 kernel bookkeeping: torus dim + discrete order vs Hom(H_p, R/Z)
    checks["delta1_kernel"] = {
        "ok": (space.frame_p.harmonic_basis.shape[1] == b_k)
        and (tor_up == tor_hk),
        "torus_dim": int(space.frame_p.harmonic_basis.shape[1]),
        "discrete_order": int(tor_up),
        "hom_dim": int(b_k),
        "hom_order": int(tor_hk),
    }

    for name, data in checks.items():
        if not data["ok"]:
            raise ExactnessViolation(f"grid check failed at {name}: {data}")
    return GridReport(degree=p, nodes=nodes, checks=checks)
