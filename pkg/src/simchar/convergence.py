"""Mesh-refinement experiment runner: per level, build the pair, verify what
the plan asks for, and record spectral gaps, determinants, partition values
and the smooth-character approximation proxy.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy.integrate

from .catalog import CIRCLE_RADIUS, catalog
from .characters import verify_model
from .complexes import SimplicialComplex, barycentric_subdivide, perturbed_subdivide
from .errors import SimcharError, UnknownManifold
from .gauge import ActionSpec, GaugeFrames, ObservableSpec, partition_function
from .hodge import h_determinant
from .whitney import ComplexPair

SMOOTH_LAMBDA1 = (2.0 * math.pi) ** 2  # first nonzero eigenvalue on the unit circle


@dataclass
class ExperimentPlan:
    manifold: str
    levels: list
    seeds: list
    scale: float = 0.1
    p: int = 0
    refinement: str = "resample"  # or "subdivide"
    action: dict = field(default_factory=lambda: {"kind": "maxwell", "g2": 1.0})
    observable: dict = field(default_factory=lambda: {"kind": "const"})
    window: int = 8
    metrics: list = field(default_factory=lambda: ["gap", "partition"])
    tolerances: dict = field(default_factory=dict)
    out: str = "report"
    figures: bool = False

    def __post_init__(self):
        if list(self.levels) != sorted(set(self.levels)):
            raise ValueError("levels must be strictly increasing")
        if isinstance(self.seeds, int):
            self.seeds = [self.seeds + i for i in range(len(self.levels))]
        if len(self.seeds) != len(self.levels):
            raise ValueError("one seed per level required")
        if self.refinement not in ("resample", "subdivide"):
            raise ValueError("refinement must be resample or subdivide")

    @property
    def fullness_floor(self) -> float:
        return float(self.tolerances.get("fullness_floor", 0.01))

    @property
    def kernel_threshold(self) -> float:
        return float(self.tolerances.get("kernel_threshold", 1e-12))

    @property
    def tail_tol(self) -> float:
        return float(self.tolerances.get("tail", 1e-12))

    def action_spec(self) -> ActionSpec:
        return ActionSpec(
            kind=self.action.get("kind", "maxwell"),
            coupling=float(self.action.get("g2", 1.0)),
        )

    def as_dict(self) -> dict:
        return asdict(self)


def plan_from_dict(data: dict) -> ExperimentPlan:
    unknown = set(data) - set(ExperimentPlan.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown plan keys: {sorted(unknown)}")
    return ExperimentPlan(**data)


def load_plan(path: str) -> ExperimentPlan:
    import tomli

    with open(path, "rb") as fh:
        return plan_from_dict(tomli.load(fh))


@dataclass
class ConvergenceRow:
    level: int
    seed: int
    mesh: float
    fullness: float
    lambda1: float = float("nan")
    lambda1_ref: float = float("nan")
    gap_error: float = float("nan")
    h_det_p: float = float("nan")
    h_det_p1: float = float("nan")
    log_det_imdelta: float = float("nan")
    partition_value: float = float("nan")
    partition_log: float = float("nan")
    proxy_error: float = float("nan")
    proxy_C: float = float("nan")
    model_passed: str = ""
    wall_time_s: float = 0.0


def level_complex(plan: ExperimentPlan, level: int) -> SimplicialComplex:
    if plan.refinement == "resample":
        fam = plan.manifold.split(":")[0]
        if fam == "s1":
            return catalog(f"s1:{level}").complex
        if fam == "t2_flat":
            return catalog(f"t2_flat:{level}x{level}").complex
        if fam == "s2_tetra":
            return catalog(f"s2_tetra:{level}").complex
        raise UnknownManifold(f"no resample rule for {plan.manifold!r}")
    X = catalog(plan.manifold).complex
    for _ in range(level):
        X = barycentric_subdivide(X)
    return X


def observable_spec(plan: ExperimentPlan, space) -> ObservableSpec:
    kind = plan.observable.get("kind", "const")
    if kind in ("const", "constant"):
        return ObservableSpec("constant")
    if kind == "wilson":
        idx = int(plan.observable.get("cycle", 0))
        q = int(plan.observable.get("charge", 1))
        cyc = space.topology.cycles_p[:, idx]
        return ObservableSpec("wilson", cycle=cyc, charge=q)
    raise ValueError(f"unknown observable {kind!r}")


# ------------------------------------------------------ s1 character proxy


def _smooth_potential(theta: float) -> float:
    """Integral from 0 of the unit-period density (1 + cos t)/(2 pi), by
    adaptive quadrature (the oracle side deliberately avoids the closed
    form)."""
    val, _ = scipy.integrate.quad(
        lambda t: (1.0 + math.cos(t)) / (2.0 * math.pi), 0.0, theta
    )
    return val


def character_proxy_error(N: int, panel: int = 16) -> float:
    """Max over a fixed angle panel of |f - (WR-transported f)| in R/Z for the
    catalog smooth degree-0 character on the circle, against the regular
    N-gon pair transported by evaluation at vertices plus partial-edge
    Whitney integrals."""
    R = CIRCLE_RADIUS
    verts = np.array(
        [(R * math.cos(2 * math.pi * k / N), R * math.sin(2 * math.pi * k / N))
         for k in range(N)]
    )
    worst = 0.0
    for j in range(panel):
        phi = 2.0 * math.pi * ((j + 0.37) / panel)
        i = int(phi / (2.0 * math.pi / N)) % N
        th_i = 2.0 * math.pi * i / N
        th_ip = 2.0 * math.pi * (i + 1) / N
        # radial projection of the circle point onto the chord
        P, Q = verts[i], verts[(i + 1) % N]
        direction = np.array([math.cos(phi), math.sin(phi)])
        A = np.column_stack([Q - P, -direction])
        t, _s = np.linalg.solve(A, -P)
        u_phi = _smooth_potential(phi)
        u_i = _smooth_potential(th_i)
        edge_int, _ = scipy.integrate.quad(
            lambda s: (1.0 + math.cos(s)) / (2.0 * math.pi), th_i, th_ip
        )
        approx = u_i + t * edge_int
        frac = (u_phi - approx) % 1.0
        worst = max(worst, min(frac, 1.0 - frac))
    return worst


# ---------------------------------------------------------------- execution


def run_convergence(plan: ExperimentPlan, row_callback=None) -> list:
    """Run the plan level by level; rows are produced in order and handed to
    row_callback as soon as computed so partial results survive a failure."""
    rows = []
    prev_mesh = None
    for level, seed in zip(plan.levels, plan.seeds):
        t0 = time.perf_counter()
        base = level_complex(plan, level)
        fine = perturbed_subdivide(base, seed=seed, scale=plan.scale)
        pair = ComplexPair(base, fine)
        mesh = base.mesh()
        fullness = base.fullness()
        if prev_mesh is not None and mesh >= prev_mesh:
            raise SimcharError(
                f"mesh did not decrease at level {level}: {mesh} >= {prev_mesh}"
            )
        if fullness < plan.fullness_floor:
            raise SimcharError(
                f"fullness {fullness:.4g} below floor {plan.fullness_floor}"
            )
        prev_mesh = mesh
        row = ConvergenceRow(
            level=level, seed=seed, mesh=mesh, fullness=fullness
        )

        if "model" in plan.metrics:
            rep = verify_model(pair, seed=seed)
            row.model_passed = "pass" if rep.passed else "fail"

        gf = None
        if "partition" in plan.metrics or "hdet" in plan.metrics or "gap" in plan.metrics:
            gf = GaugeFrames(
                pair, plan.p, kernel_threshold=plan.kernel_threshold,
                assume_torsion_free=True,
            )
        if gf is not None:
            fr0 = gf.frames[0]
            nz = fr0.eigenvalues[fr0.eigenvalues > 0]
            if nz.size:
                row.lambda1 = float(nz.min())
            fam = plan.manifold.split(":")[0]
            if fam == "s1":
                row.lambda1_ref = SMOOTH_LAMBDA1
                row.gap_error = abs(row.lambda1 - SMOOTH_LAMBDA1)
            _, h_p = gf.h_bases[plan.p]
            _, h_p1 = gf.h_bases[plan.p + 1]
            row.h_det_p = h_determinant(h_p)
            row.h_det_p1 = h_determinant(h_p1)
            row.log_det_imdelta = gf.dets[plan.p].log_value

        if "partition" in plan.metrics:
            res = partition_function(
                gf, plan.action_spec(), observable_spec(plan, gf.space),
                window=plan.window, tail_tol=plan.tail_tol,
            )
            row.partition_value = res.value
            row.partition_log = res.log_value

        if "proxy" in plan.metrics:
            fam = plan.manifold.split(":")[0]
            if fam == "s1":
                row.proxy_error = character_proxy_error(level)
                row.proxy_C = row.proxy_error / mesh

        row.wall_time_s = time.perf_counter() - t0
        rows.append(row)
        if row_callback is not None:
            row_callback(row)
    return rows
