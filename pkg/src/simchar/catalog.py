"""Deterministic catalog of test manifolds with reference data.

Identifiers: ``s1:N`` (regular N-gon on the circle of unit circumference),
``t2_flat:7`` (the 7-vertex torus on a chordal Clifford embedding),
``t2_flat:MxN`` (grid torus), ``s2_tetra:L`` (tetrahedron boundary after L
barycentric subdivisions).  ``s1(8)``-style spellings are accepted too.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .complexes import SimplicialComplex, barycentric_subdivide, build_complex
from .errors import UnknownManifold

CIRCLE_RADIUS = 1.0 / (2.0 * math.pi)  # unit circumference


@dataclass
class CatalogEntry:
    name: str
    complex: SimplicialComplex
    betti: tuple
    reference: dict = field(default_factory=dict)


def _s1(N: int) -> CatalogEntry:
    if N < 3:
        raise UnknownManifold("s1 needs at least 3 vertices")
    R = CIRCLE_RADIUS
    verts = [
        (R * math.cos(2 * math.pi * k / N), R * math.sin(2 * math.pi * k / N))
        for k in range(N)
    ]
    X = build_complex(verts, [(k, (k + 1) % N) for k in range(N)])
    return CatalogEntry(
        name=f"s1:{N}",
        complex=X,
        betti=(1, 1),
        reference={
            "smooth_lambda0": [(2 * math.pi * k) ** 2 for k in range(5)],
            "circumference": 1.0,
            "circulant_lambda1": _circulant_lambda1(N),
        },
    )


def _circulant_lambda1(N: int) -> float:
    """First nonzero eigenvalue of the (stiffness, mass) pencil on the regular
    N-gon: (6/h^2) (1 - cos(2 pi/N)) / (2 + cos(2 pi/N))."""
    h = 2 * CIRCLE_RADIUS * math.sin(math.pi / N)
    th = 2 * math.pi / N
    return (6.0 / h**2) * (1 - math.cos(th)) / (2 + math.cos(th))


def _clifford(u: float, v: float) -> tuple:
    R = CIRCLE_RADIUS
    return (
        R * math.cos(2 * math.pi * u),
        R * math.sin(2 * math.pi * u),
        R * math.cos(2 * math.pi * v),
        R * math.sin(2 * math.pi * v),
    )


def _t2_seven() -> CatalogEntry:
    faces = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    faces += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    verts = [_clifford(i / 7.0, (3 * i % 7) / 7.0) for i in range(7)]
    X = build_complex(verts, faces)
    return CatalogEntry(name="t2_flat:7", complex=X, betti=(1, 2, 1))


def _t2_grid(m: int, n: int) -> CatalogEntry:
    if m < 3 or n < 3:
        raise UnknownManifold("grid torus needs m, n >= 3")
    def vid(a, b):
        return (a % m) * n + (b % n)
    verts = [_clifford(a / m, b / n) for a in range(m) for b in range(n)]
    faces = []
    for a in range(m):
        for b in range(n):
            faces.append((vid(a, b), vid(a + 1, b), vid(a + 1, b + 1)))
            faces.append((vid(a, b), vid(a + 1, b + 1), vid(a, b + 1)))
    X = build_complex(verts, faces)
    return CatalogEntry(name=f"t2_flat:{m}x{n}", complex=X, betti=(1, 2, 1))


def _s2_tetra(levels: int) -> CatalogEntry:
    s = 1.0 / math.sqrt(3.0)
    verts = [(s, s, s), (s, -s, -s), (-s, s, -s), (-s, -s, s)]
    tops = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    X = build_complex(verts, tops)
    for _ in range(levels):
        X = barycentric_subdivide(X)
    return CatalogEntry(name=f"s2_tetra:{levels}", complex=X, betti=(1, 0, 1))


_PATTERN = re.compile(r"^([a-z0-9_]+)[:(]([0-9x,]+)\)?$")


def catalog(manifold_id: str) -> CatalogEntry:
    """Resolve a catalog identifier to a deterministic complex plus reference
    Betti numbers and, where exact, smooth spectra."""
    m = _PATTERN.match(manifold_id.strip().lower())
    if not m:
        raise UnknownManifold(f"cannot parse manifold id {manifold_id!r}")
    name, arg = m.group(1), m.group(2)
    if name == "s1":
        return _s1(int(arg))
    if name == "t2_flat":
        if "x" in arg:
            a, b = arg.split("x")
            return _t2_grid(int(a), int(b))
        if int(arg) == 7:
            return _t2_seven()
        raise UnknownManifold("t2_flat takes 7 or MxN")
    if name == "s2_tetra":
        return _s2_tetra(int(arg))
    raise UnknownManifold(f"unknown manifold family {name!r}")
