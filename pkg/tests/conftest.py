import numpy as np
import pytest

from simchar.catalog import catalog
from simchar.complexes import SimplicialComplex, perturbed_subdivide
from simchar.whitney import ComplexPair

PAIR_SEEDS = {"s1:3": 11, "t2_flat:7": 12, "s2_tetra:0": 13, "s1:8": 21}
PAIR_SCALE = 0.1


@pytest.fixture(scope="session")
def catalog_complexes():
    return {name: catalog(name).complex for name in PAIR_SEEDS}


@pytest.fixture(scope="session")
def catalog_pairs(catalog_complexes):
    out = {}
    for name, base in catalog_complexes.items():
        fine = perturbed_subdivide(base, seed=PAIR_SEEDS[name], scale=PAIR_SCALE)
        out[name] = ComplexPair(base, fine)
    return out


@pytest.fixture(scope="session")
def rp2_complex():
    # minimal 6-vertex real projective plane; chain-level torsion target
    faces = [
        (0, 1, 2), (0, 1, 3), (0, 2, 4), (0, 3, 5), (0, 4, 5),
        (1, 2, 5), (1, 3, 4), (1, 4, 5), (2, 3, 4), (2, 3, 5),
    ]
    coords = np.random.default_rng(11).normal(size=(6, 4))
    return SimplicialComplex(
        coords, faces, require_closed=True, require_orientable=False
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240809)
