import numpy as np
import pytest

from simchar.characters import (
    CharacterCoords,
    CharacterSpace,
    circle_dist,
    grid_check,
    verify_model,
)
from simchar.complexes import SimplicialComplex, barycentric_subdivide
from simchar.errors import NotACycle, NotASpark
from simchar.whitney import ComplexPair


@pytest.fixture(scope="module")
def spaces(catalog_pairs):
    return {
        ("s1:3", 0): CharacterSpace(catalog_pairs["s1:3"], 0),
        ("t2_flat:7", 0): CharacterSpace(catalog_pairs["t2_flat:7"], 0),
        ("t2_flat:7", 1): CharacterSpace(catalog_pairs["t2_flat:7"], 1),
        ("s2_tetra:0", 1): CharacterSpace(catalog_pairs["s2_tetra:0"], 1),
    }


# ------------------------------------------------------------ verify_model


def test_model_passes_on_perturbed_pairs(catalog_pairs):
    for name, pair in catalog_pairs.items():
        rep = verify_model(pair, seed=1)
        assert rep.passed, f"{name}: {rep.as_dict()}"
        assert rep.integrality == "heuristic-pass"
        assert rep.stokes_residual <= 1e-12


def test_model_fails_on_unperturbed_edge_with_midpoint_witness():
    edge = SimplicialComplex(
        [[0.0], [1.0]], [(0, 1)],
        require_closed=False, require_orientable=False,
    )
    pair = ComplexPair(edge, barycentric_subdivide(edge))
    rep = verify_model(pair)
    assert rep.integrality == "fail"
    assert not rep.passed
    w = rep.integrality_witnesses[0]
    assert w["integrals"] == [0.5, 0.5]
    assert sorted(abs(a) for a in w["relation"]) == [1, 1]
    # the witness certifies n * (1/2) integral for n = 2 with n != 0
    assert sum(a * v for a, v in zip(w["relation"], w["integrals"])) == 0.0


def test_report_reproducible(catalog_pairs):
    r1 = verify_model(catalog_pairs["s1:3"], seed=11)
    r2 = verify_model(catalog_pairs["s1:3"], seed=11)
    assert r1.as_dict() == r2.as_dict()


# ------------------------------------------------------------------ delta 1


def test_delta1_flat_character_vanishes(spaces):
    sp = spaces[("t2_flat:7", 1)]
    ch = CharacterCoords(1, np.zeros(2), np.zeros(21), np.zeros(1, dtype=int))
    assert np.abs(sp.delta1(ch).coeffs).max() <= 1e-14


def test_delta1_of_class_generator_has_unit_period(spaces):
    sp = spaces[("s1:3", 0)]
    ch = CharacterCoords(0, np.zeros(1), np.zeros(3), np.array([1]))
    w = sp.delta1(ch)
    period = float(sp.topology.cycles_p1[:, 0] @ (sp.W_p1 @ w.coeffs))
    assert period == pytest.approx(1.0, abs=1e-10)


def test_delta1_periods_integral_random(spaces, rng):
    # defining property of the target lattice: integral periods on cycles
    for key in (("s1:3", 0), ("t2_flat:7", 1)):
        sp = spaces[key]
        cycles = sp.topology.cycles_p1
        for _ in range(100):
            ch = sp.random_character(rng)
            w_fine = sp.W_p1 @ sp.delta1(ch).coeffs
            periods = cycles.T.astype(float) @ w_fine
            assert np.abs(periods - np.round(periods)).max() <= 1e-8


def test_delta1_independent_of_z(spaces, rng):
    sp = spaces[("t2_flat:7", 1)]
    ch = sp.random_character(rng)
    w0 = sp.delta1(ch).coeffs
    for _ in range(10):
        ch2 = CharacterCoords(1, rng.uniform(size=2), ch.tau, ch.c_free, ch.c_tor)
        assert np.array_equal(sp.delta1(ch2).coeffs, w0)


def test_delta1_surjectivity_preimages(spaces, rng):
    # a preimage is constructed for lattice generators and for coexact images
    for key, sp in spaces.items():
        for j in range(sp.betti_p1):
            ch = CharacterCoords(
                sp.p, np.zeros(sp.betti_p), np.zeros(sp.frame_p.gram.shape[0]),
                np.eye(sp.betti_p1, dtype=int)[j],
            )
            resid = np.abs(sp.delta1(ch).coeffs - sp.rho_p1[:, j]).max()
            assert resid <= 1e-10
        n_up = sp.frame_p1.gram.shape[0]
        if n_up and sp.frame_p.d.shape[0]:
            tau = sp.frame_p.delta_up @ rng.normal(size=n_up)
            target = sp.frame_p.d @ tau
            ch = CharacterCoords(
                sp.p, np.zeros(sp.betti_p), tau,
                np.zeros(sp.betti_p1, dtype=int),
            )
            assert np.abs(sp.delta1(ch).coeffs - target).max() <= 1e-9


# ------------------------------------------------------------------ delta 2


def test_delta2_flat_and_generators(spaces):
    sp = spaces[("t2_flat:7", 1)]
    flat = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([0]))
    m, tor = sp.delta2(flat)
    assert np.all(m == 0) and tor == ()
    gen = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([1]))
    m, _ = sp.delta2(gen)
    assert list(m) == [1]


def test_delta2_kills_image_of_embedded_cochains(spaces, rng):
    sp = spaces[("t2_flat:7", 1)]
    ch = CharacterCoords(
        1, rng.uniform(size=2),
        sp.frame_p.delta_up @ rng.normal(size=14),
        np.zeros(1, dtype=int),
    )
    m, tor = sp.delta2(ch)
    assert np.all(m == 0)


def test_delta2_preimage_roundtrip_all_generators(spaces):
    for key, sp in spaces.items():
        for j in range(sp.betti_p1):
            ch = CharacterCoords(
                sp.p, np.zeros(sp.betti_p),
                np.zeros(sp.frame_p.gram.shape[0]),
                np.eye(sp.betti_p1, dtype=int)[j],
            )
            spark = sp.to_spark(ch)
            back = sp.from_spark(spark)
            assert np.array_equal(back.c_free, ch.c_free)


# ----------------------------------------------------------------- evaluate


def test_evaluate_flat_character_vanishes(spaces, rng):
    sp = spaces[("t2_flat:7", 1)]
    flat = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([0]))
    for _ in range(20):
        alpha = sp.random_cycle(rng)
        assert circle_dist(sp.evaluate(flat, alpha)) <= 1e-9


def test_evaluate_boundary_congruence(spaces, rng):
    # f(boundary beta) = integral of the field strength over beta, mod Z
    for key in (("s1:3", 0), ("t2_flat:7", 1), ("s2_tetra:0", 1)):
        sp = spaces[key]
        fine = sp.pair.fine
        ch = sp.random_character(rng)
        w_fine = sp.W_p1 @ sp.delta1(ch).coeffs
        for _ in range(100):
            beta = rng.integers(-3, 4, size=fine.n_simplices(sp.p + 1))
            alpha = fine.boundary_matrix(sp.p + 1) @ beta
            lhs = sp.evaluate(ch, alpha)
            rhs = float(beta @ w_fine)
            assert circle_dist(lhs - rhs) <= 1e-8


def test_evaluate_harmonic_third(spaces):
    sp = spaces[("s1:3", 0)]
    ch = CharacterCoords(0, np.array([1 / 3]), np.zeros(3), np.array([0]))
    alpha = np.zeros(sp.pair.fine.n_simplices(0), dtype=int)
    alpha[0] = 1
    assert sp.evaluate(ch, alpha) == pytest.approx(1 / 3, abs=1e-12)


def test_evaluate_rejects_non_cycles(spaces):
    sp = spaces[("t2_flat:7", 1)]
    ch = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([0]))
    bad = np.zeros(sp.pair.fine.n_simplices(1), dtype=int)
    bad[0] = 1  # a single edge is not closed
    with pytest.raises(NotACycle):
        sp.evaluate(ch, bad)


# ------------------------------------------------------------------- sparks


def test_spark_roundtrip_and_certificates(spaces, rng):
    for key, sp in spaces.items():
        for _ in range(25):
            ch = sp.random_character(rng)
            spark = sp.to_spark(ch)
            assert sp.spark_residual(spark) <= 1e-10
            back = sp.from_spark(spark)
            spark2 = sp.to_spark(back)
            # e is an equivalence invariant
            assert np.abs(np.asarray(spark.e) - np.asarray(spark2.e)).max() <= 1e-9
            b, s, resid = sp.equivalence_certificate(spark, spark2)
            assert resid <= 1e-9
            assert np.array_equal(back.c_free, ch.c_free)
            if ch.z.size:
                assert max(circle_dist(a - b2)
                           for a, b2 in zip(ch.z, back.z)) <= 1e-9


def test_flat_character_spark_is_closed(spaces):
    sp = spaces[("t2_flat:7", 1)]
    flat = CharacterCoords(1, np.array([0.3, 0.7]), np.zeros(21), np.array([0]))
    spark = sp.to_spark(flat)
    d = sp.pair.fine.coboundary_matrix(1).astype(float)
    assert np.abs(d @ spark.a).max() <= 1e-10
    assert np.all(spark.r == 0)
    assert np.abs(spark.e).max() <= 1e-12


def test_inequivalent_sparks_rejected(spaces):
    sp = spaces[("t2_flat:7", 1)]
    ch1 = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([0]))
    ch2 = CharacterCoords(1, np.zeros(2), np.zeros(21), np.array([1]))
    s1, s2 = sp.to_spark(ch1), sp.to_spark(ch2)
    with pytest.raises(NotASpark):
        sp.equivalence_certificate(s1, s2)


# ------------------------------------------------------------ torsion (RP2)


@pytest.fixture(scope="module")
def rp2_space(rp2_complex):
    from simchar.complexes import perturbed_subdivide

    pair = ComplexPair(rp2_complex, perturbed_subdivide(rp2_complex, 17, 0.1))
    return CharacterSpace(pair, 1)


def test_rp2_torsion_class_data(rp2_space):
    assert rp2_space.topology.tor_order_p1 == 2
    assert rp2_space.betti_p1 == 0


def test_rp2_torsion_lift_is_exactly_half_integral(rp2_space, rng):
    sp = rp2_space
    ch = CharacterCoords(1, np.zeros(0), np.zeros(15), np.zeros(0, dtype=int),
                         c_tor=(1,))
    # doubling a torsion character must annihilate every cycle value mod Z
    for _ in range(20):
        alpha = sp.random_cycle(rng)
        v = sp.evaluate(ch, alpha)
        assert circle_dist(2 * v) <= 1e-9
        # and the value itself is an exact half-integer
        assert min(abs(v - 0.0), abs(v - 0.5), abs(v - 1.0)) <= 1e-12


def test_rp2_spark_roundtrip_with_torsion(rp2_space, rng):
    sp = rp2_space
    for _ in range(10):
        ch = sp.random_character(rng)
        spark = sp.to_spark(ch)
        back = sp.from_spark(spark)
        assert back.c_tor == tuple(c % 2 for c in ch.c_tor)
        spark2 = sp.to_spark(back)
        _, _, resid = sp.equivalence_certificate(spark, spark2)
        assert resid <= 1e-9


def test_rp2_delta1_kernel_counts(rp2_space):
    # ker delta_1 is a torus of dimension b_1 = 0 plus Z/2; Hom(H_1, R/Z) has
    # the same dimension and order by universal coefficients
    from simchar.homology import cohomology, homology

    fine = rp2_space.pair.fine
    assert rp2_space.frame_p.harmonic_basis.shape[1] == 0
    assert cohomology(fine, 2, "Z").torsion_order == 2
    assert homology(fine, 1, "Z").torsion_order == 2


# --------------------------------------------------------------------- grid


def test_grid_checks_all_manifolds(catalog_pairs):
    for name in ("s1:3", "t2_flat:7", "s2_tetra:0"):
        pair = catalog_pairs[name]
        for p in (0, 1):
            space = CharacterSpace(pair, p)
            report = grid_check(space)
            assert report.passed
            for check_name, data in report.checks.items():
                if "alternating_dim_sum" in data:
                    assert data["alternating_dim_sum"] == 0


def test_grid_on_torsion_manifold(rp2_space):
    report = grid_check(rp2_space)
    assert report.passed
    assert report.nodes["H_int"]["torsion_order"] == 2


def test_from_spark_rejects_garbage(spaces, rng):
    from simchar.characters import SparkTriple

    sp = spaces[("t2_flat:7", 1)]
    fine = sp.pair.fine
    bad = SparkTriple(
        degree=1,
        a=rng.normal(size=fine.n_simplices(1)),
        e=np.zeros(sp.pair.base.n_simplices(2)),
        r=np.zeros(fine.n_simplices(2), dtype=np.int64),
    )
    with pytest.raises(NotASpark):
        sp.from_spark(bad)


def test_gs_ladder_left_corner(spaces, rng):
    # a closed real cochain a maps along the top row to the character
    # q . a|_Z and along the bottom row to the spark class [(a, 0, 0)]; the
    # square commutes: recovered coordinates evaluate like a on cycles
    from simchar.characters import SparkTriple, circle_dist

    sp = spaces[("t2_flat:7", 1)]
    fine = sp.pair.fine
    # closed fine cochain: harmonic-ish representative plus a coboundary
    a = sp.fine_rho_p @ np.array([0.35, -0.2])
    a = a + fine.coboundary_matrix(0).astype(float) @ rng.normal(
        size=fine.n_simplices(0)
    )
    spark = SparkTriple(
        degree=1, a=a,
        e=np.zeros(sp.pair.base.n_simplices(2)),
        r=np.zeros(fine.n_simplices(2), dtype=np.int64),
    )
    ch = sp.from_spark(spark)
    for _ in range(20):
        alpha = sp.random_cycle(rng)
        direct = float(a @ alpha)
        assert circle_dist(sp.evaluate(ch, alpha) - direct) <= 1e-9


def test_recovered_tau_lies_in_coexact_slab(spaces, rng):
    sp = spaces[("t2_flat:7", 1)]
    fr = sp.frame_p
    for _ in range(10):
        ch = sp.random_character(rng)
        back = sp.from_spark(sp.to_spark(ch))
        for tau in (ch.tau, back.tau):
            scale = max(np.abs(tau).max(), 1.0)
            assert np.abs(fr.proj_harmonic @ tau).max() <= 1e-9 * scale
            assert np.abs(fr.proj_im_d @ tau).max() <= 1e-9 * scale


def test_two_level_subdivision_pair(catalog_pairs, rng):
    # the embedded-subcomplex machinery accepts any iterated subdivision as
    # the fine side, not just a single refinement
    from simchar.complexes import perturbed_subdivide

    base = catalog_pairs["s1:3"].base
    mid = perturbed_subdivide(base, seed=41, scale=0.12)
    pair = ComplexPair(base, perturbed_subdivide(mid, seed=42, scale=0.12))
    rep = verify_model(pair, seed=41)
    assert rep.passed and rep.stokes_residual <= 1e-12
    space = CharacterSpace(pair, 0)
    assert grid_check(space).passed
    for _ in range(5):
        ch = space.random_character(rng)
        back = space.from_spark(space.to_spark(ch))
        assert np.array_equal(back.c_free, ch.c_free)


def test_top_degree_character_space(catalog_pairs, rng):
    # p = dim: torus of dimension b_n, empty class group, no fluctuations
    sp = CharacterSpace(catalog_pairs["t2_flat:7"], 2)
    assert (sp.betti_p, sp.betti_p1) == (1, 0)
    assert grid_check(sp).passed
    fund = sp.topology.cycles_p[:, 0]
    ch = CharacterCoords(2, np.array([0.25]),
                         np.zeros(sp.frame_p.gram.shape[0]),
                         np.zeros(0, dtype=int))
    assert sp.evaluate(ch, fund) == pytest.approx(0.25, abs=1e-10)
    for _ in range(5):
        c = sp.random_character(rng)
        back = sp.from_spark(sp.to_spark(c))
        assert circle_dist(back.z[0] - c.z[0]) <= 1e-9
