import json

import numpy as np
import pytest

from jsrforge import constants as C
from jsrforge.mat2 import evaluate_word, jsr_bounds, spectral_radius
from jsrforge.polytope import (
    Certificate,
    NotCertifiable,
    Polygon,
    VertexGraph,
    balancing_search,
    balancing_window,
    barabanov_polar_check,
    build_polytope,
    certify,
    certify_complex,
    check_convex_position,
    check_images,
    convex_hull,
    cycle_word,
    leading_eigenvector,
    polar,
    polytope_norm,
    recurrent_cycles,
    uniqueness_check,
)

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture(scope="module")
def ref_cert():
    return certify(C.A0, C.B0, C.SMP_PAIR, ratios=[1.0, C.BALANCING_RATIO])


def square():
    return Polygon.from_half([[1.0, 1.0], [-1.0, 1.0]])


def test_convex_hull_drops_interior_and_collinear():
    pts = np.array([[0, 0], [1, 0], [2, 0], [2, 2], [0, 2], [1, 1]], dtype=float)
    idx = convex_hull(pts, tol=1e-12)
    assert sorted(idx) == [0, 2, 3, 4]


def test_square_geometry():
    sq = square()
    assert check_convex_position(sq) == (True, pytest.approx(90.0))
    assert sq.gauge([0.5, 0.0]) == pytest.approx(0.5)
    assert sq.gauge([2.0, 2.0]) == pytest.approx(2.0)
    assert sq.boundary_distance([0.0, 0.0]) == pytest.approx(1.0)
    assert sq.boundary_distance([2.0, 0.0]) == pytest.approx(-1.0)
    k, a, b = sq.locate(np.array([0.5, 0.9]))
    np.testing.assert_allclose(a * sq.vertices[k] + b * sq.vertices[(k + 1) % 4], [0.5, 0.9])


def test_polar_of_square_is_diamond():
    d = polar(square())
    assert d.gauge([1.0, 0.0]) == pytest.approx(1.0)
    assert d.gauge([0.5, 0.5]) == pytest.approx(1.0)


def test_collinear_polygon_rejected():
    flat = Polygon.from_half([[1.0, 0.0], [2.0, 0.0]])
    assert flat.is_degenerate()
    with pytest.raises(ValueError):
        polytope_norm(flat, np.eye(2))


def test_polytope_norm_of_rotation_on_square():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert polytope_norm(square(), rot) == pytest.approx(1.0)
    assert polytope_norm(square(), 0.5 * np.eye(2)) == pytest.approx(0.5)


def test_leading_eigenvector():
    v = leading_eigenvector(np.array([[2.0, 1.0], [0.0, 1.0]]))
    np.testing.assert_allclose(v, [1.0, 0.0])
    with pytest.raises(NotCertifiable):
        leading_eigenvector(np.array([[0.0, -1.0], [1.0, 0.0]]))
    with pytest.raises(NotCertifiable):
        leading_eigenvector(np.eye(2))


def test_ref_certificate(ref_cert):
    c = ref_cert
    assert c.verdict == "certified-unique-pair"
    assert c.unique
    assert c.n_vertices == C.POLYGON_VERTICES
    assert c.dominant_eigenvalue == pytest.approx(C.DOMINANT_EIGENVALUE, abs=5e-5)
    assert c.min_interior_margin == pytest.approx(C.MIN_INTERIOR_MARGIN, rel=0.3)
    assert c.max_interior_angle == pytest.approx(C.MAX_INTERIOR_ANGLE_DEG, abs=0.5)
    rho = spectral_radius(evaluate_word("aababb", c.A, c.B))
    assert rho == pytest.approx(1.0, abs=1e-9)


def test_reference_seed_vectors(ref_cert):
    seeds = [np.array(s) for s in ref_cert.graph.seeds]
    assert np.linalg.norm(seeds[0]) == pytest.approx(1.0)
    assert np.linalg.norm(seeds[1]) == pytest.approx(C.BALANCING_RATIO)
    for got, want in zip(seeds, C.SEED_VECTORS):
        # given to five digits, up to the sign of the eigenvector
        assert min(np.abs(got - want).max(), np.abs(got + want).max()) < 2e-5


def test_reference_graph_structure(ref_cert):
    g = ref_cert.graph
    assert len(g.edges) == 16
    cycles = recurrent_cycles(g)
    words = sorted(cycle_word(c) for c in cycles)
    assert len(cycles) == 2
    assert all(len(w) == 6 for w in words)
    assert uniqueness_check(g, C.SMP_PAIR)


def test_check_images_recomputes_same_edges(ref_cert):
    chk = check_images(ref_cert.polygon, ref_cert.A, ref_cert.B, ref_cert.graph)
    assert chk.ok
    assert set(chk.edges) == set(ref_cert.graph.edges)


def test_certificate_json_round_trip(ref_cert):
    doc = json.loads(json.dumps(ref_cert.to_json()))
    back = Certificate.from_json(doc)
    assert back.verdict == ref_cert.verdict
    np.testing.assert_allclose(back.polygon.vertices, ref_cert.polygon.vertices)
    assert back.graph == ref_cert.graph
    assert VertexGraph.from_json(ref_cert.graph.to_json()) == ref_cert.graph


def test_balancing_window_contains_reference_ratio():
    s = spectral_radius(evaluate_word("aababb", C.A0, C.B0)) ** (1 / 6)
    A, B = C.A0 / s, C.B0 / s
    g = balancing_window(A, B, C.SMP_PAIR)
    lo, hi = g[0][1], 1 / g[1][0]
    assert lo < C.BALANCING_RATIO < hi
    r = balancing_search(A, B, C.SMP_PAIR)[1]
    assert lo < r < hi
    assert abs(r - C.BALANCING_RATIO) < 0.01


def test_balancing_symmetric_pair_gives_one():
    A = np.array([[1.0, 0.3], [0.0, 0.4]])
    B = SWAP @ A @ SWAP
    assert balancing_search(A, B, ["a", "b"]) == pytest.approx([1.0, 1.0])
    c = certify(A, B, ["a", "b"], balancing="margin")
    assert c.certified
    assert c.balancing_ratio == pytest.approx(1.0, abs=1e-3)


def test_single_cycle_needs_no_balancing():
    assert balancing_search(C.A0, C.B0, ["aababb"]) == [1.0]


def test_ratio_outside_window_fails():
    s = spectral_radius(evaluate_word("aababb", C.A0, C.B0)) ** (1 / 6)
    with pytest.raises(NotCertifiable):
        build_polytope(C.A0 / s, C.B0 / s, C.SMP_PAIR, [1.0, 0.7], budget=60)


def test_runner_up_takes_over_after_perturbation():
    B1 = C.B0.copy()
    B1[1, 0] += C.RUNNER_UP_SHIFT_B21
    pair = certify(C.A0, B1, C.SMP_PAIR)
    assert pair.verdict == "failed"
    alone = certify(C.A0, B1, [C.RUNNER_UP_WORD])
    assert alone.certified and alone.unique


def test_one_member_of_chiral_pair_is_not_enough():
    # the mirror product also has spectral radius 1, so its orbit cannot sit strictly inside
    c = certify(C.A0, C.B0, ["aababb"])
    assert c.verdict == "failed"


@pytest.mark.parametrize(
    "cands, reason",
    [([], "no candidate"), (["abab"], "not primitive"), (["ab", "ba"], "repeat"), (["abc"], "invalid")],
)
def test_certify_rejects_bad_candidates(cands, reason):
    c = certify(C.A0, C.B0, cands)
    assert c.verdict == "failed"
    assert reason in c.reason


def test_certify_rejects_non_smp():
    c = certify(C.A0, C.B0, ["ab"])
    assert c.verdict == "failed"


def test_barabanov_residual_small(ref_cert):
    assert barabanov_polar_check(ref_cert.polygon, ref_cert.A, ref_cert.B) < 1e-9


def test_complex_perturbations(ref_cert):
    rng = np.random.default_rng(11)

    def kick(eps):
        return eps * np.exp(2j * np.pi * rng.random((2, 2)))

    assert certify_complex(C.A0, C.B0, ref_cert)
    assert all(certify_complex(C.A0 + kick(1e-6), C.B0 + kick(1e-6), ref_cert) for _ in range(10))
    assert not certify_complex(C.A0 + kick(1e-1), C.B0 + kick(1e-1), ref_cert)


def test_complex_needs_certified_base():
    failed = certify(C.A0, C.B0, ["ab"])
    assert not certify_complex(C.A0, C.B0, failed)


def test_nearby_ratios_give_different_barabanov_polars():
    certs = [certify(C.A0, C.B0, C.SMP_PAIR, ratios=[1.0, r]) for r in (0.882, 0.886)]
    assert all(c.certified for c in certs)
    for c in certs:
        assert barabanov_polar_check(c.polygon, c.A, c.B) < 1e-9
    p, q = (polar(c.polygon) for c in certs)
    # homothetic symmetric polygons have proportional gauges
    dirs = np.stack([np.cos(np.linspace(0, np.pi, 50)), np.sin(np.linspace(0, np.pi, 50))], axis=1)
    ratio = p.gauge(dirs) / q.gauge(dirs)
    assert np.ptp(ratio) > 1e-6


def test_centred_log_ratios_three_cycles():
    from jsrforge.polytope import _centred_log_ratios

    g = [[1.0, 0.5, 0.8], [1.2, 1.0, 0.9], [0.7, 0.6, 1.0]]
    x = _centred_log_ratios(g)
    assert x[0] == 0.0
    r = np.exp(x)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert r[j] / r[i] > g[i][j]
    # r_1 / r_0 > 2 and r_0 / r_1 > 0.6 cannot both hold
    assert _centred_log_ratios([[1.0, 2.0], [0.6, 1.0]]) is None


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_collinear_vertex_breaks_strict_convexity():
    poly = Polygon.from_half([[1.0, 1.0], [0.0, 1.0], [-1.0, 1.0]])
    ok, angle = check_convex_position(poly)
    assert not ok
    assert angle == pytest.approx(180.0)


def test_check_images_contraction_and_expansion():
    sq = square()
    R = 0.5 * rotation(np.pi / 4)
    res = check_images(sq, R, R)
    assert res.ok and res.min_margin > 0
    bad = check_images(sq, np.diag([2.0, 1.0]), np.eye(2) * 0.5)
    assert not bad.ok
    assert "outside" in bad.failure


def test_polytope_norm_examples():
    assert polytope_norm(square(), np.eye(2)) == pytest.approx(1.0)
    assert polytope_norm(square(), np.diag([3.0, 1.0])) == pytest.approx(3.0)


def test_polytope_norm_reference_generators(ref_cert):
    A, B = ref_cert.A, ref_cert.B
    assert polytope_norm(ref_cert.polygon, A) <= 1 + 1e-7
    assert polytope_norm(ref_cert.polygon, B) <= 1 + 1e-7


def test_barabanov_residual_for_rotation_on_regular_polygon():
    n = 12
    ang = np.pi * np.arange(n) / n
    poly = Polygon.from_half(np.column_stack([np.cos(ang), np.sin(ang)]))
    R = rotation(np.pi / n)
    assert barabanov_polar_check(poly, R, R) < 1e-12


def six_cycle_graph(word):
    # walk labels are read right to left by cycle_word, so store the word reversed
    labels = ["+" + ch.upper() for ch in reversed(word)]
    return VertexGraph(m=6, edges=tuple((i, labels[i], (i + 1) % 6) for i in range(6)))


def test_uniqueness_single_declared_cycle():
    g = six_cycle_graph("aababb")
    assert uniqueness_check(g, ["aababb"])
    assert not uniqueness_check(g, ["aabbab"])


def test_uniqueness_rejects_branching_recurrence():
    # node 0 sits on two different cycles: 0 -> 1 -> 0 and 0 -> 2 -> 0
    g = VertexGraph(m=3, edges=((0, "+A", 1), (1, "+B", 0), (0, "+B", 2), (2, "+B", 0)))
    assert not uniqueness_check(g, ["ab"])
    assert not uniqueness_check(g, ["ab", "bb"])


def test_certify_degenerate_examples():
    half = 0.5 * np.eye(2)
    assert certify(half, half, ["a"]).verdict == "failed"
    cert = certify(np.diag([2.0, 1.0]), np.diag([1.0, 2.0]), ["ab"])
    assert cert.verdict == "failed"


def test_certificate_stable_under_small_noise(ref_cert):
    rng = np.random.default_rng(11)
    for _ in range(3):
        dA, dB = rng.uniform(-1e-6, 1e-6, (2, 2, 2))
        cert = certify(C.A0 + dA, C.B0 + dB, C.SMP_PAIR)
        assert cert.verdict == ref_cert.verdict
        assert sorted(cert.smp_words) == sorted(ref_cert.smp_words)


def test_jsr_bounds_after_certification(ref_cert):
    A, B = ref_cert.A, ref_cert.B
    uppers = [jsr_bounds(A, B, k)[1] for k in (4, 6, 8)]
    assert uppers == sorted(uppers, reverse=True) and uppers[-1] >= 1 - 1e-12
    assert jsr_bounds(A, B, 6)[0] == pytest.approx(1.0, abs=1e-9)
