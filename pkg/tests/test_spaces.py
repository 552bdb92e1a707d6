"""Geometry layer: spaces, geodesics, comparison gaps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geofrac.errors import DomainError, SpaceMismatchError
from geofrac.spaces import (busemann_gap, busemann_gap_batch, cn_gap,
                            cn_gap_batch, comparison_gap,
                            comparison_gap_batch, distance, euclidean,
                            four_point_gap, four_point_gap_batch,
                            geodesic_point, geodesic_restrict, Geodesic,
                            half_plane, product, random_geodesic,
                            random_point, sample_points, spider, sturm_gap,
                            sturm_gap_batch)

E2 = euclidean(2)
H = half_plane()
S3 = spider(3)
PROD = product(euclidean(2), half_plane())
ALL_SPACES = [E2, H, S3, PROD]


def _prod_point(xy, hp):
    return PROD.point((xy, hp))


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def test_euclidean_distance_is_exact():
    assert distance(E2.point(0.0, 0.0), E2.point(3.0, 4.0)) == 5.0


def test_half_plane_vertical_distance_is_log_ratio():
    d = distance(H.point(0.0, 1.0), H.point(0.0, 2.0))
    assert d == pytest.approx(math.log(2.0), rel=1e-14)


def test_half_plane_symmetric_arc_distance():
    # endpoints (-1, 1), (1, 1) lie on the circle x^2 + y^2 = 2
    d = distance(H.point(-1.0, 1.0), H.point(1.0, 1.0))
    assert d == pytest.approx(math.acosh(3.0), rel=1e-14)


def test_spider_distances():
    assert distance(S3.point(0, 1.0), S3.point(0, 3.0)) == 2.0
    assert distance(S3.point(0, 1.0), S3.point(1, 2.0)) == 3.0
    assert distance(S3.point(2, 0.0), S3.point(1, 2.0)) == 2.0
    # hub is the same point regardless of ray label
    assert distance(S3.point(0, 0.0), S3.point(2, 0.0)) == 0.0


def test_product_distance_adds_in_squares():
    p = _prod_point((0.0, 0.0), (0.0, 1.0))
    q = _prod_point((3.0, 4.0), (0.0, 2.0))
    expected = math.hypot(5.0, math.log(2.0))
    assert distance(p, q) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2), st.floats(0.0, 5.0), st.integers(0, 2),
       st.floats(0.0, 5.0), st.integers(0, 2), st.floats(0.0, 5.0))
def test_spider_metric_axioms(r1, a, r2, b, r3, c):
    x, y, z = S3.point(r1, a), S3.point(r2, b), S3.point(r3, c)
    dxy = distance(x, y)
    assert dxy == distance(y, x)
    assert dxy >= 0.0
    assert dxy <= distance(x, z) + distance(z, y) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(-3.0, 3.0), st.floats(0.1, 5.0),
       st.floats(-3.0, 3.0), st.floats(0.1, 5.0))
def test_half_plane_metric_symmetry(x1, y1, x2, y2):
    p, q = H.point(x1, y1), H.point(x2, y2)
    assert distance(p, q) == pytest.approx(distance(q, p), abs=1e-13)
    if (x1, y1) != (x2, y2):
        assert distance(p, q) >= 0.0


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------


def test_euclidean_geodesic_is_affine():
    g = Geodesic(E2.point(0.0, 0.0), E2.point(2.0, 4.0))
    assert np.allclose(g.eval(0.25).coords, [0.5, 1.0], atol=1e-15)
    assert g.length == pytest.approx(math.sqrt(20.0), rel=1e-15)


def test_geodesic_endpoints_are_exact():
    for space in ALL_SPACES:
        rng = np.random.default_rng(5)
        for _ in range(5):
            g = random_geodesic(space, rng)
            assert g.eval(0.0) is g.start
            assert g.eval(1.0) is g.end


def test_half_plane_vertical_midpoint():
    g = Geodesic(H.point(0.0, 1.0), H.point(0.0, 4.0))
    mid = g.eval(0.5)
    assert mid.coords[0] == 0.0
    assert mid.coords[1] == pytest.approx(2.0, rel=1e-14)


def test_half_plane_arc_midpoint_is_circle_apex():
    g = Geodesic(H.point(-1.0, 1.0), H.point(1.0, 1.0))
    mid = g.eval(0.5)
    assert mid.coords[0] == pytest.approx(0.0, abs=1e-14)
    assert mid.coords[1] == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_half_plane_geodesic_traces_orthogonal_circle():
    g = Geodesic(H.point(-1.0, 1.0), H.point(1.0, 1.0))
    xs, ys = g.eval_batch(np.linspace(0.0, 1.0, 33)).T
    assert np.max(np.abs(xs * xs + ys * ys - 2.0)) < 1e-12


def test_near_vertical_pair_uses_stable_branch():
    g = Geodesic(H.point(1e-16, 1.0), H.point(0.0, 2.0))
    mid = g.eval(0.5)
    assert abs(mid.coords[0]) < 1e-15
    assert mid.coords[1] == pytest.approx(math.sqrt(2.0), rel=1e-13)


def test_spider_geodesic_passes_through_hub():
    g = Geodesic(S3.point(0, 1.0), S3.point(1, 2.0))
    ray, rad = g.eval(1.0 / 3.0).coords
    assert rad == pytest.approx(0.0, abs=1e-15)
    ray, rad = g.eval(0.5).coords
    assert (ray, rad) == (1, pytest.approx(0.5, rel=1e-12))


def test_spider_geodesic_from_hub_lies_on_target_ray():
    g = Geodesic(S3.point(2, 0.0), S3.point(1, 2.0))
    ray, rad = g.eval(0.25).coords
    assert ray == 1
    assert rad == pytest.approx(0.5, rel=1e-14)


def test_constant_speed_on_random_geodesics():
    ts = np.linspace(0.0, 1.0, 17)
    for space in ALL_SPACES:
        rng = np.random.default_rng(11)
        for _ in range(10):
            g = random_geodesic(space, rng, min_length=1e-3)
            pts = [g.eval(t) for t in ts]
            steps = [distance(pts[i], pts[i + 1]) for i in range(16)]
            assert np.allclose(steps, g.length / 16.0, atol=1e-9 * (1 + g.length))


def test_geodesic_point_matches_eval():
    p, q = H.point(0.5, 1.0), H.point(3.0, 0.25)
    g = Geodesic(p, q)
    for t in (0.0, 0.3, 0.75, 1.0):
        a = geodesic_point(p, q, t)
        b = g.eval(t)
        assert distance(a, b) < 1e-13


def test_restrict_matches_parent_parametrization():
    for space in ALL_SPACES:
        rng = np.random.default_rng(23)
        g = random_geodesic(space, rng, min_length=1e-2)
        sub = geodesic_restrict(g, 0.2, 0.7)
        for lam in (0.0, 0.25, 0.5, 0.8, 1.0):
            expected = g.eval(0.2 + 0.5 * lam)
            assert distance(sub.eval(lam), expected) < 1e-12


def test_restrict_of_restrict():
    g = Geodesic(H.point(-2.0, 0.5), H.point(4.0, 3.0))
    sub = g.restrict(0.1, 0.9).restrict(0.5, 1.0)
    assert distance(sub.eval(0.0), g.eval(0.5)) < 1e-12
    assert distance(sub.eval(1.0), g.eval(0.9)) < 1e-12


def test_eval_batch_layouts():
    ts = np.array([0.0, 0.5, 1.0])
    g = Geodesic(E2.point(0.0, 0.0), E2.point(1.0, 0.0))
    assert g.eval_batch(ts).shape == (3, 2)
    g = Geodesic(S3.point(0, 1.0), S3.point(1, 1.0))
    rays, rads = g.eval_batch(ts)
    assert rays.shape == (3,) and rads.shape == (3,)
    g = Geodesic(_prod_point((0.0, 0.0), (0.0, 1.0)),
                 _prod_point((1.0, 0.0), (0.0, 2.0)))
    left, right = g.eval_batch(ts)
    assert left.shape == (3, 2) and right.shape == (3, 2)


# ---------------------------------------------------------------------------
# comparison gaps
# ---------------------------------------------------------------------------


def test_cn_gap_vanishes_in_euclidean():
    rng = np.random.default_rng(3)
    P, X, Y = (sample_points(E2, 200, rng) for _ in range(3))
    gaps = cn_gap_batch(E2, P, X, Y)
    assert np.max(np.abs(gaps)) < 1e-9


def test_cn_gap_spider_tripod():
    gap = cn_gap(S3.point(0, 1.0), S3.point(1, 1.0), S3.point(2, 1.0))
    assert gap == pytest.approx(2.0, rel=1e-12)


def test_busemann_gap_from_hub_is_zero():
    gap = busemann_gap(S3.point(0, 0.0), S3.point(1, 2.0), S3.point(2, 2.0))
    assert gap == pytest.approx(0.0, abs=1e-12)


def test_busemann_gap_spider_positive_case():
    gap = busemann_gap(S3.point(2, 1.0), S3.point(0, 2.0), S3.point(1, 2.0))
    assert gap == pytest.approx(2.0, rel=1e-12)


def test_comparison_gap_vanishes_in_euclidean():
    rng = np.random.default_rng(17)
    P, X0, X1 = (sample_points(E2, 200, rng) for _ in range(3))
    t = rng.uniform(0.0, 1.0, 200)
    gaps = comparison_gap_batch(E2, P, X0, X1, t)
    assert np.max(np.abs(gaps)) < 1e-9


def test_sturm_gap_zero_for_parallel_translates():
    g1 = Geodesic(E2.point(0.0, 0.0), E2.point(1.0, 0.0))
    g2 = Geodesic(E2.point(0.0, 1.0), E2.point(1.0, 1.0))
    for t in (0.0, 0.25, 0.5, 0.9, 1.0):
        assert sturm_gap(g1, g2, t) == pytest.approx(0.0, abs=1e-12)


def test_gaps_nonnegative_on_random_batches():
    n = 400
    for space in ALL_SPACES:
        rng = np.random.default_rng(41)
        A, B, C, D = (sample_points(space, n, rng) for _ in range(4))
        t = rng.uniform(0.0, 1.0, n)
        assert np.min(cn_gap_batch(space, A, B, C)) > -1e-9
        assert np.min(busemann_gap_batch(space, A, B, C)) > -1e-9
        assert np.min(comparison_gap_batch(space, A, B, C, t)) > -1e-9
        assert np.min(four_point_gap_batch(space, A, B, C, D, t)) > -1e-9
        assert np.min(sturm_gap_batch(space, A, B, C, D, t)) > -1e-9


def test_scalar_gap_wrappers_match_batch():
    rng = np.random.default_rng(9)
    p, x, y, z = (random_point(H, rng) for _ in range(4))
    stacked = [H._stack([q.coords]) for q in (p, x, y, z)]
    assert cn_gap(p, x, y) == pytest.approx(
        float(cn_gap_batch(H, *stacked[:3])[0]), rel=1e-12)
    assert four_point_gap(p, x, y, z, 0.3) == pytest.approx(
        float(four_point_gap_batch(H, *stacked, 0.3)[0]), rel=1e-12)


def test_sturm_gap_on_restricted_geodesics():
    rng = np.random.default_rng(31)
    g1 = random_geodesic(H, rng, min_length=0.1).restrict(0.1, 0.8)
    g2 = random_geodesic(H, rng, min_length=0.1)
    for t in (0.2, 0.5, 0.7):
        assert sturm_gap(g1, g2, t) > -1e-9


# ---------------------------------------------------------------------------
# sampling, serialization, errors
# ---------------------------------------------------------------------------


def test_sampling_is_deterministic_per_seed():
    for space in ALL_SPACES:
        a = sample_points(space, 7, np.random.default_rng(2))
        b = sample_points(space, 7, np.random.default_rng(2))
        pa = space._single(a, 3)
        pb = space._single(b, 3)
        assert distance(space.point(pa), space.point(pb)) == 0.0


def test_point_serialization_round_trip():
    p = E2.point(1.0, -2.5)
    assert p.to_dict() == {"space": "euclidean(2)", "coords": [1.0, -2.5]}
    s = S3.point(2, 1.5)
    assert s.to_dict() == {"space": "spider(3)", "coords": [2, 1.5]}
    pr = _prod_point((0.0, 1.0), (2.0, 3.0))
    d = pr.to_dict()
    assert d["space"] == "product(euclidean(2),half_plane)"
    assert d["coords"] == [[0.0, 1.0], [2.0, 3.0]]


def test_space_equality_and_names():
    assert euclidean(2) == euclidean(2)
    assert euclidean(2) != euclidean(3)
    assert spider(3) != half_plane()
    assert product(euclidean(2), spider(3)).name == "product(euclidean(2),spider(3))"


def test_invalid_points_rejected():
    with pytest.raises(DomainError):
        H.point(0.0, 0.0)
    with pytest.raises(DomainError):
        H.point(0.0, -1.0)
    with pytest.raises(DomainError):
        E2.point(1.0)
    with pytest.raises(DomainError):
        E2.point(np.nan, 0.0)
    with pytest.raises(DomainError):
        S3.point(3, 1.0)
    with pytest.raises(DomainError):
        S3.point(0, -0.5)
    with pytest.raises(DomainError):
        S3.point(0.5, 1.0)
    with pytest.raises(DomainError):
        euclidean(9)
    with pytest.raises(DomainError):
        spider(1)


def test_space_mismatch_rejected():
    p = E2.point(0.0, 0.0)
    q = euclidean(3).point(0.0, 0.0, 0.0)
    with pytest.raises(SpaceMismatchError):
        distance(p, q)
    with pytest.raises(SpaceMismatchError):
        Geodesic(p, q)
    with pytest.raises(SpaceMismatchError):
        cn_gap(p, p, q)


def test_parameter_domain_checks():
    g = Geodesic(E2.point(0.0, 0.0), E2.point(1.0, 0.0))
    with pytest.raises(DomainError):
        g.eval(1.5)
    with pytest.raises(DomainError):
        g.eval(-0.1)
    with pytest.raises(DomainError):
        g.restrict(0.5, 0.5)
    with pytest.raises(DomainError):
        g.restrict(-0.1, 0.5)
    with pytest.raises(DomainError):
        g.eval_batch([0.0, 2.0])
    with pytest.raises(DomainError):
        comparison_gap(g.start, g.start, g.end, 1.2)
