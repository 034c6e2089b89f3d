import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcone.cone import (
    Geodesic,
    TangentAt,
    congruence,
    congruence_tangent,
    distance,
    exp_point,
    geodesic_eval,
    log_point,
    midpoint,
    tangent_norm,
    transport,
)
from pcone.errors import BaseMismatch, DimensionMismatch, NotPositiveDefinite, Singular
from pcone.linalg import entry_norm, expm, logm
from pcone.sampling import (
    random_hermitian,
    random_invertible,
    random_posdef,
    random_tangent,
    random_unitary,
    rng_for,
)

PS = (1, 1.5, 2, 3, math.inf)
A14 = np.diag([1.0, 4.0])
A41 = np.diag([4.0, 1.0])


def test_diagonal_pair_distances():
    ln4 = math.log(4)
    assert distance(A14, A41, 2) == pytest.approx(math.sqrt(2) * ln4, rel=1e-14)
    assert distance(A14, A41, math.inf) == pytest.approx(ln4, rel=1e-14)
    assert distance(A14, A41, 1) == pytest.approx(2 * ln4, rel=1e-14)
    assert distance(A14, A14, 2) == pytest.approx(0.0, abs=1e-15)
    assert round(distance(A14, A41, 2), 4) == 1.9605


def test_diagonal_midpoint():
    np.testing.assert_allclose(geodesic_eval(Geodesic(A14, A41), 0.5), 2 * np.eye(2), atol=1e-14)


def test_geodesic_endpoints_and_identity_base(rng):
    a, b = random_posdef(rng, 4, 1.5), random_posdef(rng, 4, 1.5)
    geo = Geodesic(a, b)
    assert entry_norm(geo(0.0) - a) <= 1e-10 * entry_norm(a)
    assert entry_norm(geo(1.0) - b) <= 1e-10 * entry_norm(b)
    assert geo.length(2) == pytest.approx(distance(a, b, 2), rel=1e-9)
    t = 0.3
    I = np.eye(4)
    np.testing.assert_allclose(Geodesic(I, b)(t), expm(t * logm(b)), atol=1e-12)


def test_geodesic_is_complete(rng):
    a, b = random_posdef(rng, 3), random_posdef(rng, 3)
    for t in (-3.0, 2.5):
        assert np.all(np.linalg.eigvalsh(Geodesic(a, b)(t)) > 0)
        assert distance(a, Geodesic(a, b)(t), 2) == pytest.approx(abs(t) * distance(a, b, 2), rel=1e-9)


def test_reversal(rng):
    a, b = random_posdef(rng, 4), random_posdef(rng, 4)
    for t in (0.0, 0.2, 0.7, 1.0):
        assert entry_norm(Geodesic(a, b)(t) - Geodesic(b, a)(1 - t)) <= 1e-10
    assert entry_norm(Geodesic(a, b).reversed()(0.25) - Geodesic(a, b)(0.75)) <= 1e-10


def test_midpoint_halves_distance(rng):
    a, b = random_posdef(rng, 5, 2.0), random_posdef(rng, 5, 2.0)
    m = midpoint(a, b)
    for p in PS:
        d = distance(a, b, p)
        assert distance(a, m, p) == pytest.approx(d / 2, abs=1e-9)
        assert distance(m, b, p) == pytest.approx(d / 2, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(PS))
def test_metric_axioms(seed, p):
    rng = rng_for(seed)
    a, b, c = (random_posdef(rng, 3, 2.0) for _ in range(3))
    dab = distance(a, b, p)
    assert abs(dab - distance(b, a, p)) <= 1e-10 * (1 + dab)
    assert distance(a, c, p) <= dab + distance(b, c, p) + 1e-9


def test_exp_point_examples():
    x = np.diag([4.0, 9.0])
    v = TangentAt(x, np.diag([4 * math.log(2), 0.0]))
    # x^{-1/2} v x^{-1/2} = diag(ln 2, 0), so exp_x(v) = x diag(2, 1)
    np.testing.assert_allclose(exp_point(x, v), np.diag([8.0, 9.0]), atol=1e-13)
    np.testing.assert_allclose(exp_point(x, TangentAt(x, np.zeros((2, 2)))), x, atol=1e-14)
    w = random_hermitian(rng_for(9), 3)
    I = np.eye(3)
    np.testing.assert_allclose(exp_point(I, TangentAt(I, w)), expm(w), atol=1e-13)


def test_exp_log_inverse_both_ways(rng):
    x, y = random_posdef(rng, 4, 1.5), random_posdef(rng, 4, 1.5)
    assert entry_norm(exp_point(x, log_point(x, y)) - y) <= 1e-9 * entry_norm(y)
    v = random_tangent(rng, x)
    assert entry_norm(log_point(x, exp_point(x, v)).u - v.u) <= 1e-9 * max(1, entry_norm(v.u))
    assert entry_norm(log_point(x, x).u) <= 1e-13
    np.testing.assert_allclose(log_point(np.eye(4), y).u, logm(y), atol=1e-12)


def test_log_norm_is_distance(rng):
    x, y = random_posdef(rng, 4, 1.5), random_posdef(rng, 4, 1.5)
    for p in PS:
        assert tangent_norm(log_point(x, y), p) == pytest.approx(distance(x, y, p), rel=1e-10)
        v = random_tangent(rng, x)
        assert distance(x, exp_point(x, v), p) == pytest.approx(v.norm(p), rel=1e-9)


def test_base_mismatch(rng):
    x, y = random_posdef(rng, 3), random_posdef(rng, 3)
    v = random_tangent(rng, x)
    with pytest.raises(BaseMismatch):
        exp_point(y, v)
    with pytest.raises(BaseMismatch):
        v + random_tangent(rng, y)
    with pytest.raises(DimensionMismatch):
        TangentAt(x, np.eye(2))


def test_tangent_arithmetic(rng):
    x = random_posdef(rng, 3)
    v, w = random_tangent(rng, x), random_tangent(rng, x)
    np.testing.assert_allclose((2.0 * v - w).u, 2 * v.u - w.u)
    assert (v * 0.0).norm(2) == 0.0


def test_transport_identity_base(rng):
    v, w = random_hermitian(rng, 3), random_hermitian(rng, 3)
    I = np.eye(3)
    geo = Geodesic(I, expm(v))
    h = expm(v / 2)
    np.testing.assert_allclose(transport(geo, TangentAt(I, w)).u, h @ w @ h, atol=1e-12)


def test_transport_carries_velocity(rng):
    a, b = random_posdef(rng, 4), random_posdef(rng, 4)
    geo = Geodesic(a, b)
    moved = transport(geo, geo.velocity(0.0))
    eps = 1e-5
    fd = (geo(1 + eps) - geo(1 - eps)) / (2 * eps)
    assert entry_norm(moved.u - fd) <= 1e-6 * max(1.0, entry_norm(fd))
    assert np.array_equal(moved.base, geo.b)


def test_transport_isometric_and_linear():
    rng = rng_for(77)
    for _ in range(200):
        a, b = random_posdef(rng, 3, 1.5), random_posdef(rng, 3, 1.5)
        geo = Geodesic(a, b)
        u, w = random_tangent(rng, a), random_tangent(rng, a)
        tu = transport(geo, u)
        for p in (1, 2, 3, math.inf):
            assert tu.norm(p) == pytest.approx(u.norm(p), rel=1e-9)
    lin = transport(geo, 2.0 * u + w).u - (2.0 * tu.u + transport(geo, w).u)
    assert entry_norm(lin) <= 1e-10


def test_congruence_examples(rng):
    x = random_posdef(rng, 3)
    np.testing.assert_allclose(congruence(np.eye(3), x), x)
    u = random_unitary(rng, 3)
    np.testing.assert_allclose(congruence(u, np.eye(3)), np.eye(3), atol=1e-14)
    with pytest.raises(Singular):
        congruence(np.zeros((3, 3)), x)


def test_congruence_isometry(rng):
    x, y = random_posdef(rng, 4, 1.5), random_posdef(rng, 4, 1.5)
    g = random_invertible(rng, 4)
    v = random_tangent(rng, x)
    gv = congruence_tangent(g, v)
    for p in PS:
        assert distance(congruence(g, x), congruence(g, y), p) == pytest.approx(distance(x, y, p), rel=1e-9)
        assert gv.norm(p) == pytest.approx(v.norm(p), rel=1e-9)


def test_geodesic_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        Geodesic(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(DimensionMismatch):
        distance(np.eye(2), np.eye(3), 2)
