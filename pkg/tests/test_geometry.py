"""Core geometry: moments, inertia operators, eigendecomposition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confocalfit import (
    FlatSubspace,
    Hyperplane,
    SymmetricOperator,
    WeightedPointSet,
    axial_moment,
    centroid,
    directional_moment,
    hyperplanar_moment,
    inertia_operator,
    l_planar_moment,
    symmetric_eigen,
)
from confocalfit.errors import DirectionParallel, NotSymmetric

from conftest import gram_moment, random_point_set, random_unit_vector


# ---------------------------------------------------------------------------
# centroid
# ---------------------------------------------------------------------------

def test_centroid_cells(cells):
    assert np.allclose(centroid(cells), [12.7374, 3.5748], atol=1e-10)


def test_centroid_forbes(forbes):
    assert np.allclose(centroid(forbes), [202.9529, 25.05882], rtol=1e-6)


def test_centroid_single_point():
    ps = WeightedPointSet(np.array([[5.0, 7.0]]), np.array([3.0]))
    assert np.allclose(centroid(ps), [5.0, 7.0])


def test_centroid_matches_weighted_mean():
    rng = np.random.default_rng(0)
    ps = random_point_set(rng, 3)
    expected = np.average(ps.coords, axis=0, weights=ps.masses)
    assert np.allclose(centroid(ps), expected)


# ---------------------------------------------------------------------------
# inertia operator
# ---------------------------------------------------------------------------

def test_inertia_operator_cells(cells):
    op = inertia_operator(cells, centroid(cells)).entries
    assert op[0, 0] == pytest.approx(47.7937, rel=1e-5)
    assert op[1, 1] == pytest.approx(18.1021, rel=1e-5)
    assert op[0, 1] == pytest.approx(28.6318, rel=1e-5)


def test_inertia_operator_forbes(forbes):
    op = inertia_operator(forbes, centroid(forbes)).entries
    assert op[0, 0] == pytest.approx(530.78235, rel=1e-6)
    assert op[1, 1] == pytest.approx(145.93778, rel=1e-6)
    assert op[0, 1] == pytest.approx(277.54206, rel=1e-6)


def test_inertia_operator_shift_identity():
    # A(P) = A(C) + m (C-P)(C-P)^T, checked against direct summation
    rng = np.random.default_rng(1)
    ps = random_point_set(rng, 4)
    c = centroid(ps)
    p = rng.normal(size=4) * 3
    direct = np.zeros((4, 4))
    for point, mass in zip(ps.coords, ps.masses):
        direct += mass * np.outer(point - p, point - p)
    shifted = inertia_operator(ps, c).entries + ps.total_mass * np.outer(c - p, c - p)
    assert np.allclose(inertia_operator(ps, p).entries, direct)
    assert np.allclose(shifted, direct, rtol=1e-12, atol=1e-9 * np.abs(direct).max())


# ---------------------------------------------------------------------------
# hyperplanar moment
# ---------------------------------------------------------------------------

def test_hyperplanar_moment_cells_best_line(cells):
    eig = symmetric_eigen(inertia_operator(cells, centroid(cells)))
    plane = Hyperplane.through(centroid(cells), eig.vectors[:, 0])
    assert hyperplanar_moment(cells, plane) == pytest.approx(0.69605, rel=1e-5)


def test_hyperplanar_moment_coplanar_zero():
    pts = np.array([[1.0, 2.0, 3.0], [2.0, 3.0, 4.0], [0.0, 1.0, 2.0], [5.0, 0.5, -3.5]])
    plane = Hyperplane(np.array([1.0, 1.0, -1.0]), 0.7)
    on_plane = pts - np.outer(plane.signed_distance(pts), plane.normal)
    ps = WeightedPointSet(on_plane)
    assert hyperplanar_moment(ps, plane) == pytest.approx(0.0, abs=1e-18)


def test_hyperplanar_moment_equals_quadratic_form():
    rng = np.random.default_rng(2)
    ps = random_point_set(rng, 3)
    plane = Hyperplane(random_unit_vector(rng, 3), rng.normal())
    origin = plane.offset * plane.normal  # closest point of the plane to 0
    op = inertia_operator(ps, origin)
    assert hyperplanar_moment(ps, plane) == pytest.approx(
        op.quadratic_form(plane.normal), rel=1e-12
    )


# ---------------------------------------------------------------------------
# l-planar and axial moments
# ---------------------------------------------------------------------------

def test_l_planar_moment_principal_flats():
    rng = np.random.default_rng(3)
    ps = random_point_set(rng, 4)
    c = centroid(ps)
    eig = symmetric_eigen(inertia_operator(ps, c))
    # coordinate flat spanned by axes (i1..il) leaves the complementary J's
    for axes in [(0,), (3,), (0, 1), (1, 3), (0, 2, 3)]:
        flat = FlatSubspace(c, eig.vectors[:, list(axes)])
        expected = eig.values[[i for i in range(4) if i not in axes]].sum()
        assert l_planar_moment(ps, flat) == pytest.approx(expected, rel=1e-10)


def test_l_planar_moment_containing_flat_is_zero():
    rng = np.random.default_rng(4)
    basis, _ = np.linalg.qr(rng.normal(size=(4, 2)))
    base = rng.normal(size=4)
    coeffs = rng.normal(size=(7, 2))
    ps = WeightedPointSet(base + coeffs @ basis.T)
    assert l_planar_moment(ps, FlatSubspace(base, basis)) == pytest.approx(0.0, abs=1e-18)


def test_l_planar_moment_matches_gram_oracle():
    rng = np.random.default_rng(5)
    ps = random_point_set(rng, 3)
    direction = random_unit_vector(rng, 3)
    base = rng.normal(size=3)
    flat = FlatSubspace(base, direction[:, None])
    assert l_planar_moment(ps, flat) == pytest.approx(
        gram_moment(ps, base, direction[:, None]), rel=1e-9
    )


def test_gram_oracle_accepts_non_orthonormal_spans():
    rng = np.random.default_rng(6)
    ps = random_point_set(rng, 4)
    base = rng.normal(size=4)
    raw = rng.normal(size=(4, 2))
    flat = FlatSubspace.spanned_by(base, raw)
    assert l_planar_moment(ps, flat) == pytest.approx(gram_moment(ps, base, raw), rel=1e-9)


def test_axial_moment_collinear_zero():
    direction = np.array([1.0, 2.0, -1.0]) / np.sqrt(6)
    base = np.array([0.5, -1.0, 2.0])
    ps = WeightedPointSet(base + np.linspace(-2, 3, 6)[:, None] * direction)
    line = FlatSubspace(base, direction[:, None])
    assert axial_moment(ps, line) == pytest.approx(0.0, abs=1e-18)


def test_axial_moment_parallel_shift():
    # Huygens-Steiner for lines: I(shifted) = I(through C) + m d^2
    rng = np.random.default_rng(7)
    ps = random_point_set(rng, 3)
    c = centroid(ps)
    direction = random_unit_vector(rng, 3)
    offset = rng.normal(size=3)
    offset -= (offset @ direction) * direction
    line0 = FlatSubspace(c, direction[:, None])
    line1 = FlatSubspace(c + offset, direction[:, None])
    direct = sum(
        m * np.sum((p - c - offset - ((p - c - offset) @ direction) * direction) ** 2)
        for p, m in zip(ps.coords, ps.masses)
    )
    expected = axial_moment(ps, line0) + ps.total_mass * offset @ offset
    assert axial_moment(ps, line1) == pytest.approx(expected, rel=1e-9)
    assert axial_moment(ps, line1) == pytest.approx(direct, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    k=st.integers(2, 4),
    dist=st.floats(-5, 5, allow_nan=False),
)
def test_huygens_steiner_hyperplanar(seed, k, dist):
    rng = np.random.default_rng(seed)
    ps = random_point_set(rng, k)
    c = centroid(ps)
    normal = random_unit_vector(rng, k)
    base = Hyperplane.through(c, normal)
    shifted = Hyperplane(normal, float(normal @ c) + dist)
    expected = hyperplanar_moment(ps, base) + ps.total_mass * dist * dist
    assert hyperplanar_moment(ps, shifted) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), ell=st.integers(1, 3), dist=st.floats(0.1, 4))
def test_huygens_steiner_l_planar(seed, ell, dist):
    rng = np.random.default_rng(seed)
    k = 4
    ps = random_point_set(rng, k)
    c = centroid(ps)
    basis, _ = np.linalg.qr(rng.normal(size=(k, ell)))
    basis = basis[:, :ell]
    shift = rng.normal(size=k)
    shift -= basis @ (basis.T @ shift)
    shift *= dist / np.linalg.norm(shift)
    flat0 = FlatSubspace(c, basis)
    flat1 = FlatSubspace(c + shift, basis)
    expected = l_planar_moment(ps, flat0) + ps.total_mass * dist * dist
    assert l_planar_moment(ps, flat1) == pytest.approx(expected, rel=1e-9)


def test_axial_decomposition_3d():
    # axial moment about a principal axis = sum of the two complementary
    # principal hyperplanar moments
    rng = np.random.default_rng(8)
    ps = random_point_set(rng, 3)
    c = centroid(ps)
    eig = symmetric_eigen(inertia_operator(ps, c))
    for i, j, p in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        line = FlatSubspace(c, eig.vectors[:, i][:, None])
        assert axial_moment(ps, line) == pytest.approx(
            eig.values[j] + eig.values[p], rel=1e-10
        )


def test_axial_decomposition_2d():
    # in the plane the axial moment about a principal axis equals the
    # hyperplanar moment of the other axis
    rng = np.random.default_rng(13)
    ps = random_point_set(rng, 2)
    c = centroid(ps)
    eig = symmetric_eigen(inertia_operator(ps, c))
    for i, j in [(0, 1), (1, 0)]:
        line = FlatSubspace(c, eig.vectors[:, i][:, None])
        assert axial_moment(ps, line) == pytest.approx(eig.values[j], rel=1e-10)


def test_l_planar_moment_hyperplane_case():
    rng = np.random.default_rng(14)
    ps = random_point_set(rng, 4)
    plane = Hyperplane(random_unit_vector(rng, 4), rng.normal())
    assert l_planar_moment(ps, plane.as_flat()) == pytest.approx(
        hyperplanar_moment(ps, plane), rel=1e-12
    )


# ---------------------------------------------------------------------------
# directional moment
# ---------------------------------------------------------------------------

def test_directional_moment_forbes_values(forbes):
    from confocalfit import directional_fit

    unrestricted = directional_fit(forbes, [0.0, 1.0])
    assert directional_moment(forbes, unrestricted.flat, [0.0, 1.0]) == pytest.approx(
        0.813143014, rel=1e-6
    )
    restricted = directional_fit(forbes, [0.0, 1.0], through=[201.5, 24.5])
    assert directional_moment(forbes, restricted.flat, [0.0, 1.0]) == pytest.approx(
        1.455877, rel=1e-6
    )


def test_directional_moment_normal_direction():
    rng = np.random.default_rng(9)
    ps = random_point_set(rng, 3)
    plane = Hyperplane(random_unit_vector(rng, 3), rng.normal())
    assert directional_moment(ps, plane, plane.normal) == pytest.approx(
        hyperplanar_moment(ps, plane), rel=1e-12
    )


def test_directional_moment_parallel_direction_rejected():
    plane = Hyperplane(np.array([1.0, 0.0]), 0.5)
    ps = WeightedPointSet(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 2.0]]))
    with pytest.raises(DirectionParallel):
        directional_moment(ps, plane, [0.0, 1.0])


def test_directional_moment_dominates_hyperplanar():
    rng = np.random.default_rng(10)
    ps = random_point_set(rng, 3)
    plane = Hyperplane(random_unit_vector(rng, 3), rng.normal())
    base = hyperplanar_moment(ps, plane)
    for _ in range(25):
        w = random_unit_vector(rng, 3)
        if abs(w @ plane.normal) < 1e-6:
            continue
        assert directional_moment(ps, plane, w) >= base - 1e-12 * base


# ---------------------------------------------------------------------------
# symmetric eigendecomposition
# ---------------------------------------------------------------------------

def _charpoly_roots(matrix):
    """Independent oracle: bisect sign changes of det(A - t I)."""
    k = matrix.shape[0]
    radius = np.abs(matrix).sum(axis=1).max()
    grid = np.linspace(-radius - 1, radius + 1, 4001)

    def f(t):
        return np.linalg.det(matrix - t * np.eye(k))

    values = np.array([f(t) for t in grid])
    roots = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            roots.append(grid[i])
        elif values[i] * values[i + 1] < 0:
            lo, hi = grid[i], grid[i + 1]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if f(lo) * f(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-13 * max(1.0, abs(mid)):
                    break
            roots.append(0.5 * (lo + hi))
    return np.asarray(roots)


def test_symmetric_eigen_cells(cells):
    eig = symmetric_eigen(inertia_operator(cells, centroid(cells)))
    assert eig.values[0] == pytest.approx(0.69605, rel=1e-5)
    assert eig.values[1] == pytest.approx(65.19978, rel=1e-6)


def test_symmetric_eigen_identity():
    eig = symmetric_eigen(SymmetricOperator(np.eye(4)))
    assert np.allclose(eig.values, 1.0)


def test_symmetric_eigen_matches_charpoly_bisection():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(5, 5))
    sym = SymmetricOperator(0.5 * (a + a.T))
    eig = symmetric_eigen(sym)
    oracle = _charpoly_roots(sym.entries)
    assert len(oracle) == 5
    assert np.allclose(np.sort(oracle), eig.values, atol=1e-8 * np.abs(eig.values).max())


def test_symmetric_eigen_reconstruction_and_orthonormality():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a = rng.normal(size=(4, 4))
        sym = SymmetricOperator(0.5 * (a + a.T))
        eig = symmetric_eigen(sym)
        recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
        norm = np.linalg.norm(sym.entries)
        assert np.linalg.norm(sym.entries - recon) <= 1e-10 * max(norm, 1e-300)
        assert np.abs(eig.vectors.T @ eig.vectors - np.eye(4)).max() <= 1e-12
        assert np.all(np.diff(eig.values) >= 0)


def test_symmetric_operator_rejects_asymmetry():
    with pytest.raises(NotSymmetric):
        SymmetricOperator(np.array([[1.0, 2.0], [2.5, 1.0]]))


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

def test_point_set_validation():
    with pytest.raises(ValueError):
        WeightedPointSet(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        WeightedPointSet(np.zeros((3, 1)))
    with pytest.raises(ValueError):
        WeightedPointSet(np.zeros((3, 2)), np.array([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        WeightedPointSet(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_full_rank_flag():
    collinear = WeightedPointSet(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
    assert not collinear.is_full_rank
    spread = WeightedPointSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert spread.is_full_rank


@settings(max_examples=40, deadline=None)
@given(
    comps=st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=5),
    offset=st.floats(-10, 10, allow_nan=False),
)
def test_hyperplane_canonicalization(comps, offset):
    normal = np.asarray(comps)
    if np.linalg.norm(normal) < 1e-6:
        return
    plane = Hyperplane(normal, offset)
    flipped = Hyperplane(-normal, -offset)
    assert np.allclose(plane.normal, flipped.normal)
    assert plane.offset == pytest.approx(flipped.offset, abs=1e-12)
    assert np.linalg.norm(plane.normal) == pytest.approx(1.0, abs=1e-12)
    lead = plane.normal[np.flatnonzero(np.abs(plane.normal) > 1e-12)[0]]
    assert lead > 0
