import numpy as np
import pytest

from fedmoo.sampling import latin_hypercube, lattice_covering, simplex_lattice


def assert_stratified(design: np.ndarray) -> None:
    n, d = design.shape
    for j in range(d):
        occupied = np.sort(np.floor(n * design[:, j]).astype(int))
        assert np.array_equal(occupied, np.arange(n))


def test_single_point_spans_domain():
    x = latin_hypercube(1, 3, np.random.default_rng(0))
    assert x.shape == (1, 3)
    assert np.all(x >= 0.0) and np.all(x < 1.0)


def test_four_point_stratification():
    x = latin_hypercube(4, 2, np.random.default_rng(1))
    for j in range(2):
        col = np.sort(x[:, j])
        for i, (lo, hi) in enumerate([(0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]):
            assert lo <= col[i] < hi


def test_initial_design_stratification():
    assert_stratified(latin_hypercube(109, 10, np.random.default_rng(2)))


def test_random_designs_stratified():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 201))
        d = int(rng.integers(1, 81))
        assert_stratified(latin_hypercube(n, d, np.random.default_rng(rng.integers(2**32))))


def test_seed_determinism():
    a = latin_hypercube(20, 5, np.random.default_rng(9))
    b = latin_hypercube(20, 5, np.random.default_rng(9))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("n,d", [(0, 3), (3, 0), (-1, 2)])
def test_rejects_empty_designs(n, d):
    with pytest.raises(ValueError):
        latin_hypercube(n, d, np.random.default_rng(0))


def test_lattice_m3_h2():
    pts = simplex_lattice(3, 2)
    assert pts.shape == (6, 3)
    expected = {(0, 0, 1), (0, 0.5, 0.5), (0, 1, 0), (0.5, 0, 0.5), (0.5, 0.5, 0), (1, 0, 0)}
    assert {tuple(row) for row in pts} == expected


def test_lattice_rows_sum_to_one():
    for m, h in [(2, 7), (3, 13), (5, 5), (10, 3), (20, 2)]:
        pts = simplex_lattice(m, h)
        assert np.allclose(pts.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(pts >= 0.0)
        # no duplicate rows
        assert len(np.unique(pts, axis=0)) == len(pts)


def test_lattice_covering_smallest():
    assert lattice_covering(3, 105) == 13
    assert lattice_covering(3, 106) == 14
    assert lattice_covering(2, 10) == 9


def test_lattice_rejects_bad_args():
    with pytest.raises(ValueError):
        simplex_lattice(1, 3)
    with pytest.raises(ValueError):
        simplex_lattice(3, 0)
