import numpy as np
import pytest

from fedmoo.moea import (
    MoeaConfig,
    apd_select,
    crowding_distance,
    fast_nondominated_sort,
    generate_reference_vectors,
    nsga2_optimize,
    polynomial_mutation,
    rvea_optimize,
    sbx_crossover,
)

from oracles import domination_ranks, hypervolume_2d, nondominated_indices


class QuadraticAcquisition:
    """Cheap analytic stand-in for the federated LCB: a convex bi-objective
    landscape whose Pareto set is the segment between two anchor points."""

    def __init__(self, dim, anchors=None):
        self.dim = dim
        if anchors is None:
            anchors = [np.full(dim, 0.2), np.full(dim, 0.8)]
        self.anchors = anchors

    def lcb(self, x):
        pts = np.atleast_2d(x)
        return np.stack(
            [np.sum((pts - a) ** 2, axis=1) for a in self.anchors], axis=1
        )


class SphericalAcquisition:
    """Three smooth objectives with a sphere-like tradeoff in the first
    two variables, for RVEA exercises."""

    dim = 6

    def lcb(self, x):
        pts = np.atleast_2d(x)
        theta = 0.5 * np.pi * pts[:, :2]
        g = np.sum((pts[:, 2:] - 0.5) ** 2, axis=1)
        f = np.empty((len(pts), 3))
        f[:, 0] = np.cos(theta[:, 0]) * np.cos(theta[:, 1])
        f[:, 1] = np.cos(theta[:, 0]) * np.sin(theta[:, 1])
        f[:, 2] = np.sin(theta[:, 0])
        return (1.0 + g)[:, None] * f


def test_sort_inspection_example():
    f = np.array([[1.0, 2.0], [2.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    fronts = fast_nondominated_sort(f)
    assert [set(front.tolist()) for front in fronts] == [{0, 1}, {2}, {3}]


def test_sort_identical_points_single_front():
    f = np.ones((7, 3))
    fronts = fast_nondominated_sort(f)
    assert len(fronts) == 1
    assert set(fronts[0].tolist()) == set(range(7))


def test_sort_matches_rank_oracle():
    rng = np.random.default_rng(0)
    f = rng.uniform(size=(200, 3))
    fronts = fast_nondominated_sort(f)
    got = np.empty(200, dtype=int)
    for level, front in enumerate(fronts):
        got[front] = level
    want = domination_ranks([tuple(r) for r in f])
    assert got.tolist() == want


def test_sort_every_index_once():
    rng = np.random.default_rng(1)
    f = rng.uniform(size=(120, 5))
    fronts = fast_nondominated_sort(f)
    merged = np.sort(np.concatenate(fronts))
    assert np.array_equal(merged, np.arange(120))


def test_sort_no_cross_front_domination():
    rng = np.random.default_rng(2)
    f = rng.uniform(size=(80, 3))
    fronts = fast_nondominated_sort(f)
    for i, earlier in enumerate(fronts):
        for later in fronts[i + 1 :]:
            for a in earlier:
                assert not any(
                    np.all(f[b] <= f[a]) and np.any(f[b] < f[a]) for b in later
                )
    # front 0 equals the brute-force nondominated set
    want = set(nondominated_indices([tuple(r) for r in f]))
    assert set(fronts[0].tolist()) == want


def test_crowding_two_points_infinite():
    crowd = crowding_distance(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.all(np.isinf(crowd))


def test_crowding_collinear_middle_is_two():
    f = np.array([[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]])
    crowd = crowding_distance(f)
    assert np.isinf(crowd[0]) and np.isinf(crowd[2])
    assert crowd[1] == pytest.approx(2.0)


def test_crowding_matches_recomputation():
    rng = np.random.default_rng(3)
    f = rng.uniform(size=(20, 3))
    crowd = crowding_distance(f)
    want = np.zeros(20)
    for j in range(3):
        order = np.argsort(f[:, j], kind="stable")
        span = f[order[-1], j] - f[order[0], j]
        want[order[0]] = np.inf
        want[order[-1]] = np.inf
        for pos in range(1, 19):
            if np.isinf(want[order[pos]]):
                continue
            want[order[pos]] += (f[order[pos + 1], j] - f[order[pos - 1], j]) / span
    finite = np.isfinite(want)
    assert np.array_equal(np.isinf(crowd), np.isinf(want))
    assert crowd[finite] == pytest.approx(want[finite])


class HalfDraws:
    """Random source returning 0.5 from random() for the SBX beta draw."""

    def __init__(self):
        self.calls = 0

    def random(self, size=None):
        if size is None:
            return 0.0  # crossover gate always passes
        return np.full(size, 0.5)


def test_sbx_half_draw_returns_parents():
    a = np.array([0.1, 0.4, 0.9])
    b = np.array([0.3, 0.2, 0.7])
    c1, c2 = sbx_crossover(a, b, rng=HalfDraws())
    assert np.array_equal(c1, a)
    assert np.array_equal(c2, b)


def test_sbx_identical_parents_identical_children():
    a = np.full(4, 0.42)
    c1, c2 = sbx_crossover(a, a.copy(), rng=np.random.default_rng(4))
    assert np.allclose(c1, a, atol=1e-12)
    assert np.allclose(c2, a, atol=1e-12)


def test_sbx_child_mean_matches_parent_mean():
    rng = np.random.default_rng(5)
    a = np.array([0.3, 0.6])
    b = np.array([0.5, 0.4])
    total = np.zeros(2)
    trials = 100_000
    for _ in range(trials):
        c1, c2 = sbx_crossover(a, b, rng=rng)
        total += c1 + c2
    assert total / (2 * trials) == pytest.approx((a + b) / 2, abs=1e-2)


def test_sbx_stays_in_bounds():
    rng = np.random.default_rng(6)
    for _ in range(200):
        a = rng.uniform(size=5)
        b = rng.uniform(size=5)
        c1, c2 = sbx_crossover(a, b, rng=rng)
        for c in (c1, c2):
            assert np.all(c >= 0.0) and np.all(c <= 1.0)


def test_mutation_zero_probability_is_identity():
    rng = np.random.default_rng(7)
    x = rng.uniform(size=6)
    assert np.array_equal(polynomial_mutation(x, p_mutation=0.0, rng=rng), x)


def test_mutation_frequency():
    rng = np.random.default_rng(8)
    d = 5
    x = np.full(d, 0.5)
    trials = 100_000
    changed = np.zeros(d)
    for _ in range(trials):
        changed += polynomial_mutation(x, rng=rng) != x
    p = 1.0 / d
    bound = 3.0 * np.sqrt(p * (1 - p) / trials)
    assert np.all(np.abs(changed / trials - p) <= bound)


def test_mutation_respects_bounds_at_boundary():
    rng = np.random.default_rng(9)
    for x in (np.zeros(4), np.ones(4)):
        for _ in range(100):
            y = polynomial_mutation(x, p_mutation=1.0, rng=rng)
            assert np.all(y >= 0.0) and np.all(y <= 1.0)


def test_nsga2_zero_generations_returns_initial_population():
    acq = QuadraticAcquisition(4)
    config = MoeaConfig(pop_size=12, generations=0)
    pop = nsga2_optimize(acq, config, np.random.default_rng(10))
    assert len(pop) == 12
    assert pop.generation == 0
    assert np.allclose(pop.f, acq.lcb(pop.x))


def test_nsga2_scalar_like_objectives_never_regress():
    class ScalarLike:
        dim = 5

        def lcb(self, x):
            value = np.sum((np.atleast_2d(x) - 0.3) ** 2, axis=1)
            return np.stack([value, value], axis=1)

    acq = ScalarLike()
    rng = np.random.default_rng(11)
    initial = nsga2_optimize(acq, MoeaConfig(pop_size=20, generations=0), np.random.default_rng(12))
    final = nsga2_optimize(acq, MoeaConfig(pop_size=20, generations=20), np.random.default_rng(12))
    assert final.f[:, 0].min() <= initial.f[:, 0].min()


def test_nsga2_improves_hypervolume_on_convex_toy():
    acq = QuadraticAcquisition(4)
    better = 0
    for seed in range(20):
        initial = nsga2_optimize(acq, MoeaConfig(pop_size=20, generations=0), np.random.default_rng(seed))
        final = nsga2_optimize(acq, MoeaConfig(pop_size=20, generations=25), np.random.default_rng(seed))
        ref = (3.0, 3.0)
        hv0 = hypervolume_2d([tuple(r) for r in initial.f], ref)
        hv1 = hypervolume_2d([tuple(r) for r in final.f], ref)
        if hv1 >= hv0 - 1e-12:
            better += 1
    assert better == 20


def test_nsga2_population_in_bounds_and_deterministic():
    acq = QuadraticAcquisition(6)
    config = MoeaConfig(pop_size=16, generations=8)
    a = nsga2_optimize(acq, config, np.random.default_rng(13))
    b = nsga2_optimize(acq, config, np.random.default_rng(13))
    assert np.array_equal(a.x, b.x)
    assert np.all(a.x >= 0.0) and np.all(a.x <= 1.0)


def test_nsga2_elitism_keeps_nondominated_cover():
    # Track consecutive generations by re-running with the same seed for
    # t and t+1 generations: no new rank-1 point may be dominated by an
    # old rank-1 point.
    acq = QuadraticAcquisition(4)
    rng_seed = 14
    previous = None
    for gens in range(0, 8):
        pop = nsga2_optimize(acq, MoeaConfig(pop_size=16, generations=gens), np.random.default_rng(rng_seed))
        nd = pop.f[[i for i in nondominated_indices([tuple(r) for r in pop.f])]]
        if previous is not None:
            for new_point in nd:
                assert not any(
                    np.all(old <= new_point) and np.any(old < new_point)
                    for old in previous
                )
        previous = nd


def test_reference_vector_counts_and_norms():
    for m, count in [(3, 105), (5, 126), (10, 275), (20, 420)]:
        vectors = generate_reference_vectors(m).vectors
        assert vectors.shape == (count, m)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-12)
        assert len(np.unique(vectors, axis=0)) == count


def test_reference_vectors_need_known_layers():
    with pytest.raises(ValueError):
        generate_reference_vectors(7)
    vectors = generate_reference_vectors(7, layers=(3, 0)).vectors
    assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-12)


def test_apd_keeps_one_per_occupied_subregion():
    vectors = generate_reference_vectors(3).vectors
    chosen_dirs = vectors[::7]
    f = 2.0 * chosen_dirs  # population sitting exactly on distinct directions
    f = np.vstack([f, 3.0 * chosen_dirs])  # worse twin along each direction
    survivors = apd_select(f, vectors, progress=0.5)
    assert len(survivors) == len(chosen_dirs)
    # the nearer twin survives in each subregion
    assert set(survivors.tolist()) == set(range(len(chosen_dirs)))


def test_rvea_zero_generations_returns_initial_population():
    acq = SphericalAcquisition()
    vectors = generate_reference_vectors(3)
    config = MoeaConfig(optimizer="rvea", generations=0, reference_vectors=vectors)
    pop = rvea_optimize(acq, config, np.random.default_rng(15))
    assert len(pop) == len(vectors.vectors)
    assert np.allclose(pop.f, acq.lcb(pop.x))


def test_rvea_angle_statistic_improves_in_trend():
    acq = SphericalAcquisition()
    vectors = generate_reference_vectors(3)

    def mean_angle(f):
        shifted = f - f.min(axis=0)
        norms = np.maximum(np.linalg.norm(shifted, axis=1), 1e-64)
        cosine = (shifted / norms[:, None]) @ vectors.vectors.T
        return float(np.mean(np.arccos(np.clip(cosine.max(axis=1), -1.0, 1.0))))

    initial_angles = []
    final_angles = []
    for seed in range(20):
        cfg0 = MoeaConfig(optimizer="rvea", generations=0, reference_vectors=vectors)
        cfg1 = MoeaConfig(optimizer="rvea", generations=20, reference_vectors=vectors)
        initial_angles.append(mean_angle(rvea_optimize(acq, cfg0, np.random.default_rng(seed)).f))
        final_angles.append(mean_angle(rvea_optimize(acq, cfg1, np.random.default_rng(seed)).f))
    assert np.mean(final_angles) <= np.mean(initial_angles)


def test_rvea_in_bounds_and_deterministic():
    acq = SphericalAcquisition()
    config = MoeaConfig(
        optimizer="rvea", generations=6, reference_vectors=generate_reference_vectors(3)
    )
    a = rvea_optimize(acq, config, np.random.default_rng(16))
    b = rvea_optimize(acq, config, np.random.default_rng(16))
    assert np.array_equal(a.x, b.x)
    assert np.all(a.x >= 0.0) and np.all(a.x <= 1.0)


def test_rvea_requires_reference_vectors():
    with pytest.raises(ValueError):
        rvea_optimize(SphericalAcquisition(), MoeaConfig(optimizer="rvea"), np.random.default_rng(0))


def test_moea_config_rejects_unknown_optimizer():
    with pytest.raises(ValueError):
        MoeaConfig(optimizer="pso")
