"""Product-space machinery: projections, induced maps, metrics, order."""

import itertools

import numpy as np
import pytest

import starfix as sx

from conftest import all_tuples, random_metric_space, random_star


def avg_affine(U):
    """F(x1,..,xn) = (sum)/6 + 1 acting on stacked (n, k) arguments."""
    return np.sum(U, axis=-2) / 6.0 + 1.0


# ---------------------------------------------------------------------------
# projections


def test_project_star_reorders_slots():
    U = np.array([[10.0], [20.0], [30.0]])  # (a, b, c)
    got = sx.project_star(U, sx.preset("borcut3"), 2)
    assert got.ravel().tolist() == [20.0, 10.0, 30.0]  # (b, a, c)


def test_project_star_karapinar_row2():
    U = np.array([[1.0], [2.0], [3.0], [4.0]])
    got = sx.project_star(U, sx.preset("karapinar4"), 2)
    assert got.ravel().tolist() == [1.0, 4.0, 3.0, 2.0]


def test_project_star_identity_row():
    U = np.arange(10.0).reshape(5, 2)
    got = sx.project_star(U, sx.forward_cyclic(5), 1)
    assert (got == U).all()


def test_project_star_index_errors():
    U = np.zeros((2, 1))
    star = sx.preset("coupled2")
    with pytest.raises(IndexError):
        sx.project_star(U, star, 0)
    with pytest.raises(IndexError):
        sx.project_star(U, star, 3)


# ---------------------------------------------------------------------------
# induced maps


def test_f_star_average_map():
    maps = sx.InducedMaps(avg_affine, lambda x: x, sx.preset("coupled2"))
    out = sx.f_star(maps, np.array([[3.0], [9.0]]))
    assert out.ravel().tolist() == [3.0, 3.0]


def test_f_star_constant_map():
    maps = sx.InducedMaps(lambda U: np.full(1, 7.0), lambda x: x, sx.preset("borcut3"))
    out = sx.f_star(maps, np.zeros((3, 1)))
    assert out.ravel().tolist() == [7.0, 7.0, 7.0]


def test_f_star_slot_projection_is_identity_for_coupled():
    maps = sx.InducedMaps(lambda U: U[..., 0, :], lambda x: x, sx.preset("coupled2"))
    U = np.array([[4.0], [9.0]])
    assert (sx.f_star(maps, U) == U).all()


def test_big_g_identity_and_doubling():
    star = sx.preset("coupled2")
    ident = sx.InducedMaps(avg_affine, lambda x: x, star)
    U = np.array([[1.0], [2.0]])
    assert (sx.big_g(ident, U) == U).all()
    doubling = sx.InducedMaps(avg_affine, lambda x: 2.0 * x, star)
    assert sx.big_g(doubling, U).ravel().tolist() == [2.0, 4.0]


def test_projection_commutes_with_big_g_vector():
    rng = np.random.default_rng(19)
    g = lambda x: 2.0 * x + 1.0
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        star = random_star(rng, n)
        maps = sx.InducedMaps(avg_affine, g, star)
        U = rng.normal(size=(n, 2))
        GU = sx.big_g(maps, U)
        for i in range(1, n + 1):
            left = sx.project_star(GU, star, i)
            right = sx.big_g(maps, sx.project_star(U, star, i))
            np.testing.assert_array_equal(left, right)


def test_projection_commutes_with_big_g_finite():
    rng = np.random.default_rng(37)
    for p, n in [(2, 2), (3, 2), (2, 3), (3, 3)]:
        g_tab = rng.integers(0, p, size=p)
        star = random_star(rng, n)
        for tup in all_tuples(p, n):
            U = np.array(tup)
            GU = g_tab[U]
            for i in range(1, n + 1):
                left = sx.project_star(GU, star, i)
                right = g_tab[sx.project_star(U, star, i)]
                assert (left == right).all()


# ---------------------------------------------------------------------------
# product metrics and order


def test_delta_nabla_known_values():
    space = sx.VectorSpace(1, "max")
    U = np.array([[0.0], [0.0]])
    V = np.array([[1.0], [3.0]])
    assert sx.delta_n(U, V, space.metric) == pytest.approx(2.0)
    assert sx.nabla_n(U, V, space.metric) == pytest.approx(3.0)
    assert sx.delta_n(U, U, space.metric) == 0.0
    assert sx.nabla_n(U, U, space.metric) == 0.0


def test_delta_nabla_symmetry_and_shape_check():
    space = sx.VectorSpace(2, "euclidean")
    rng = np.random.default_rng(13)
    for _ in range(200):
        U = rng.normal(size=(3, 2))
        V = rng.normal(size=(3, 2))
        assert sx.delta_n(U, V, space.metric) == sx.delta_n(V, U, space.metric)
        assert sx.nabla_n(U, V, space.metric) == sx.nabla_n(V, U, space.metric)
    with pytest.raises(ValueError):
        sx.delta_n(np.zeros((2, 2)), np.zeros((3, 2)), space.metric)


def test_metric_sandwich_random_pairs():
    rng = np.random.default_rng(101)
    space = sx.VectorSpace(2, "euclidean")
    for n in (2, 3, 4, 7):
        for _ in range(250):
            U = rng.normal(size=(n, 2)) * 10
            V = rng.normal(size=(n, 2)) * 10
            delta = sx.delta_n(U, V, space.metric)
            nabla = sx.nabla_n(U, V, space.metric)
            assert nabla / n <= delta + 1e-12
            assert delta <= nabla + 1e-12


def test_product_metric_triangle():
    rng = np.random.default_rng(59)
    space = sx.VectorSpace(3, "max")
    for _ in range(1000):
        U, V, W = rng.normal(size=(3, 4, 3)) * 5
        for metric in (sx.delta_n, sx.nabla_n):
            duv = metric(U, V, space.metric)
            duw = metric(U, W, space.metric)
            dwv = metric(W, V, space.metric)
            assert duv <= duw + dwv + 1e-12


def test_order_leq_n():
    space = sx.VectorSpace(1, "max")
    leq = space.leq
    assert sx.order_leq_n([[1.0], [2.0]], [[1.0], [3.0]], leq)
    assert not sx.order_leq_n([[1.0], [3.0]], [[2.0], [1.0]], leq)
    assert not sx.order_leq_n([[2.0], [1.0]], [[1.0], [3.0]], leq)
    U = np.array([[4.0], [5.0]])
    assert sx.order_leq_n(U, U, leq)


# ---------------------------------------------------------------------------
# per-projection metric identities


def test_lemma6_equalities_for_permuted_ops():
    rng = np.random.default_rng(67)
    space = sx.VectorSpace(2, "euclidean")
    g = lambda x: 3.0 * x - 1.0
    for star in (sx.forward_cyclic(3), sx.preset("borcut3"), sx.preset("karapinar4")):
        for _ in range(100):
            U = rng.normal(size=(star.n, 2)) * 4
            V = rng.normal(size=(star.n, 2)) * 4
            report = sx.lemma6_check(U, V, g, star, space.metric)
            assert report.all_equal
            assert report.all_bounded


def test_lemma6_skew_bound_holds_equality_fails():
    rng = np.random.default_rng(71)
    space = sx.VectorSpace(1, "max")
    star = sx.skew_1(3)
    saw_equality_failure = False
    for _ in range(200):
        U = rng.normal(size=(3, 1)) * 4
        V = rng.normal(size=(3, 1)) * 4
        report = sx.lemma6_check(U, V, lambda x: x, star, space.metric)
        assert report.all_bounded
        if not report.all_equal:
            saw_equality_failure = True
    assert saw_equality_failure


def test_lemma6_zero_on_equal_tuples():
    space = sx.VectorSpace(1, "max")
    U = np.array([[1.0], [2.0], [3.0]])
    report = sx.lemma6_check(U, U, lambda x: x, sx.skew_n(3), space.metric)
    assert report.delta == 0.0 and report.nabla == 0.0
    assert report.all_equal and report.all_bounded


# ---------------------------------------------------------------------------
# order propagation through projections (finite, exhaustive)


def test_projected_order_follows_tuple_order():
    rng = np.random.default_rng(83)
    for trial in range(20):
        p = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        space = random_metric_space(rng, p)
        g_tab = rng.integers(0, p, size=p)
        star = random_star(rng, n)
        leq = np.asarray(space.leq_table)
        for U in map(np.array, all_tuples(p, n)):
            for V in map(np.array, all_tuples(p, n)):
                if not leq[g_tab[U], g_tab[V]].all():
                    continue
                for i in range(1, n + 1):
                    pu = sx.project_star(U, star, i)
                    pv = sx.project_star(V, star, i)
                    assert leq[g_tab[pu], g_tab[pv]].all()


def test_monotone_f_gives_order_preserving_f_star():
    # max of the slots is monotone on a chain; its induced map preserves
    # the product order between G-comparable tuples
    space = sx.chain_space(3)
    n = 2
    tuples = all_tuples(3, n)
    f_table = np.array([max(t) for t in tuples], dtype=np.int64)
    assert (
        sx.check_monotone_property(f_table.reshape(3, 3), None, space, n).verdict
        == "holds"
    )
    for star in (sx.preset("coupled2"), sx.make_star(2, [[1, 1], [2, 1]])):
        fs, gg = sx.tabulate_induced(space, f_table, np.arange(3), star)
        leq = np.asarray(space.leq_table)
        for cu, U in enumerate(tuples):
            for cv, V in enumerate(tuples):
                if all(leq[u, v] for u, v in zip(U, V)):
                    fu = np.array(np.unravel_index(fs[cu], (3, 3)))
                    fv = np.array(np.unravel_index(fs[cv], (3, 3)))
                    assert leq[fu, fv].all()


# ---------------------------------------------------------------------------
# tabulated induced maps vs direct evaluation


def test_tabulate_induced_matches_pointwise_evaluation():
    rng = np.random.default_rng(97)
    for trial in range(20):
        p = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        space = random_metric_space(rng, p)
        star = random_star(rng, n)
        tuples = all_tuples(p, n)
        f_table = rng.integers(0, p, size=p**n).astype(np.int64)
        g_table = rng.integers(0, p, size=p).astype(np.int64)
        fs, gg = sx.tabulate_induced(space, f_table, g_table, star)
        weights = p ** np.arange(n - 1, -1, -1)
        for code, tup in enumerate(tuples):
            U = np.array(tup)
            want_f = [
                f_table[int(np.dot(sx.project_star(U, star, i), weights))]
                for i in range(1, n + 1)
            ]
            assert fs[code] == int(np.dot(want_f, weights))
            assert gg[code] == int(np.dot(g_table[U], weights))


def test_f_star_image_lands_in_f_image_power():
    rng = np.random.default_rng(103)
    for trial in range(10):
        p = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        space = random_metric_space(rng, p)
        star = random_star(rng, n)
        f_table = rng.integers(0, p, size=p**n).astype(np.int64)
        fs, _ = sx.tabulate_induced(space, f_table, np.arange(p), star)
        image = set(int(v) for v in f_table)
        for code in fs:
            digits = np.unravel_index(int(code), (p,) * n)
            assert all(int(dig) in image for dig in digits)


def test_tabulate_induced_bound_guard():
    space = sx.chain_space(3)
    f_table = np.zeros(9, dtype=np.int64)
    with pytest.raises(sx.EnumerationBoundError):
        sx.tabulate_induced(space, f_table, np.arange(3), sx.preset("coupled2"), bound=8)


# ---------------------------------------------------------------------------
# sequence convergence in the product metrics


def test_geometric_sequences_converge_in_both_metrics():
    space = sx.VectorSpace(1, "max")
    limit = np.array([[1.5], [2.5], [0.5]])
    drift = np.array([[1.0], [-2.0], [0.5]])
    seq = [limit + drift * 0.5**m for m in range(40)]
    deltas = [sx.delta_n(Um, limit, space.metric) for Um in seq]
    nablas = [sx.nabla_n(Um, limit, space.metric) for Um in seq]
    # both metrics decay geometrically to zero with the componentwise rate
    for m in range(1, 40):
        assert nablas[m] == pytest.approx(2.0 * 0.5**m)
        assert deltas[m] <= nablas[m] + 1e-15
    assert nablas[-1] < 1e-9
    # Cauchy in the product metric
    for m in range(1, 39):
        gap = sx.nabla_n(seq[m], seq[m + 1], space.metric)
        assert gap <= 3.0 * 0.5**m


def test_componentwise_convergence_is_necessary():
    # one stuck slot keeps both product metrics away from zero
    space = sx.VectorSpace(1, "max")
    limit = np.array([[0.0], [0.0]])
    seq = [np.array([[0.5**m], [1.0]]) for m in range(30)]
    assert sx.delta_n(seq[-1], limit, space.metric) >= 0.5
    assert sx.nabla_n(seq[-1], limit, space.metric) >= 1.0
    # while the converging slot alone does go to zero
    assert abs(seq[-1][0, 0]) < 1e-8
