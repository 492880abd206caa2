import random
from itertools import product

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from textrecur.study import (
    FICTION,
    OTHERS,
    FeatureRecord,
    PowerIterationError,
    UndefinedCorrelation,
    bipartite_project,
    book_tfidf_matrix,
    correlation_report,
    default_fiction_communities,
    detect_communities,
    label_book,
    loo_nearest_centroid_accuracy,
    modularity,
    pca2,
    pearson,
    rmse_separation,
    shuffle_seeds,
    spearman,
    zero_variance_features,
)

from conftest import organized


def rec(label, **features):
    return FeatureRecord("b", label, features)


class TestRmse:
    def test_identical_groups(self):
        a = [rec("x", f=1.0, g=2.0), rec("x", f=3.0, g=0.0)]
        assert rmse_separation(a, list(a), ["f", "g"]) == 0.0

    def test_one_unit_in_one_of_two(self):
        # f: groups {-r3, r3} and {2-r3, 2+r3}; pooled sd 2, centroid gap 2 -> one unit
        r3 = 3**0.5
        a = [rec("a", f=-r3, g=0.0), rec("a", f=r3, g=1.0)]
        b = [rec("b", f=2 - r3, g=0.0), rec("b", f=2 + r3, g=1.0)]
        assert rmse_separation(a, b, ["f", "g"]) == pytest.approx(0.5**0.5, abs=1e-12)

    def test_zero_variance_feature(self, caplog):
        a, b = [rec("a", f=0.0, g=1.0)], [rec("b", f=1.0, g=1.0)]
        assert zero_variance_features(a + b, ["f", "g"]) == ["g"]
        # f is two units apart, g contributes nothing: sqrt((4 + 0) / 2)
        assert rmse_separation(a, b, ["f", "g"]) == pytest.approx(2**0.5, abs=1e-12)
        assert "zero pooled variance" in caplog.text

    def test_empty_group(self):
        with pytest.raises(ValueError):
            rmse_separation([], [rec("b", f=1.0)], ["f"])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=20), st.floats(0.1, 100), st.floats(-100, 100))
    def test_affine_invariance(self, xs, scale, shift):
        half = len(xs) // 2
        recs = [rec("x", f=x) for x in xs]
        moved = [rec("x", f=scale * x + shift) for x in xs]
        assert rmse_separation(recs[:half], recs[half:], ["f"]) == pytest.approx(
            rmse_separation(moved[:half], moved[half:], ["f"]), abs=1e-6
        )


class TestCorrelation:
    def test_linear(self):
        x = np.arange(10.0)
        assert pearson(x, 2 * x + 1) == pytest.approx(1.0, abs=1e-12)
        assert spearman(x, 2 * x + 1) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_decreasing(self):
        x = np.linspace(-3, 3, 11)
        assert spearman(x, -(x**3)) == pytest.approx(-1.0, abs=1e-12)

    def test_constant(self):
        with pytest.raises(UndefinedCorrelation):
            pearson([1, 2, 3], [5, 5, 5])
        with pytest.raises(UndefinedCorrelation):
            spearman([1, 1, 1], [1, 2, 3])

    def test_ties_average_ranks(self):
        # ranks of [1, 2, 2, 3] are [1, 2.5, 2.5, 4]
        assert spearman([1, 2, 2, 3], [1, 2, 3, 4]) == pytest.approx(np.corrcoef([1, 2.5, 2.5, 4], [1, 2, 3, 4])[0, 1])

    def test_against_numpy(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=30), rng.normal(size=30)
        assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=25, unique_by=lambda t: t[0]
        )
    )
    def test_invariances(self, pts):
        x = np.array([p[0] for p in pts], float)
        y = np.array([p[1] for p in pts], float)
        if np.ptp(y) == 0:
            return
        assert -1.0 <= pearson(x, y) <= 1.0
        assert pearson(3 * x - 7, y) == pytest.approx(pearson(x, y), abs=1e-9)
        assert spearman(np.exp(x / 10), y) == pytest.approx(spearman(x, y), abs=1e-9)
        assert spearman(x, y) == pytest.approx(spearman(y, x), abs=1e-12)

    def test_report(self):
        recs = [
            FeatureRecord(str(i), "real", {"rsMean": i, "mean_k": -i, "rsStd": i * i, "std_k": i}) for i in range(5)
        ]
        rep = correlation_report(recs)
        assert rep["rsMean_vs_mean_k"]["pearson"] == pytest.approx(-1.0)
        assert rep["rsStd_vs_std_k"]["spearman"] == pytest.approx(1.0)


class TestGenres:
    def test_projection(self):
        g = bipartite_project([("b1", ["A", "B"])])
        assert list(g.edges(data="weight")) == [("A", "B", 1)]
        g = bipartite_project([("b1", ["A", "B"]), ("b2", ["B", "A"])])
        assert g["A"]["B"]["weight"] == 2
        g = bipartite_project([("b1", ["A", "B"]), ("b2", ["C", "D"])])
        assert nx.number_connected_components(g) == 2

    def test_empty(self):
        with pytest.raises(ValueError):
            bipartite_project([("b", [])])


def two_cliques():
    g = nx.Graph()
    for base in (0, 5):
        g.add_edges_from(((base + i, base + j) for i in range(5) for j in range(i + 1, 5)), weight=1)
    g.add_edge(4, 5, weight=1)
    return g


class TestLouvain:
    def test_two_cliques(self):
        g = two_cliques()
        part = detect_communities(g, seed=0)
        groups = {frozenset(v for v in part if part[v] == c) for c in set(part.values())}
        assert groups == {frozenset(range(5)), frozenset(range(5, 10))}
        # exhaustive check over all 2^9 bipartitions and the trivial one
        best = max(
            modularity(g, {v: (bits >> v) & 1 if v < 9 else 0 for v in g})
            for bits in range(2**9)
        )
        assert modularity(g, part) == pytest.approx(best, abs=1e-12)

    def test_single_clique(self):
        assert set(detect_communities(nx.complete_graph(6), seed=3).values()) == {0}

    def test_deterministic(self):
        g = nx.karate_club_graph()
        nx.set_edge_attributes(g, 1, "weight")
        assert detect_communities(g, seed=5) == detect_communities(g, seed=5)

    def test_ids_by_size(self):
        g = two_cliques()
        g.add_edges_from([(20, 21), (21, 22)], weight=1)
        part = detect_communities(g, seed=0)
        sizes = [sum(1 for c in part.values() if c == cid) for cid in range(max(part.values()) + 1)]
        assert sizes == sorted(sizes, reverse=True)
        assert default_fiction_communities(part) == {0, 1}


class TestLabels:
    PART = {"A": 0, "B": 0, "C": 1, "D": 2}

    def test_majority(self):
        assert label_book(["A", "B", "C", "D"], {**self.PART, "C": 0}, {0}) == FICTION

    def test_tie(self):
        assert label_book(["A", "B", "C", "D"], self.PART, {0}) == OTHERS

    def test_empty(self):
        assert label_book([], self.PART, {0}) == OTHERS
        assert label_book(["Z"], self.PART, {0}) == OTHERS


class TestPca:
    def test_rank_one(self):
        t = np.linspace(-2, 3, 12)
        data = np.column_stack([t, 2 * t + 1])
        res = pca2(data)
        assert res.variances[1] <= 1e-9 * res.variances.sum()

    def test_two_dimensional_isometry(self):
        rng = np.random.default_rng(1)
        data = rng.normal(size=(15, 2)) * [3.0, 1.0]
        pts = pca2(data).points
        d_in = np.linalg.norm(data[:, None] - data[None], axis=-1)
        d_out = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        assert np.allclose(d_in, d_out, atol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_eigh(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.normal(size=(40, 5)) * [5.0, 3.0, 2.0, 1.0, 0.5]
        res = pca2(data)
        xc = data - data.mean(axis=0)
        vals, vecs = np.linalg.eigh(xc.T @ xc / len(data))
        assert res.variances == pytest.approx(vals[::-1][:2], abs=1e-6)
        for c in range(2):
            assert abs(res.components[c] @ vecs[:, -1 - c]) == pytest.approx(1.0, abs=1e-6)
            assert res.components[c][np.argmax(np.abs(res.components[c]))] > 0

    def test_sparse_input(self):
        texts = [organized([["a", "b"], ["c"]], "x"), organized([["a"], ["d", "d"]], "y"), organized([["e"]], "z")]
        m = book_tfidf_matrix(texts)
        assert m.shape == (3, 5)
        assert pca2(m).points.shape == (3, 2)

    def test_nonconvergence(self):
        # two equal top eigenvalues make the iterate wander
        data = np.array([[1.0, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 0.1], [0, 0, -0.1]])
        with pytest.raises(PowerIterationError) as info:
            pca2(data, tol=1e-300, max_iter=5)
        assert info.value.iterations == 5

    def test_too_few(self):
        with pytest.raises(ValueError):
            pca2(np.ones((2, 3)))


def test_loo_classifier():
    rng = random.Random(0)
    recs = [FeatureRecord(str(i), lab, {"f": rng.gauss(mu, 0.3), "g": rng.gauss(0, 1)})
            for i, (lab, mu) in enumerate(product(["a", "b"], [0, 0, 0, 0, 0, 0]))]
    recs = [FeatureRecord(r.book_id, r.label, {**r.features, "f": r.features["f"] + (3 if r.label == "b" else 0)})
            for r in recs]
    assert loo_nearest_centroid_accuracy(recs, ["f", "g"]) == 1.0


def test_shuffle_seeds_deterministic():
    a = shuffle_seeds(["b", "a", "c"], 0)
    assert a == shuffle_seeds(["c", "a", "b"], 0)
    assert len(set(a.values())) == 3 and all(0 <= v < 2**63 for v in a.values())
    assert a != shuffle_seeds(["a", "b", "c"], 1)
