import random

import pytest

from ecrkit import (
    EdgeSet,
    EidConfig,
    MethodSpec,
    bucket_keys,
    cluster,
    connected_components,
    edges_from_buckets,
    pairwise_oracle,
)
from ecrkit.cluster import components_from_keys, pair_mass
from ecrkit.synthetic import random_corpus, synthetic_lexicons

LEX = synthetic_lexicons()

# The full method matrix: bases, VN variants, and/or combinations, and the
# annotator combinations.
METHOD_MATRIX = [
    MethodSpec(base="lem"),
    MethodSpec(base="pb", annotator="A1"),
    MethodSpec(base="pb_vn", annotator="A1"),
    MethodSpec(base="eid_n", annotator="A1"),
    MethodSpec(base="eid_lt", annotator="A1"),
    MethodSpec(base="eid_n_vn", annotator="A1"),
    MethodSpec(base="eid_lt_vn", annotator="A1"),
    MethodSpec(base="eid_n", combiner="and", second="eid_lt", annotator="A1"),
    MethodSpec(base="eid_n", combiner="or", second="eid_lt", annotator="A1"),
    MethodSpec(base="eid_n_vn", combiner="and", second="eid_lt_vn", annotator="A1"),
    MethodSpec(base="eid_n_vn", combiner="or", second="eid_lt_vn", annotator="A1"),
    MethodSpec(base="eid_n", annotator="A1", annotator_mode="or",
               second_annotator="A2"),
    MethodSpec(base="eid_n", annotator="A1", annotator_mode="and",
               second_annotator="A2"),
    MethodSpec(base="eid_n", combiner="or", second="eid_lt", annotator="A1",
               annotator_mode="or", second_annotator="A2"),
]


class TestBucketKeys:
    def test_lem_shares_key(self, acq_corpus, lexicons):
        keys = bucket_keys(acq_corpus, MethodSpec(base="lem"), lexicons)
        assert keys["m1"] == keys["m2"] == {"acquire"}

    def test_pb_distinguishes_rolesets(self, acq_corpus, lexicons):
        keys = bucket_keys(acq_corpus, MethodSpec(base="pb", annotator="A1"),
                           lexicons)
        assert keys["m1"] == {"acquire.01"}
        assert keys["m3"] == {"purchase.01"}
        assert keys["m1"] != keys["m3"]

    def test_pb_vn_merges_synonyms(self, acq_corpus, lexicons):
        keys = bucket_keys(acq_corpus, MethodSpec(base="pb_vn", annotator="A1"),
                           lexicons)
        assert keys["m1"] == keys["m3"] == {"13.5.1"}

    def test_and_with_empty_side_yields_nothing(self, acq_corpus, lexicons):
        spec = MethodSpec(base="eid_n", combiner="and", second="eid_lt",
                          annotator="A1")
        keys = bucket_keys(acq_corpus, spec, lexicons)
        # m4s has no ARG-Time, so its eid_lt side is empty
        assert keys["m4s"] == set()
        assert keys["m1"]

    def test_missing_annotator_contributes_no_keys(self, acq_corpus, lexicons):
        keys = bucket_keys(acq_corpus, MethodSpec(base="eid_n", annotator="A9"),
                           lexicons)
        assert all(v == set() for v in keys.values())


class TestEdges:
    def test_complete_subgraph(self):
        edges = edges_from_buckets({"a": {"k1"}, "b": {"k1"}, "c": {"k1"}})
        assert edges.edges == {("a", "b"), ("a", "c"), ("b", "c")}

    def test_singleton_buckets_no_edges(self):
        edges = edges_from_buckets({"a": {"k1"}, "b": {"k2"}})
        assert edges.edges == set()

    def test_or_union(self):
        e1 = EdgeSet({("a", "b")})
        e2 = EdgeSet({("b", "c")})
        assert e1.union(e2).edges == {("a", "b"), ("b", "c")}

    def test_pair_mass_formula(self):
        rng = random.Random(0)
        for _ in range(20)             :
            b = rng.randint(1, 40)
            keys = {f"m{i}": {"k"} for i in range(b)}
            assert pair_mass(keys) == b * (b - 1) // 2


class TestConnectedComponents:
    def test_transitivity(self):
        ids = list("abcdef")
        edges = EdgeSet({("a", "b"), ("b", "c"), ("d", "e")})
        part = connected_components(ids, edges)
        assert part.as_sets() == {
            frozenset("abc"), frozenset("de"), frozenset("f")
        }

    def test_no_edges_all_singletons(self):
        ids = ["x", "y", "z"]
        part = connected_components(ids, EdgeSet())
        assert part.as_sets() == {frozenset({i}) for i in ids}

    def test_unknown_endpoint_rejected(self):
        with pytest.raises(ValueError, match="ghost"):
            connected_components(["a"], EdgeSet({("a", "ghost")}))

    @pytest.mark.parametrize("kernel", ["numba", "python"])
    def test_kernels_agree(self, kernel):
        rng = random.Random(5)
        ids = [f"m{i}" for i in range(200)]
        edges = EdgeSet()
        for _ in range(300):
            edges.add(rng.choice(ids), rng.choice(ids))
        assert connected_components(ids, edges, kernel=kernel) == \
            connected_components(ids, edges, kernel="python")

    def test_env_flag_selects_fallback(self, monkeypatch):
        from ecrkit import kernels
        monkeypatch.setenv(kernels.NO_NUMBA_ENV, "1")
        assert not kernels.use_numba()
        monkeypatch.delenv(kernels.NO_NUMBA_ENV)
        assert kernels.use_numba() == kernels.HAS_NUMBA


class TestCluster:
    def test_coreferent_acquisitions_merge(self, acq_corpus, lexicons):
        part = cluster(acq_corpus, MethodSpec(base="eid_n", annotator="A1"),
                       lexicons)
        assert part.index["m1"] == part.index["m2"]

    def test_related_but_distinct_stays_apart(self, acq_corpus, lexicons):
        part = cluster(acq_corpus, MethodSpec(base="eid_n", annotator="A1"),
                       lexicons)
        assert part.index["m3"] != part.index["m1"]

    def test_empty_corpus(self, lexicons):
        from ecrkit.corpus import Corpus
        part = cluster(Corpus([]), MethodSpec(base="lem"), lexicons)
        assert len(part) == 0

    def test_star_path_equals_edge_path(self, lexicons):
        corpus = random_corpus(150, seed=11)
        for spec in METHOD_MATRIX[:7]:
            keys = bucket_keys(corpus, spec, LEX)
            via_star = components_from_keys(corpus.mention_ids(), keys)
            via_edges = connected_components(
                corpus.mention_ids(), edges_from_buckets(keys))
            assert via_star == via_edges

    def test_determinism_under_shuffle(self):
        from ecrkit.corpus import Corpus, copy_mention, resolve_nested_links
        corpus = random_corpus(100, seed=13)
        spec = MethodSpec(base="eid_n", combiner="or", second="eid_lt",
                          annotator="A1")
        base = cluster(corpus, spec, LEX)
        rng = random.Random(99)
        shuffled_mentions = [copy_mention(m) for m in corpus.mentions]
        rng.shuffle(shuffled_mentions)
        shuffled = Corpus(shuffled_mentions)
        resolve_nested_links(shuffled)
        assert cluster(shuffled, spec, LEX) == base


class TestOracle:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_matrix_equivalence_small(self, seed):
        corpus = random_corpus(random.Random(seed).randint(30, 90), seed=seed)
        for spec in METHOD_MATRIX:
            assert cluster(corpus, spec, LEX) == \
                pairwise_oracle(corpus, spec, LEX), spec.name()

    def test_disjoint_identifiers_never_linked(self, acq_corpus, lexicons):
        part = pairwise_oracle(
            acq_corpus, MethodSpec(base="eid_lt", annotator="A1"), lexicons)
        assert part.index["m1"] != part.index["m3"]

    def test_guard(self, lexicons):
        corpus = random_corpus(10, seed=0)
        import importlib
        cmod = importlib.import_module("ecrkit.cluster")
        old = cmod.ORACLE_GUARD
        cmod.ORACLE_GUARD = 5
        try:
            with pytest.raises(ValueError, match="cluster\\(\\)"):
                pairwise_oracle(corpus, MethodSpec(base="lem"), lexicons)
        finally:
            cmod.ORACLE_GUARD = old


class TestCombinerMonotonicity:
    def test_or_coarsens_and_refines(self):
        corpus = random_corpus(120, seed=21)
        base_n = cluster(corpus, MethodSpec(base="eid_n", annotator="A1"), LEX)
        base_lt = cluster(corpus, MethodSpec(base="eid_lt", annotator="A1"), LEX)
        both_or = cluster(
            corpus, MethodSpec(base="eid_n", combiner="or", second="eid_lt",
                               annotator="A1"), LEX)
        both_and = cluster(
            corpus, MethodSpec(base="eid_n", combiner="and", second="eid_lt",
                               annotator="A1"), LEX)

        def coarsens(fine, coarse):
            return all(
                len({coarse.index[m] for m in c}) == 1 for c in fine.clusters
            )

        assert coarsens(base_n, both_or)
        assert coarsens(base_lt, both_or)
        assert coarsens(both_and, base_n)
        assert coarsens(both_and, base_lt)
