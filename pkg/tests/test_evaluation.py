import csv
import itertools
import math

import numpy as np
import pytest

from coldgan.data.log import Interaction, InteractionLog
from coldgan.data.split import DatasetSplit
from coldgan.data.vectors import RatingVector
from coldgan.errors import DomainError, EvaluationError
from coldgan.evaluation.baselines import PopularityScorer, RandomScorer, popularity_baseline, untrained_scorer
from coldgan.evaluation.evaluate import (
    cold_cases,
    evaluate,
    format_metrics_table,
    write_per_user_csv,
)
from coldgan.evaluation.metrics import ndcg_at_k, precision_at_k, recall_at_k
from coldgan.evaluation.recommend import rank_items, recommend, recommend_with
from coldgan.gan.model import ArchitectureConfig, GanModel, Generator, TrainConfig, generate
from coldgan.nn import Activation, DenseLayer, Mlp
from coldgan.utils.seeding import substream


def _cold(values):
    values = np.asarray(values, dtype=float)
    return RatingVector(values=values, rated_order=tuple(int(i) for i in np.flatnonzero(values)))


def _bias_generator(scores):
    n = len(scores)
    return Generator(Mlp([DenseLayer(np.zeros((n, n)), np.asarray(scores, dtype=float), Activation.IDENTITY)]))


class ClusterOracle:
    """Scores the items of the cluster the cold input belongs to (planted corpus)."""

    name = "oracle"

    def __init__(self, log):
        self._cluster = np.array([int(item_id[1:]) // 5 for item_id in log.item_ids])

    def score(self, cold):
        cluster = int(np.bincount(self._cluster[cold.support()]).argmax())
        return (self._cluster == cluster).astype(float)


def test_recommend_hand_ranked_example():
    cold = _cold([0, 0, 4, 0])

    ranked = recommend(_bias_generator([0.1, 0.9, 0.8, 0.3]), cold, k=2)

    assert ranked.items == (1, 3)
    assert ranked.scores == (0.9, 0.3)


def test_ties_break_by_item_index():
    cold = _cold([0, 5, 0, 0, 0, 0])

    assert rank_items(np.ones(6), cold, k=3).items == (0, 2, 3)


def test_k_equal_to_pool_returns_every_unrated_item():
    cold = _cold([3, 0, 0, 1, 0])

    assert sorted(rank_items(np.arange(5.0), cold, k=3).items) == [1, 2, 4]


@pytest.mark.parametrize("k", [0, 4])
def test_k_outside_pool_is_a_domain_error(k):
    with pytest.raises(DomainError):
        rank_items(np.zeros(5), _cold([3, 0, 0, 1, 0]), k=k)


def test_user_who_rated_everything_gets_nothing():
    with pytest.raises(DomainError):
        rank_items(np.zeros(3), _cold([1, 2, 3]), k=1)


def test_recommendation_invariants_on_random_scores():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 15))
        values = np.where(rng.random(n) < 0.3, rng.integers(1, 6, n), 0)
        if values.all():
            values[0] = 0
        cold = _cold(values)
        pool = n - cold.count
        k = int(rng.integers(1, pool + 1))
        scores = np.round(rng.normal(size=n), 1)

        ranked = rank_items(scores, cold, k)

        assert len(ranked.items) == k
        assert len(set(ranked.items)) == k
        assert not set(ranked.items) & set(cold.rated_order)
        assert all(a >= b for a, b in zip(ranked.scores, ranked.scores[1:]))


def test_worked_metric_example():
    recs = ["A", "B", "C", "D", "E"]
    relevant = {"A", "C"}

    assert precision_at_k(recs, relevant, 5) == 0.4
    assert recall_at_k(recs, relevant, 5) == 1.0
    assert ndcg_at_k(recs, relevant, 5) == pytest.approx(1.5 / (1 + 1 / math.log2(3)), abs=1e-12)
    assert ndcg_at_k(recs, relevant, 5) == pytest.approx(0.91972, abs=1e-4)


def test_metric_edge_cases():
    assert precision_at_k([1, 2, 3], {9}, 3) == 0.0
    assert recall_at_k([1, 2, 3], {9}, 3) == 0.0
    assert precision_at_k([4, 5], {4, 5}, 2) == recall_at_k([4, 5], {4, 5}, 2) == 1.0
    assert ndcg_at_k([0, 1, 2, 3, 7], {7}, 5) == pytest.approx(1 / math.log2(6))
    assert ndcg_at_k([0, 1, 2, 3, 7], {7}, 5) == pytest.approx(0.38685, abs=1e-5)
    with pytest.raises(DomainError):
        precision_at_k([1], set(), 1)
    with pytest.raises(DomainError):
        ndcg_at_k([1], {1}, 0)


def _brute_force(ranking, relevant, k):
    flags = [item in relevant for item in ranking[:k]]
    hits = flags.count(True)
    gains = [1.0 / math.log2(p + 2) if flag else 0.0 for p, flag in enumerate(flags)]
    ideal = [1.0 / math.log2(p + 2) for p in range(min(len(relevant), k))]
    dcg = 0.0
    for gain in gains:
        if gain:
            dcg += gain
    best = 0.0
    for gain in ideal:
        best += gain
    return hits / k, hits / len(relevant), dcg / best


def test_metrics_match_brute_force_exhaustively():
    for n in range(1, 7):
        items = list(range(n))
        subsets = [set(c) for size in range(1, n + 1) for c in itertools.combinations(items, size)]
        for ranking in itertools.permutations(items):
            for relevant in subsets:
                for k in range(1, min(5, n) + 1):
                    p, r, ndcg = _brute_force(ranking, relevant, k)
                    assert precision_at_k(ranking, relevant, k) == p
                    assert recall_at_k(ranking, relevant, k) == r
                    assert ndcg_at_k(ranking, relevant, k) == ndcg
                    top = min(len(relevant), k)
                    assert (ndcg == 1.0) == all(item in relevant for item in ranking[:top])


def test_metrics_are_invariant_under_relabelling():
    rng = np.random.default_rng(1)
    recs = list(rng.permutation(10))
    relevant = {1, 4, 7}
    relabel = {item: int(label) for item, label in enumerate(rng.permutation(10))}

    mapped_recs = [relabel[item] for item in recs]
    mapped_relevant = {relabel[item] for item in relevant}

    for metric in (precision_at_k, recall_at_k, ndcg_at_k):
        assert metric(recs, relevant, 5) == metric(mapped_recs, mapped_relevant, 5)


def test_ndcg_drops_when_relevant_item_moves_down():
    relevant = {"r"}
    rankings = [["r", "a", "b", "c"], ["a", "r", "b", "c"], ["a", "b", "r", "c"], ["a", "b", "c", "r"]]

    values = [ndcg_at_k(ranking, relevant, 4) for ranking in rankings]

    assert all(a >= b for a, b in zip(values, values[1:]))


def test_evaluate_excludes_users_without_held_out_relevance():
    log = InteractionLog.from_interactions(
        [Interaction("flat", "a", 4.0, 1), Interaction("flat", "b", 4.0, 2), Interaction("flat", "c", 4.0, 3)]
    )
    split = DatasetSplit(train_users=(), test_users=(0,), seed=0)

    with pytest.raises(EvaluationError) as excinfo:
        evaluate(PopularityScorer(np.zeros(3)), log, split, ks=(1,))

    assert excinfo.value.excluded == 1


def test_perfect_scorer_scores_one(planted):
    log = planted(0)
    split = DatasetSplit(train_users=tuple(range(40)), test_users=tuple(range(40, 50)), seed=0)

    report = evaluate(ClusterOracle(log), log, split, ks=(3,), cold_keep=2)

    assert report.precision[3] == report.recall[3] == report.ndcg[3] == 1.0
    assert report.evaluated + report.excluded == 10


def test_random_scorer_matches_analytic_expectation(planted):
    log = planted(2)
    split = DatasetSplit(train_users=(0,), test_users=tuple(range(1, 50)), seed=0)
    cases, _ = cold_cases(log, split.test_users, cold_keep=2)

    report = evaluate(RandomScorer(seed=11), log, split, ks=(5,), cold_keep=2)

    expected = 0.0
    variance = 0.0
    for case in cases:
        pool = log.num_items - case.cold.count
        relevant = len(case.relevant)
        expected += relevant / pool
        hits_variance = 5 * relevant / pool * (pool - relevant) / pool * (pool - 5) / (pool - 1)
        variance += hits_variance / 25
    expected /= len(cases)
    sigma = math.sqrt(variance) / len(cases)
    assert abs(report.precision[5] - expected) <= 3 * sigma


def test_popularity_ranks_most_rated_item_first():
    log = InteractionLog.from_interactions(
        [
            Interaction("u0", "i0", 3.0, 1),
            Interaction("u0", "i1", 4.0, 2),
            Interaction("u1", "i1", 5.0, 1),
            Interaction("u1", "i2", 2.0, 2),
            Interaction("u2", "i1", 1.0, 1),
            Interaction("u2", "i3", 2.0, 2),
            Interaction("u3", "i4", 4.0, 1),
        ]
    )

    scorer = popularity_baseline(log, users=(0, 1, 2))
    scores = scorer.score(_cold([0, 0, 0, 0, 0]))

    assert scores.tolist() == [1.0, 3.0, 1.0, 1.0, 0.0]
    assert recommend_with(scorer, _cold([0, 0, 0, 0, 3]), k=1).items == (1,)
    assert recommend_with(scorer, _cold([0, 0, 0, 0, 0]), k=4).items == (1, 0, 2, 3)


def test_untrained_scorer_uses_the_init_stream():
    config = TrainConfig(seed=4)
    arch = ArchitectureConfig(g_hidden=5, d_hidden=3)
    cold = _cold([0, 5, 0, 0, 2, 0])

    scorer = untrained_scorer(6, arch, config)
    fresh = GanModel.initialize(6, arch, config, substream(4, "init"))

    assert scorer.name == "untrained"
    assert np.array_equal(scorer.score(cold), generate(fresh.generator, cold.values / 5.0))


def test_evaluate_is_deterministic_and_serialisable(planted, tmp_path):
    log = planted(0)
    split = DatasetSplit(train_users=tuple(range(40)), test_users=tuple(range(40, 50)), seed=0)
    model = GanModel.initialize(log.num_items, ArchitectureConfig(8, 4), TrainConfig(), np.random.default_rng(0))

    first = evaluate(model, log, split, cold_keep=2, seed=0, config_hash="h", keep_per_user=True)
    second = evaluate(model, log, split, cold_keep=2, seed=0, config_hash="h", keep_per_user=True)

    assert first.to_dict() == second.to_dict()
    assert first.to_dict()["ks"] == [5, 10]
    assert all(0.0 <= value <= 1.0 for block in ("precision", "recall", "ndcg") for value in first.to_dict()[block].values())
    table = format_metrics_table(first)
    assert "nDCG@k" in table
    assert "Evaluated users: 10" in table

    path = tmp_path / "per_user.csv"
    write_per_user_csv(first, path)
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["user", "k", "p", "r", "ndcg"]
    assert len(rows) == 1 + 2 * first.evaluated
