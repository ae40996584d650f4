import math

import numpy as np
import pytest

from coldgan.data.vectors import RatingVector
from coldgan.errors import ConfigError, DomainError
from coldgan.rejuvenate import (
    RejuvenationConfig,
    RejuvenationMode,
    apply_rejuvenation,
    rejuvenate,
    rejuvenate_random,
    retention_probability,
    retention_profile,
)


def _warm(count):
    values = (np.arange(count) % 5 + 1).astype(np.float64)
    return RatingVector(values=values, rated_order=tuple(range(count)))


def test_retention_probability_examples():
    default = RejuvenationConfig()

    assert retention_probability(0, 7, default) == pytest.approx(0.9)
    assert retention_probability(5, 10, RejuvenationConfig(p_min=0.2, p_max=1.0, alpha=2.0)) == pytest.approx(
        0.2 + 0.8 * math.exp(-1), abs=1e-12
    )
    assert retention_probability(5, 10, RejuvenationConfig(p_min=0.2, p_max=1.0, alpha=2.0)) == pytest.approx(
        0.49430, abs=1e-5
    )


def test_retention_probability_decreases_with_rank():
    cfg = RejuvenationConfig()
    values = [retention_probability(i, 40, cfg) for i in range(40)]

    assert all(later < earlier for earlier, later in zip(values, values[1:]))
    assert np.allclose(retention_profile(40, cfg), values, rtol=0, atol=1e-15)


@pytest.mark.parametrize("rank, count", [(3, 3), (-1, 3), (0, 0)])
def test_retention_probability_domain(rank, count):
    with pytest.raises(DomainError):
        retention_probability(rank, count, RejuvenationConfig())


@pytest.mark.parametrize(
    "kwargs",
    [
        {"p_min": 0.5, "p_max": 0.5},
        {"p_min": -0.1},
        {"p_max": 1.1},
        {"alpha": 0.0},
        {"random_keep_prob": 0.0},
        {"mode": "fifo"},
    ],
)
def test_invalid_config_is_rejected(kwargs):
    with pytest.raises(ConfigError):
        RejuvenationConfig(**kwargs)


def test_config_round_trips_through_dict():
    cfg = RejuvenationConfig(p_min=0.05, p_max=0.5, alpha=3.0, mode="random_uniform")

    assert cfg.mode is RejuvenationMode.RANDOM_UNIFORM
    assert RejuvenationConfig.from_dict(cfg.to_dict()) == cfg


def test_near_certain_retention_keeps_everything():
    cfg = RejuvenationConfig(p_min=1.0 - 1e-12, p_max=1.0, alpha=1e-9)
    warm = _warm(50)

    assert rejuvenate(warm, cfg, np.random.default_rng(0)).same_as(warm)


def test_all_dropped_keeps_the_earliest_rating():
    cfg = RejuvenationConfig(p_min=0.0, p_max=1e-12, alpha=1.0)
    warm = RatingVector(values=np.array([0.0, 4.0, 2.0, 5.0]), rated_order=(3, 1, 2))

    cold = rejuvenate(warm, cfg, np.random.default_rng(1))

    assert cold.rated_order == (3,)
    assert cold.values.tolist() == [0.0, 0.0, 0.0, 5.0]


def test_output_is_nonempty_subset_with_unchanged_values():
    warm = _warm(30)
    rng = np.random.default_rng(2)
    for _ in range(200):
        cold = rejuvenate(warm, RejuvenationConfig(), rng)
        assert 1 <= cold.count <= warm.count
        kept = list(cold.rated_order)
        assert kept == [item for item in warm.rated_order if item in set(kept)]
        assert np.array_equal(cold.values[kept], warm.values[kept])


def test_rejuvenate_is_deterministic_per_seed():
    warm = _warm(100)
    first = rejuvenate(warm, RejuvenationConfig(), np.random.default_rng(7))
    second = rejuvenate(warm, RejuvenationConfig(), np.random.default_rng(7))

    assert first.same_as(second)


def test_rejuvenate_consumes_one_uniform_per_rating():
    warm = _warm(64)
    cfg = RejuvenationConfig()
    draws = np.random.default_rng(11).random(warm.count)

    cold = rejuvenate(warm, cfg, np.random.default_rng(11))

    expected = tuple(item for item, u in zip(warm.rated_order, draws) if u < retention_profile(warm.count, cfg)[item])
    assert cold.rated_order == expected


def test_rejuvenate_rejects_empty_vector():
    empty = RatingVector(values=np.zeros(3), rated_order=())

    with pytest.raises(DomainError):
        rejuvenate(empty, RejuvenationConfig(), np.random.default_rng(0))
    with pytest.raises(DomainError):
        rejuvenate_random(empty, RejuvenationConfig(), np.random.default_rng(0))


def test_rejuvenate_per_rank_frequency_matches_closed_form():
    cfg = RejuvenationConfig(p_min=0.1, p_max=0.9, alpha=2.0)
    count, trials = 1000, 100_000
    warm = _warm(count)
    rng = np.random.default_rng(2024)
    kept = np.zeros(count)
    for _ in range(trials):
        kept[list(rejuvenate(warm, cfg, rng).rated_order)] += 1

    assert np.max(np.abs(kept / trials - retention_profile(count, cfg))) < 0.01


def test_random_uniform_keep_one_is_identity():
    warm = _warm(40)

    assert rejuvenate_random(warm, RejuvenationConfig(random_keep_prob=1.0), np.random.default_rng(0)).same_as(warm)


def test_random_uniform_count_is_binomial():
    cold = rejuvenate_random(_warm(1000), RejuvenationConfig(random_keep_prob=0.5), np.random.default_rng(9))

    assert abs(cold.count - 500) <= 3 * math.sqrt(1000 * 0.25)


def test_random_uniform_single_rating_survives():
    warm = _warm(1)
    rng = np.random.default_rng(0)

    for _ in range(20):
        assert rejuvenate_random(warm, RejuvenationConfig(random_keep_prob=0.1), rng).same_as(warm)


def test_flat_time_profile_matches_uniform_marginals():
    time_cfg = RejuvenationConfig(p_min=0.1, p_max=0.6, alpha=1e-9)
    uniform_cfg = RejuvenationConfig(mode=RejuvenationMode.RANDOM_UNIFORM, random_keep_prob=0.6)
    warm = _warm(25)
    trials = 4_000
    time_kept = np.zeros(25)
    uniform_kept = np.zeros(25)
    time_rng, uniform_rng = np.random.default_rng(3), np.random.default_rng(4)
    for _ in range(trials):
        time_kept[list(apply_rejuvenation(warm, time_cfg, time_rng).rated_order)] += 1
        uniform_kept[list(apply_rejuvenation(warm, uniform_cfg, uniform_rng).rated_order)] += 1

    assert np.max(np.abs(time_kept - uniform_kept) / trials) < 0.05
