import json

import numpy as np
import pytest

from coldgan.data import (
    Interaction,
    InteractionLog,
    build_rating_vector,
    cold_input,
    dataset_fingerprint,
    dataset_stats,
    filter_sparse,
    format_canonical,
    format_csv,
    format_movielens,
    format_stats_table,
    held_out_relevant,
    load_log,
    parse_canonical,
    parse_csv_ratings,
    parse_movielens,
    parse_user_ratings,
    rating_vector_from_rows,
    relevance_vector,
    split_users,
    write_canonical_dump,
)
from coldgan.errors import (
    DataError,
    DomainError,
    EmptyDatasetError,
    ParseError,
    RatingScaleError,
    UnknownUserError,
)


def _log_with_items(num_items, user_ratings):
    """A log whose item indices equal the item numbers: an anchor user touches every item first."""

    records = [Interaction("anchor", str(item), 3.0, 0) for item in range(num_items)]
    records += [Interaction("user", str(item), rating, ts) for item, rating, ts in user_ratings]
    return InteractionLog.from_interactions(records)


def test_parse_movielens_builds_vocabularies_in_first_appearance_order():
    log = parse_movielens(b"7::100::5::10\r\n3::200::4::11\n7::200::2::12\n")

    assert log.num_users == 2
    assert log.num_items == 2
    assert log.user_ids == ("7", "3")
    assert log.item_ids == ("100", "200")
    assert log.num_ratings == 3


def test_duplicate_pair_keeps_latest_timestamp():
    log = parse_movielens("1::10::2::5\n1::10::4::9\n1::10::1::7\n")

    assert log.num_ratings == 1
    assert log.interactions[0].rating == 4.0
    assert log.interactions[0].timestamp == 9


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as excinfo:
        parse_movielens("1::10::2::5\n\n1::11::3\n")

    assert excinfo.value.line_number == 3


@pytest.mark.parametrize("line", ["1::10::6::5", "1::10::0.5::5", "1::10::3::-1"])
def test_rating_outside_scale_is_rejected(line):
    with pytest.raises(RatingScaleError):
        parse_movielens(line)


def test_non_utf8_input_is_a_data_error():
    with pytest.raises(DataError):
        parse_movielens(b"\xff\xfe::1::2::3")


def test_csv_header_is_detected_and_skipped():
    with_header = parse_csv_ratings("user,item,rating,timestamp\na,x,4,1\nb,y,2.5,2\n")
    without_header = parse_csv_ratings("a,x,4,1\nb,y,2.5,2\n")

    assert with_header.interactions == without_header.interactions
    assert with_header.interactions[1].rating == 2.5


def test_formats_round_trip(tiny_log):
    assert parse_movielens(format_movielens(tiny_log)) == tiny_log
    assert parse_csv_ratings(format_csv(tiny_log)) == tiny_log
    assert parse_canonical(format_canonical(tiny_log), tiny_log.user_ids, tiny_log.item_ids) == tiny_log


def test_canonical_header_must_match_rows(tiny_log):
    text = format_canonical(tiny_log).replace("#users=3 items=4", "#users=5 items=4")

    with pytest.raises(ParseError):
        parse_canonical(text)


def test_canonical_dump_keeps_original_ids(tmp_path, tiny_log):
    path = tmp_path / "dataset" / "ratings.tsv"

    write_canonical_dump(tiny_log, path)

    assert json.loads((path.parent / "vocab.json").read_text())["items"] == ["m1", "m2", "m3", "m4"]
    assert load_log(path, "canonical") == tiny_log


def test_load_log_rejects_unknown_format_and_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_log(tmp_path / "ratings.dat", "parquet")
    with pytest.raises(DataError):
        load_log(tmp_path / "ratings.dat", "movielens")


def test_filter_sparse_drops_user_below_threshold():
    records = [Interaction("heavy", f"i{n}", 4.0, n) for n in range(15)]
    records += [Interaction("light", f"i{n}", 4.0, n) for n in range(14)]
    log = InteractionLog.from_interactions(records)

    filtered = filter_sparse(log, 15, 1)

    assert filtered.user_ids == ("heavy",)
    assert filtered.num_ratings == 15


def test_filter_sparse_counts_items_after_the_user_pass():
    records = [Interaction(f"u{n}", "popular", 4.0, n) for n in range(3)]
    records += [Interaction("u0", f"solo{n}", 4.0, 10 + n) for n in range(2)]
    records += [Interaction("u9", "shared", 4.0, 20)]
    records += [Interaction("u0", "shared", 4.0, 21), Interaction("u1", "shared", 4.0, 22)]
    log = InteractionLog.from_interactions(records)

    filtered = filter_sparse(log, 2, 2)

    # u9 has one rating, so "shared" falls to two raters and survives; solo items do not.
    assert set(filtered.item_ids) == {"popular", "shared"}
    assert "u9" not in filtered.user_vocab


def test_filter_sparse_identity_and_idempotence(planted):
    log = planted(0)

    assert filter_sparse(log, 1, 1) == log
    once = filter_sparse(log, 12, 1)
    assert filter_sparse(once, 12, 1) == once


def test_filter_sparse_rejects_zero_threshold(tiny_log):
    with pytest.raises(DomainError):
        filter_sparse(tiny_log, 0, 3)
    with pytest.raises(DomainError):
        filter_sparse(tiny_log, 15, 0)


def test_split_users_sizes_and_determinism():
    records = [Interaction(f"u{n}", "i", 3.0, n) for n in range(10)]
    log = InteractionLog.from_interactions(records)

    split = split_users(log, 0.8, seed=42)

    assert len(split.train_users) == 8
    assert len(split.test_users) == 2
    assert set(split.train_users).isdisjoint(split.test_users)
    assert split_users(log, 0.8, seed=42) == split


def test_split_users_floors_train_size():
    log = InteractionLog.from_interactions([Interaction(f"u{n}", "i", 3.0, n) for n in range(5)])

    assert len(split_users(log, 0.8, seed=0).train_users) == 4


def test_split_users_errors():
    with pytest.raises(EmptyDatasetError):
        split_users(InteractionLog.from_interactions([]), 0.8, seed=0)
    with pytest.raises(DomainError):
        split_users(InteractionLog.from_interactions([Interaction("u", "i", 3.0, 0)]), 1.0, seed=0)


def test_build_rating_vector_layout_and_order():
    log = _log_with_items(4, [(3, 5.0, 10), (1, 2.0, 20)])

    vector = build_rating_vector(log, log.user_vocab["user"])

    assert vector.values.tolist() == [0.0, 2.0, 0.0, 5.0]
    assert vector.rated_order == (3, 1)


def test_build_rating_vector_breaks_timestamp_ties_by_item_index():
    forward = _log_with_items(4, [(2, 4.0, 7), (1, 3.0, 7)])
    backward = _log_with_items(4, [(1, 3.0, 7), (2, 4.0, 7)])

    assert build_rating_vector(forward, 1).rated_order == (1, 2)
    assert build_rating_vector(backward, 1).rated_order == (1, 2)


def test_build_rating_vector_for_user_without_ratings():
    log = InteractionLog(
        interactions=(Interaction("a", "x", 4.0, 1),),
        user_vocab={"a": 0, "ghost": 1},
        item_vocab={"x": 0},
    )

    vector = build_rating_vector(log, 1)

    assert vector.values.tolist() == [0.0]
    assert vector.rated_order == ()


def test_build_rating_vector_unknown_user(tiny_log):
    with pytest.raises(UnknownUserError):
        build_rating_vector(tiny_log, 99)
    with pytest.raises(LookupError):
        build_rating_vector(tiny_log, -1)


def test_cold_input_keeps_earliest_ratings():
    ratings = [(item, 1.0 + item % 5, 100 - item) for item in range(25)]
    vector = build_rating_vector(_log_with_items(25, ratings), 1)

    cold = cold_input(vector, keep=10)

    assert cold.count == 10
    assert cold.rated_order == tuple(range(24, 14, -1))
    assert set(cold.support()) <= set(vector.support())
    assert np.array_equal(cold.values[list(cold.rated_order)], vector.values[list(cold.rated_order)])


def test_cold_input_under_full_and_invalid_keep():
    vector = build_rating_vector(_log_with_items(6, [(n, 4.0, n) for n in range(6)]), 1)

    assert cold_input(vector, keep=10).same_as(vector)
    assert cold_input(vector, keep=6).same_as(vector)
    with pytest.raises(DomainError):
        cold_input(vector, keep=0)


@pytest.mark.parametrize(
    "ratings, expected",
    [
        ([3.0, 5.0, 4.0], [1]),
        ([4.0, 4.0], []),
        ([5.0], []),
    ],
)
def test_relevance_vector_uses_strict_mean(ratings, expected):
    log = _log_with_items(len(ratings), [(n, r, n) for n, r in enumerate(ratings)])

    relevance = relevance_vector(build_rating_vector(log, 1))

    assert relevance.items().tolist() == expected


def test_relevance_is_subset_of_support(planted):
    log = planted(1)
    for user in range(log.num_users):
        vector = build_rating_vector(log, user)
        assert set(relevance_vector(vector).items()) <= set(vector.support())


def test_held_out_relevant_removes_cold_items():
    log = _log_with_items(4, [(0, 5.0, 1), (1, 5.0, 2), (2, 1.0, 3), (3, 5.0, 4)])
    warm = build_rating_vector(log, 1)

    assert held_out_relevant(warm, cold_input(warm, keep=1)) == frozenset({1, 3})


def test_dataset_stats_and_table(tiny_log):
    stats = dataset_stats(tiny_log)

    assert (stats.users, stats.items, stats.ratings) == (3, 4, 8)
    assert stats.sparsity == pytest.approx(1 - 8 / 12)
    assert "sparsity" in format_stats_table(stats)


def test_dataset_stats_empty_log():
    stats = dataset_stats(InteractionLog.from_interactions([]))

    assert stats.to_dict() == {"users": 0, "items": 0, "ratings": 0, "sparsity": 0.0}


def test_fingerprint_is_content_addressed(tiny_log):
    assert dataset_fingerprint(tiny_log) == dataset_fingerprint(parse_csv_ratings(format_csv(tiny_log)))
    assert dataset_fingerprint(tiny_log)["records"] == 8


def test_user_ratings_file_maps_to_known_items():
    rows = parse_user_ratings("item_id,rating,timestamp\nm3,5,20\nm1,4,10\nzz,3,5\n")

    vector, unknown = rating_vector_from_rows(rows, {"m1": 0, "m2": 1, "m3": 2})

    assert unknown == ["zz"]
    assert vector.values.tolist() == [4.0, 0.0, 5.0]
    assert vector.rated_order == (0, 2)
