"""Rating-log ingestion, filtering, splitting and vector construction."""

from .log import RATING_SCALE, Interaction, InteractionLog, filter_sparse
from .parsers import (
    format_canonical,
    format_csv,
    format_movielens,
    load_log,
    parse_canonical,
    parse_csv_ratings,
    parse_movielens,
    parse_user_ratings,
    write_canonical_dump,
)
from .split import DatasetSplit, split_users
from .stats import DatasetStats, dataset_fingerprint, dataset_stats, format_stats_table
from .vectors import (
    RatingVector,
    RelevanceVector,
    build_rating_vector,
    cold_input,
    held_out_relevant,
    rating_vector_from_rows,
    relevance_vector,
)

__all__ = [
    "RATING_SCALE",
    "Interaction",
    "InteractionLog",
    "filter_sparse",
    "format_canonical",
    "format_csv",
    "format_movielens",
    "load_log",
    "parse_canonical",
    "parse_csv_ratings",
    "parse_movielens",
    "parse_user_ratings",
    "write_canonical_dump",
    "DatasetSplit",
    "split_users",
    "DatasetStats",
    "dataset_fingerprint",
    "dataset_stats",
    "format_stats_table",
    "RatingVector",
    "RelevanceVector",
    "build_rating_vector",
    "cold_input",
    "held_out_relevant",
    "rating_vector_from_rows",
    "relevance_vector",
]
