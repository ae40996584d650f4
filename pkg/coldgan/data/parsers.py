"""Readers and writers for the supported rating-log formats.

``movielens``  ``UserID::MovieID::Rating::Timestamp``
``csv``        ``user,item,rating,timestamp`` with an optional header line
``canonical``  ``#users=M items=N`` header, then tab-separated index rows
"""

from __future__ import annotations

import csv
import json
import re
import sys
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Sequence, Tuple

from coldgan.errors import DataError, ParseError, RatingScaleError
from coldgan.utils.fileio import write_json_atomic, write_text_atomic

from .log import RATING_SCALE, Interaction, InteractionLog

CANONICAL_HEADER = re.compile(r"#users=(\d+) items=(\d+)\Z")
CSV_HEADER = "user,item,rating,timestamp"
VOCAB_FILENAME = "vocab.json"

Parser = Callable[[bytes | str], InteractionLog]


def _decode(text: bytes | str) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"rating log is not valid UTF-8: {exc}") from exc
    return text


def _numbered_lines(text: str) -> Iterator[Tuple[int, str]]:
    # splitlines() accepts LF and CRLF alike.
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield number, line.strip()


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def _build_interaction(line_number: int, fields: Sequence[str]) -> Interaction:
    user_id, item_id, rating_text, timestamp_text = (field.strip() for field in fields)
    if not user_id or not item_id:
        raise ParseError(line_number, "empty user or item id")
    try:
        rating = float(rating_text)
    except ValueError as exc:
        raise ParseError(line_number, f"rating {rating_text!r} is not a number") from exc
    try:
        timestamp = int(timestamp_text)
    except ValueError as exc:
        raise ParseError(line_number, f"timestamp {timestamp_text!r} is not an integer") from exc

    low, high = RATING_SCALE
    if not low <= rating <= high:
        raise RatingScaleError(line_number, f"rating {rating} outside scale [{low:g}, {high:g}]")
    if timestamp < 0:
        raise RatingScaleError(line_number, f"negative timestamp {timestamp}")
    return Interaction(sys.intern(user_id), sys.intern(item_id), rating, timestamp)


def parse_movielens(text: bytes | str) -> InteractionLog:
    """Parse a MovieLens ``ratings.dat`` style log."""

    records: List[Interaction] = []
    for number, line in _numbered_lines(_decode(text)):
        fields = line.split("::")
        if len(fields) != 4:
            raise ParseError(number, f"expected 4 '::'-separated fields, got {len(fields)}")
        records.append(_build_interaction(number, fields))
    return InteractionLog.from_interactions(records)


def parse_csv_ratings(text: bytes | str) -> InteractionLog:
    """Parse ``user,item,rating,timestamp`` rows; a first row with a non-numeric rating is a header."""

    records: List[Interaction] = []
    first = True
    for number, line in _numbered_lines(_decode(text)):
        fields = next(csv.reader([line]))
        if len(fields) != 4:
            raise ParseError(number, f"expected 4 comma-separated fields, got {len(fields)}")
        if first:
            first = False
            if not _is_number(fields[2].strip()):
                continue
        records.append(_build_interaction(number, fields))
    return InteractionLog.from_interactions(records)


def parse_user_ratings(text: bytes | str) -> List[Tuple[str, float, int]]:
    """Parse a new user's `item_id,rating,timestamp` rows; a non-numeric first rating marks a header."""

    rows: List[Tuple[str, float, int]] = []
    first = True
    for number, line in _numbered_lines(_decode(text)):
        fields = next(csv.reader([line]))
        if len(fields) != 3:
            raise ParseError(number, f"expected 3 comma-separated fields, got {len(fields)}")
        if first:
            first = False
            if not _is_number(fields[1].strip()):
                continue
        record = _build_interaction(number, ["new-user", *fields])
        rows.append((record.item_id, record.rating, record.timestamp))
    return rows


def parse_canonical(
    text: bytes | str,
    user_ids: Sequence[str] | None = None,
    item_ids: Sequence[str] | None = None,
) -> InteractionLog:
    """Parse the canonical tab-separated dump.

    Without ``user_ids``/``item_ids`` the indices themselves become the ids.
    """

    lines = list(_numbered_lines(_decode(text)))
    if not lines:
        raise ParseError(1, "missing '#users=M items=N' header")
    header_number, header = lines[0]
    match = CANONICAL_HEADER.match(header)
    if match is None:
        raise ParseError(header_number, f"malformed header {header!r}")
    num_users, num_items = int(match.group(1)), int(match.group(2))
    if user_ids is not None and len(user_ids) != num_users:
        raise DataError(f"user vocabulary has {len(user_ids)} ids, header declares {num_users}")
    if item_ids is not None and len(item_ids) != num_items:
        raise DataError(f"item vocabulary has {len(item_ids)} ids, header declares {num_items}")

    records: List[Interaction] = []
    for number, line in lines[1:]:
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(number, f"expected 4 tab-separated fields, got {len(fields)}")
        try:
            user, item = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise ParseError(number, "user and item must be integer indices") from exc
        if not (0 <= user < num_users and 0 <= item < num_items):
            raise ParseError(number, f"index ({user}, {item}) outside declared vocabulary")
        user_id = user_ids[user] if user_ids is not None else str(user)
        item_id = item_ids[item] if item_ids is not None else str(item)
        records.append(_build_interaction(number, [user_id, item_id, fields[2], fields[3]]))

    log = InteractionLog.from_interactions(records)
    if (log.num_users, log.num_items) != (num_users, num_items):
        raise ParseError(
            header_number,
            f"header declares {num_users} users / {num_items} items, rows contain "
            f"{log.num_users} / {log.num_items}",
        )
    return log


def _format_rating(rating: float) -> str:
    return str(int(rating)) if float(rating).is_integer() else repr(float(rating))


def _joined(lines: List[str]) -> str:
    return "".join(line + "\n" for line in lines)


def format_movielens(log: InteractionLog) -> str:
    return _joined(
        [
            f"{record.user_id}::{record.item_id}::{_format_rating(record.rating)}::{record.timestamp}"
            for record in log.interactions
        ]
    )


def format_csv(log: InteractionLog) -> str:
    rows = [
        f"{record.user_id},{record.item_id},{_format_rating(record.rating)},{record.timestamp}"
        for record in log.interactions
    ]
    return _joined([CSV_HEADER] + rows)


def format_canonical(log: InteractionLog) -> str:
    rows = [
        f"{log.user_vocab[record.user_id]}\t{log.item_vocab[record.item_id]}\t"
        f"{_format_rating(record.rating)}\t{record.timestamp}"
        for record in log.interactions
    ]
    return _joined([f"#users={log.num_users} items={log.num_items}"] + rows)


PARSERS: Dict[str, Parser] = {
    "movielens": parse_movielens,
    "csv": parse_csv_ratings,
    "canonical": parse_canonical,
}


def load_log(path: Path, fmt: str) -> InteractionLog:
    """Read ``path`` with the parser registered for ``fmt``.

    A canonical dump picks up the ``vocab.json`` sidecar next to it when present.
    """

    try:
        parser = PARSERS[fmt]
    except KeyError as exc:
        raise DataError(f"unknown dataset format {fmt!r}; expected one of {sorted(PARSERS)}") from exc
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    if fmt == "canonical":
        vocab_path = path.parent / VOCAB_FILENAME
        if vocab_path.exists():
            vocab = json.loads(vocab_path.read_text(encoding="utf-8"))
            return parse_canonical(path.read_bytes(), vocab.get("users"), vocab.get("items"))
    return parser(path.read_bytes())


def write_canonical_dump(log: InteractionLog, path: Path) -> None:
    """Write the canonical dump to ``path`` and its id vocabularies beside it."""

    write_text_atomic(path, format_canonical(log))
    write_json_atomic(
        path.parent / VOCAB_FILENAME,
        {"users": list(log.user_ids), "items": list(log.item_ids)},
    )
