"""ISO-8601 parsing/formatting helpers.

All timestamps in the system are timezone-aware UTC datetimes; calendar
dates (embargo expiries) are plain ``datetime.date``. Python 3.10's
``fromisoformat`` does not accept a trailing ``Z``, hence the wrappers.
"""

from __future__ import annotations

import re
from datetime import date, datetime, timedelta, timezone

_DURATION_RE = re.compile(r"^(\d+)\s*(d|day|days|h|hour|hours|m|min|minutes|s|sec|seconds)$")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def parse_date(value: str) -> date:
    return date.fromisoformat(value.strip())


def parse_duration(value) -> timedelta:
    """Accept seconds as a number, or strings like ``"30d"``, ``"12h"``, ``"90 min"``."""
    if isinstance(value, timedelta):
        return value
    if isinstance(value, (int, float)):
        return timedelta(seconds=value)
    match = _DURATION_RE.match(value.strip().lower())
    if not match:
        raise ValueError(f"unrecognized duration: {value!r}")
    amount = int(match.group(1))
    unit = match.group(2)[0]
    return {
        "d": timedelta(days=amount),
        "h": timedelta(hours=amount),
        "m": timedelta(minutes=amount),
        "s": timedelta(seconds=amount),
    }[unit]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)
