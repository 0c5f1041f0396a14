"""Usage statistics: author-response rates and the closed-access share.

Percentage display follows the reporting convention for these tables:
shares at or above one percent round half-up to a whole number, any
strictly positive share below one percent renders as "< 1 %", and an
empty population renders "n/a". All arithmetic is exact (integers), no
floating point near the rounding boundary.

The unanswered row is a derived classification — Pending older than the
ignore window — so the window is printed in the report header rather than
hidden in the numbers. Requests still inside the window are reported as a
separate fresh-pending count and excluded from the three percentage rows:
the rows always describe settled-or-stale requests.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import InvalidPeriod
from .model import AccessKind
from .store import RepositoryStore
from .workflow import ResponseClass, classify_response

APPROVED_LABEL = "Approved"
UNANSWERED_LABEL = "Ignored / unanswered"
REJECTED_LABEL = "Rejected / denied"


def format_share(count: int, base: int) -> str:
    """Integer percent, half-up; "< 1 %" for positive shares under one percent."""
    if base <= 0:
        return "n/a"
    if count == 0:
        return "0 %"
    if 100 * count < base:
        return "< 1 %"
    percent = (200 * count + base) // (2 * base)
    return f"{percent} %"


@dataclass(frozen=True)
class ResponseStats:
    period_start: datetime
    period_end: datetime
    ignore_window: timedelta
    total: int
    approved: int
    unanswered: int
    rejected: int
    fresh_pending: int
    rendered_rows: dict

    def to_dict(self) -> dict:
        return {
            "period_start": self.period_start.isoformat(),
            "period_end": self.period_end.isoformat(),
            "ignore_window_days": self.ignore_window.total_seconds() / 86400,
            "total": self.total,
            "approved": self.approved,
            "unanswered": self.unanswered,
            "rejected": self.rejected,
            "fresh_pending": self.fresh_pending,
            "rendered_rows": dict(self.rendered_rows),
        }


@dataclass(frozen=True)
class AccessStats:
    total: int
    closed: int
    closed_share_display: str

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "closed": self.closed,
            "closed_share_display": self.closed_share_display,
        }


class StatsReporter:
    def __init__(self, store: RepositoryStore):
        self.store = store

    def response_stats(self, period_start: datetime, period_end: datetime,
                       ignore_window: timedelta, now: datetime) -> ResponseStats:
        """Classify every request created in [start, end], both inclusive."""
        if period_start > period_end:
            raise InvalidPeriod("period start is after its end")
        counts = {cls: 0 for cls in ResponseClass}
        for request in self.store.list_requests():
            if not (period_start <= request.created_at <= period_end):
                continue
            counts[classify_response(request, now, ignore_window)] += 1

        approved = counts[ResponseClass.APPROVED]
        unanswered = counts[ResponseClass.UNANSWERED]
        rejected = counts[ResponseClass.REJECTED]
        fresh = counts[ResponseClass.FRESH_PENDING]
        base = approved + unanswered + rejected
        rows = {
            APPROVED_LABEL: format_share(approved, base),
            UNANSWERED_LABEL: format_share(unanswered, base),
            REJECTED_LABEL: format_share(rejected, base),
        }
        return ResponseStats(
            period_start=period_start,
            period_end=period_end,
            ignore_window=ignore_window,
            total=approved + unanswered + rejected + fresh,
            approved=approved,
            unanswered=unanswered,
            rejected=rejected,
            fresh_pending=fresh,
            rendered_rows=rows,
        )

    def access_stats(self) -> AccessStats:
        """Current open/closed split across the whole store."""
        records = self.store.list_eprints()
        total = len(records)
        closed = sum(1 for r in records if r.access.kind is AccessKind.CLOSED)
        if total == 0:
            display = "n/a"
        else:
            share = format_share(closed, total)
            display = f"{closed} ({share})" if closed else f"0 ({share})"
        return AccessStats(total=total, closed=closed, closed_share_display=display)


def render_response_table(stats: ResponseStats, repo_name: str) -> str:
    """Aligned plain-text table of the three response rows."""
    window_days = round(stats.ignore_window.total_seconds() / 86400)
    header = (
        f"Author responses — {repo_name}\n"
        f"Period: {stats.period_start.date().isoformat()} to "
        f"{stats.period_end.date().isoformat()} "
        f"(unanswered = pending for more than {window_days} days)\n"
    )
    rows = [
        (APPROVED_LABEL, stats.rendered_rows[APPROVED_LABEL]),
        (UNANSWERED_LABEL, stats.rendered_rows[UNANSWERED_LABEL]),
        (REJECTED_LABEL, stats.rendered_rows[REJECTED_LABEL]),
    ]
    width = max(len(label) for label, _ in rows)
    lines = [f"  {label.ljust(width)}  {value}" for label, value in rows]
    footer = (
        f"  {'Requests in period'.ljust(width)}  {stats.total}\n"
        f"  {'Still fresh (excluded)'.ljust(width)}  {stats.fresh_pending}"
    )
    return header + "\n".join(lines) + "\n" + footer + "\n"


def render_access_table(stats: AccessStats, repo_name: str) -> str:
    rows = [
        ("Total", str(stats.total)),
        ("Closed Access", stats.closed_share_display),
    ]
    width = max(len(label) for label, _ in rows)
    lines = [f"  {label.ljust(width)}  {value}" for label, value in rows]
    return f"Number of articles — {repo_name}\n" + "\n".join(lines) + "\n"
