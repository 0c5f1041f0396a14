"""Advisory monitoring of copy-request patterns.

The monitor flags two patterns: an unusually high rate of approved
requests for one document, and one requester collecting several articles
from the same journal issue (or chapters from the same book) in a short
period. Findings are advisory only — they are surfaced to the author and
the repository manager and never block a request or a decision.

Thresholds and windows are configuration, not legal claims. The shipped
AU profile encodes the deemed-fair norm of one article per issue / one
chapter per book; the other profiles reuse the same advisory limits with
jurisdiction-appropriate attestation wording.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Iterable, Optional

from .errors import ValidationError
from .model import (
    AlertKind,
    CopyRequest,
    DecisionState,
    EprintRecord,
    FairnessAlert,
)


@dataclass(frozen=True)
class JurisdictionProfile:
    name: str
    attestation_text: str
    deemed_fair_same_issue_limit: Optional[int] = 1
    deemed_fair_same_book_limit: Optional[int] = 1
    high_volume_threshold: int = 10
    high_volume_window: timedelta = timedelta(days=30)
    same_source_window: timedelta = timedelta(days=30)

    def __post_init__(self):
        for limit in (self.deemed_fair_same_issue_limit, self.deemed_fair_same_book_limit):
            if limit is not None and limit < 1:
                raise ValidationError("deemed-fair limits must be >= 1")
        if self.high_volume_threshold < 1:
            raise ValidationError("high-volume threshold must be >= 1")
        if self.high_volume_window <= timedelta(0) or self.same_source_window <= timedelta(0):
            raise ValidationError("monitor windows must be positive")


BUILTIN_PROFILES: dict[str, JurisdictionProfile] = {
    "AU": JurisdictionProfile(
        name="AU",
        attestation_text=(
            "I am requesting this document for the purpose of research or study, "
            "criticism or review, or news reporting, and I will use it in accordance "
            "with the fair dealing provisions of the Copyright Act 1968 (Cth). I "
            "understand that copying one article from a journal issue, or one chapter "
            "from a book, for research or study is deemed fair dealing."
        ),
    ),
    "CA": JurisdictionProfile(
        name="CA",
        attestation_text=(
            "I am requesting this document for the purpose of research, private study, "
            "criticism or news reporting, or for another use allowed by the Law, and I "
            "will use it in accordance with the fair dealing provisions of the "
            "Copyright Act (Canada)."
        ),
    ),
    "UK": JurisdictionProfile(
        name="UK",
        attestation_text=(
            "I am requesting this document for non-commercial research, private study, "
            "criticism, review or news reporting, and I will use it in accordance with "
            "the fair dealing provisions of the Copyright, Designs and Patents Act 1988."
        ),
    ),
    "US": JurisdictionProfile(
        name="US",
        attestation_text=(
            "I am requesting this document for purposes such as research, scholarship, "
            "private study, criticism, comment or news reporting, and I will use it in "
            "accordance with the fair use provision of US copyright law (17 U.S.C. 107)."
        ),
    ),
}


def fold_requester(address: str) -> str:
    """Requester identity: the address with its domain part case-folded.

    Email local parts are case-sensitive in principle, domains never are.
    """
    local, _, domain = address.partition("@")
    return f"{local}@{domain.casefold()}" if domain else local


class FairnessMonitor:
    """Pure pattern checks over a snapshot of the request history."""

    def __init__(self, profile: JurisdictionProfile,
                 eprint_lookup: Callable[[str], EprintRecord]):
        self.profile = profile
        self._eprint = eprint_lookup

    def evaluate_request(self, candidate: CopyRequest,
                         history: Iterable[CopyRequest],
                         now: datetime) -> list[FairnessAlert]:
        """Alerts for a request that is about to be stored.

        Same-source patterns count requests in any decision state: asking is
        the pattern, whether or not the author obliged.
        """
        venue = self._eprint(candidate.eprint_id).metadata.venue
        key = venue.grouping_key()
        if key[0] == "issue":
            limit = self.profile.deemed_fair_same_issue_limit
            kind = AlertKind.SAME_ISSUE_MULTI_REQUEST
        else:
            limit = self.profile.deemed_fair_same_book_limit
            kind = AlertKind.SAME_BOOK_MULTI_REQUEST
        if limit is None:
            return []

        window = self.profile.same_source_window
        requester = fold_requester(candidate.requester_address)
        cutoff = now - window
        matching = [
            r for r in history
            if fold_requester(r.requester_address) == requester
            and r.created_at >= cutoff
            and self._eprint(r.eprint_id).metadata.venue.grouping_key() == key
        ]
        matching.append(candidate)
        distinct = {r.eprint_id for r in matching}
        if len(distinct) <= limit:
            return []

        matching.sort(key=lambda r: (r.created_at, r.id))
        evidence = tuple(r.id for r in matching)
        window_days = _days(window)
        if kind is AlertKind.SAME_ISSUE_MULTI_REQUEST:
            source = _issue_label(venue)
            noun = "articles from the same journal issue"
        else:
            source = venue.container_title
            noun = "chapters from the same book"
        message = (
            f"Advisory: this requester has asked for {len(distinct)} distinct "
            f"{noun} ({source}) within the last {window_days} days; accepting "
            f"more than {limit} may exceed fair dealing."
        )
        return [FairnessAlert(
            kind=kind,
            eprint_id=candidate.eprint_id,
            requester_address=candidate.requester_address,
            evidence=evidence,
            window=window,
            message=message,
        )]

    def scan_accepted_volume(self, history: Iterable[CopyRequest],
                             now: datetime) -> list[FairnessAlert]:
        """One alert per document whose approved-request rate is high.

        Only approvals count here — the concern is copies actually sent.
        """
        window = self.profile.high_volume_window
        cutoff = now - window
        per_eprint: dict[str, list[CopyRequest]] = {}
        for request in history:
            decision = request.decision
            if decision.state is not DecisionState.APPROVED:
                continue
            if decision.at is None or decision.at < cutoff or decision.at > now:
                continue
            per_eprint.setdefault(request.eprint_id, []).append(request)

        alerts = []
        for eprint_id in sorted(per_eprint):
            hits = per_eprint[eprint_id]
            if len(hits) < self.profile.high_volume_threshold:
                continue
            hits.sort(key=lambda r: (r.decision.at, r.id))
            alerts.append(FairnessAlert(
                kind=AlertKind.HIGH_VOLUME_SAME_ARTICLE,
                eprint_id=eprint_id,
                requester_address=None,
                evidence=tuple(r.id for r in hits),
                window=window,
                message=(
                    f"Advisory: {len(hits)} approved requests for this document "
                    f"within the last {_days(window)} days; a high acceptance "
                    f"rate for one document may exceed fair dealing."
                ),
            ))
        return alerts


def _days(window: timedelta) -> int:
    return max(1, round(window.total_seconds() / 86400))


def _issue_label(venue) -> str:
    label = venue.container_title
    if venue.volume:
        label += f", {venue.volume}"
    if venue.issue:
        label += f"({venue.issue})"
    return label
