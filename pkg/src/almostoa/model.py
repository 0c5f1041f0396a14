"""Domain model: deposits, access states, copy requests, mail, alerts.

Every type here is an immutable value object. The store keeps the only
mutable state (maps of id -> value), which is what makes lock-free reads
safe: a reader either sees the old value or the new one, never a half
assembled record.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta
from enum import Enum
from typing import Optional

from .errors import InvalidAddress, ValidationError
from .timeutil import format_timestamp, parse_date, parse_timestamp

# Deliberately permissive: the workflow only promises syntactic checking,
# deliverability is the transport's problem.
_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")


def validate_email(address: str) -> str:
    if not _EMAIL_RE.match(address or ""):
        raise InvalidAddress(f"not a valid email address: {address!r}")
    return address


def _norm(text: Optional[str]) -> str:
    """Whitespace-normalize and case-fold for grouping comparisons."""
    return " ".join((text or "").split()).casefold()


class VenueKind(str, Enum):
    JOURNAL_ARTICLE = "journal-article"
    BOOK_CHAPTER = "book-chapter"


@dataclass(frozen=True)
class VenueRef:
    kind: VenueKind
    container_title: str
    volume: Optional[str] = None
    issue: Optional[str] = None
    chapter: Optional[str] = None
    pages: Optional[str] = None

    def __post_init__(self):
        if not self.container_title.strip():
            raise ValidationError("venue requires a container title")

    def grouping_key(self) -> tuple:
        """Identity used when deciding whether two deposits share a source.

        Journal articles group by (container, volume, issue); book chapters
        group by the book title alone.
        """
        if self.kind is VenueKind.JOURNAL_ARTICLE:
            return ("issue", _norm(self.container_title), _norm(self.volume), _norm(self.issue))
        return ("book", _norm(self.container_title))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "container_title": self.container_title,
            "volume": self.volume,
            "issue": self.issue,
            "chapter": self.chapter,
            "pages": self.pages,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VenueRef":
        return cls(
            kind=VenueKind(data["kind"]),
            container_title=data["container_title"],
            volume=data.get("volume"),
            issue=data.get("issue"),
            chapter=data.get("chapter"),
            pages=data.get("pages"),
        )


def render_citation(creators: tuple, year: int, title: str, venue: VenueRef) -> str:
    """Canonical one-line citation, deterministic in the metadata fields.

    ``Creator et al.(year). Title. Container, vol(issue): pages.``
    """
    names = creators[0] if len(creators) == 1 else f"{creators[0]} et al."
    if venue.kind is VenueKind.JOURNAL_ARTICLE:
        where = venue.container_title
        if venue.volume:
            where += f", {venue.volume}"
        if venue.issue:
            where += f"({venue.issue})"
        if venue.pages:
            where += f": {venue.pages}"
    else:
        where = f"In {venue.container_title}"
        if venue.chapter:
            where += f", chapter {venue.chapter}"
        if venue.pages:
            where += f": {venue.pages}"
    return f"{names}({year}). {title}. {where}."


@dataclass(frozen=True)
class EprintMetadata:
    title: str
    creators: tuple
    year: int
    venue: VenueRef
    citation_line: str
    vor_identifier: Optional[str] = None

    @classmethod
    def create(cls, title: str, creators, year: int, venue: VenueRef,
               vor_identifier: Optional[str] = None) -> "EprintMetadata":
        """Build metadata with the citation line rendered from the fields."""
        title = title.strip()
        creators = tuple(c.strip() for c in creators if c and c.strip())
        if not title:
            raise ValidationError("title must be nonempty")
        if not creators:
            raise ValidationError("at least one creator is required")
        return cls(
            title=title,
            creators=creators,
            year=int(year),
            venue=venue,
            citation_line=render_citation(creators, int(year), title, venue),
            vor_identifier=vor_identifier,
        )

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "creators": list(self.creators),
            "year": self.year,
            "venue": self.venue.to_dict(),
            "citation_line": self.citation_line,
            "vor_identifier": self.vor_identifier,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EprintMetadata":
        return cls(
            title=data["title"],
            creators=tuple(data["creators"]),
            year=data["year"],
            venue=VenueRef.from_dict(data["venue"]),
            citation_line=data["citation_line"],
            vor_identifier=data.get("vor_identifier"),
        )


class AccessKind(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class AccessState:
    """Open, or Closed with an optional embargo expiry date.

    Closed with no expiry stays closed until an administrator intervenes;
    Closed with an expiry in the past is transient, the scheduler resolves
    it to Open on its next tick.
    """

    kind: AccessKind
    embargo_until: Optional[date] = None

    def __post_init__(self):
        if self.kind is AccessKind.OPEN and self.embargo_until is not None:
            raise ValidationError("an open deposit cannot carry an embargo date")

    @classmethod
    def open(cls) -> "AccessState":
        return cls(AccessKind.OPEN)

    @classmethod
    def closed(cls, embargo_until: Optional[date] = None) -> "AccessState":
        return cls(AccessKind.CLOSED, embargo_until)

    @property
    def is_open(self) -> bool:
        return self.kind is AccessKind.OPEN

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "embargo_until": self.embargo_until.isoformat() if self.embargo_until else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccessState":
        until = data.get("embargo_until")
        return cls(AccessKind(data["kind"]), parse_date(until) if until else None)


@dataclass(frozen=True)
class Depositor:
    display_name: str
    contact_address: str
    active: bool = True
    fallback_address: Optional[str] = None

    def effective_notification_address(self, manager_address: str) -> str:
        """Where author notifications go once the depositor has left."""
        if self.active:
            return self.contact_address
        return self.fallback_address or manager_address

    def to_dict(self) -> dict:
        return {
            "display_name": self.display_name,
            "contact_address": self.contact_address,
            "active": self.active,
            "fallback_address": self.fallback_address,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Depositor":
        return cls(
            display_name=data["display_name"],
            contact_address=data["contact_address"],
            active=data.get("active", True),
            fallback_address=data.get("fallback_address"),
        )


@dataclass(frozen=True)
class DocumentPart:
    label: str
    content_digest: str
    byte_length: int
    media_type: str
    storage_ref: str

    def __post_init__(self):
        if self.byte_length < 1:
            raise ValidationError("document part must not be empty")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "content_digest": self.content_digest,
            "byte_length": self.byte_length,
            "media_type": self.media_type,
            "storage_ref": self.storage_ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DocumentPart":
        return cls(**data)


@dataclass(frozen=True)
class EprintRecord:
    id: str
    metadata: EprintMetadata
    depositor: Depositor
    access: AccessState
    parts: tuple
    deposited_at: datetime

    def with_access(self, access: AccessState) -> "EprintRecord":
        return replace(self, access=access)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "metadata": self.metadata.to_dict(),
            "depositor": self.depositor.to_dict(),
            "access": self.access.to_dict(),
            "parts": [p.to_dict() for p in self.parts],
            "deposited_at": format_timestamp(self.deposited_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EprintRecord":
        return cls(
            id=data["id"],
            metadata=EprintMetadata.from_dict(data["metadata"]),
            depositor=Depositor.from_dict(data["depositor"]),
            access=AccessState.from_dict(data["access"]),
            parts=tuple(DocumentPart.from_dict(p) for p in data["parts"]),
            deposited_at=parse_timestamp(data["deposited_at"]),
        )


@dataclass(frozen=True)
class AccessTransition:
    """One entry of the per-record audit trail."""

    eprint_id: str
    old: AccessState
    new: AccessState
    actor: str
    at: datetime

    def to_dict(self) -> dict:
        return {
            "eprint_id": self.eprint_id,
            "old": self.old.to_dict(),
            "new": self.new.to_dict(),
            "actor": self.actor,
            "at": format_timestamp(self.at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccessTransition":
        return cls(
            eprint_id=data["eprint_id"],
            old=AccessState.from_dict(data["old"]),
            new=AccessState.from_dict(data["new"]),
            actor=data["actor"],
            at=parse_timestamp(data["at"]),
        )


class PurposeKind(str, Enum):
    RESEARCH = "research"
    PRIVATE_STUDY = "private-study"
    CRITICISM = "criticism"
    NEWS_REPORTING = "news-reporting"
    OTHER = "other"


@dataclass(frozen=True)
class Purpose:
    kind: PurposeKind
    text: Optional[str] = None

    def __post_init__(self):
        if self.kind is PurposeKind.OTHER and not (self.text or "").strip():
            raise ValidationError("an 'other' purpose requires explanatory text")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "text": self.text}

    @classmethod
    def from_dict(cls, data: dict) -> "Purpose":
        return cls(PurposeKind(data["kind"]), data.get("text"))


class DecisionState(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Decision:
    state: DecisionState
    at: Optional[datetime] = None

    @classmethod
    def pending(cls) -> "Decision":
        return cls(DecisionState.PENDING)

    def to_dict(self) -> dict:
        return {"state": self.state.value, "at": format_timestamp(self.at) if self.at else None}

    @classmethod
    def from_dict(cls, data: dict) -> "Decision":
        at = data.get("at")
        return cls(DecisionState(data["state"]), parse_timestamp(at) if at else None)


class AlertKind(str, Enum):
    HIGH_VOLUME_SAME_ARTICLE = "high-volume-same-article"
    SAME_ISSUE_MULTI_REQUEST = "same-issue-multi-request"
    SAME_BOOK_MULTI_REQUEST = "same-book-multi-request"


@dataclass(frozen=True)
class FairnessAlert:
    """Advisory finding; never blocks a request or a decision."""

    kind: AlertKind
    eprint_id: str
    requester_address: Optional[str]
    evidence: tuple
    window: timedelta
    message: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "eprint_id": self.eprint_id,
            "requester_address": self.requester_address,
            "evidence": list(self.evidence),
            "window_days": self.window.total_seconds() / 86400,
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FairnessAlert":
        return cls(
            kind=AlertKind(data["kind"]),
            eprint_id=data["eprint_id"],
            requester_address=data.get("requester_address"),
            evidence=tuple(data["evidence"]),
            window=timedelta(days=data["window_days"]),
            message=data["message"],
        )


@dataclass(frozen=True)
class CopyRequest:
    id: str
    eprint_id: str
    requester_address: str
    purpose: Purpose
    attested: bool
    created_at: datetime
    decision: Decision = field(default_factory=Decision.pending)
    alerts_at_creation: tuple = ()

    def decided(self, state: DecisionState, at: datetime) -> "CopyRequest":
        return replace(self, decision=Decision(state, at))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "eprint_id": self.eprint_id,
            "requester_address": self.requester_address,
            "purpose": self.purpose.to_dict(),
            "attested": self.attested,
            "created_at": format_timestamp(self.created_at),
            "decision": self.decision.to_dict(),
            "alerts_at_creation": [a.to_dict() for a in self.alerts_at_creation],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CopyRequest":
        return cls(
            id=data["id"],
            eprint_id=data["eprint_id"],
            requester_address=data["requester_address"],
            purpose=Purpose.from_dict(data["purpose"]),
            attested=data["attested"],
            created_at=parse_timestamp(data["created_at"]),
            decision=Decision.from_dict(data["decision"]),
            alerts_at_creation=tuple(FairnessAlert.from_dict(a) for a in data.get("alerts_at_creation", [])),
        )


@dataclass(frozen=True)
class DecisionToken:
    """Unguessable capability for deciding exactly one request."""

    value: str
    request_id: str
    issued_at: datetime

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "request_id": self.request_id,
            "issued_at": format_timestamp(self.issued_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionToken":
        return cls(data["value"], data["request_id"], parse_timestamp(data["issued_at"]))


class MailKind(str, Enum):
    AUTHOR_NOTIFICATION = "author-notification"
    DELIVERY = "delivery"
    DECLINE_NOTICE = "decline-notice"


@dataclass(frozen=True)
class Attachment:
    filename: str
    media_type: str
    content: bytes

    @property
    def byte_length(self) -> int:
        return len(self.content)


@dataclass(frozen=True)
class MailMessage:
    message_id: str
    kind: MailKind
    from_address: str
    to_address: str
    subject: str
    body: str
    attachments: tuple = ()

    def __post_init__(self):
        if self.kind is MailKind.DELIVERY and not self.attachments:
            raise ValidationError("a delivery message must attach the document parts")
        if self.kind is not MailKind.DELIVERY and self.attachments:
            raise ValidationError("only delivery messages carry attachments")


@dataclass(frozen=True)
class DeliveryReceipt:
    message_id: str
    accepted_at: datetime
