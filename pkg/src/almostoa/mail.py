"""Message rendering and the persistent outbox transport.

Rendering is a pure function of its inputs (plus the message-id source),
so golden-file tests can lock bodies byte for byte. The default transport
appends each message to a JSON-lines outbox file — attachments recorded as
digest + length, never bytes — which is what the acceptance suite inspects
in place of a live SMTP server. A real SMTP transport can be plugged in
behind the same ``send`` contract.

Templates are plain text files: first line is the subject, then a blank
line, then the body, with ``$name`` placeholders. A deployment can point
``templates_dir`` at its own copies (the shipped wording follows one
jurisdiction's phrasing; others will want their own).
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime
from functools import lru_cache
from importlib import resources
from pathlib import Path
from string import Template
from typing import Callable, Optional

from .errors import TransportError, ValidationError
from .model import (
    Attachment,
    CopyRequest,
    DeliveryReceipt,
    EprintRecord,
    MailKind,
    MailMessage,
)
from .timeutil import format_timestamp, parse_timestamp, utc_now

_TEMPLATE_FILES = {
    MailKind.AUTHOR_NOTIFICATION: "author_notification.txt",
    MailKind.DELIVERY: "delivery.txt",
    MailKind.DECLINE_NOTICE: "decline.txt",
}


@dataclass(frozen=True)
class MailTemplate:
    subject: Template
    body: Template

    @classmethod
    def parse(cls, text: str) -> "MailTemplate":
        subject, _, body = text.partition("\n\n")
        if not body:
            raise ValidationError("mail template needs a subject line, a blank line, a body")
        return cls(Template(subject.strip()), Template(body.rstrip("\n")))


def load_templates(directory: Optional[Path] = None) -> dict[MailKind, MailTemplate]:
    """Load the three message templates, from a directory or the packaged defaults."""
    if directory is None:
        return dict(_packaged_templates())
    templates = {}
    for kind, filename in _TEMPLATE_FILES.items():
        text = (Path(directory) / filename).read_text(encoding="utf-8")
        templates[kind] = MailTemplate.parse(text)
    return templates


@lru_cache(maxsize=1)
def _packaged_templates():
    return tuple(
        (kind, MailTemplate.parse(
            resources.files("almostoa.templates").joinpath(filename).read_text(encoding="utf-8")))
        for kind, filename in _TEMPLATE_FILES.items()
    )


def default_message_id() -> str:
    return uuid.uuid4().hex


class MailRenderer:
    """Renders the three message kinds from templates and repo identity."""

    def __init__(self, repo_name: str, base_url: str, admin_address: str,
                 templates: Optional[dict] = None,
                 message_id_source: Callable[[], str] = default_message_id):
        self.repo_name = repo_name
        self.base_url = base_url.rstrip("/")
        self.admin_address = admin_address
        self.templates = templates or load_templates()
        self._next_id = message_id_source

    def public_url(self, eprint_id: str) -> str:
        return f"{self.base_url}/eprints/{eprint_id}"

    def respond_url(self, token_value: str, action: str) -> str:
        return f"{self.base_url}/respond?token={token_value}&action={action}"

    def render_author_notification(self, request: CopyRequest, eprint: EprintRecord,
                                   token_value: str, alerts=(),
                                   to_address: Optional[str] = None) -> MailMessage:
        """The approval email: purpose line, citation, static fair-dealing
        note, any advisory alert lines, then the two one-click links."""
        alert_lines = ""
        if alerts:
            alert_lines = "\n" + "\n".join(a.message for a in alerts) + "\n"
        fields = {
            "repo_name": self.repo_name,
            "base_url": self.base_url,
            "admin_address": self.admin_address,
            "title": eprint.metadata.title,
            "citation": eprint.metadata.citation_line,
            "public_url": self.public_url(eprint.id),
            "requester": request.requester_address,
            "accept_url": self.respond_url(token_value, "accept"),
            "reject_url": self.respond_url(token_value, "reject"),
            "alert_lines": alert_lines,
        }
        return self._render(MailKind.AUTHOR_NOTIFICATION, fields,
                            to_address or eprint.depositor.contact_address)

    def render_delivery(self, request: CopyRequest, eprint: EprintRecord,
                        contents: dict) -> MailMessage:
        """Approved: every document part attached to one message, so the
        exactly-once accounting stays per message."""
        attachments = tuple(
            Attachment(filename=part.label, media_type=part.media_type,
                       content=contents[part.storage_ref])
            for part in eprint.parts
        )
        fields = self._common_fields(eprint)
        return self._render(MailKind.DELIVERY, fields, request.requester_address,
                            attachments=attachments)

    def render_decline(self, request: CopyRequest, eprint: EprintRecord) -> MailMessage:
        fields = self._common_fields(eprint)
        return self._render(MailKind.DECLINE_NOTICE, fields, request.requester_address)

    def _common_fields(self, eprint: EprintRecord) -> dict:
        return {
            "repo_name": self.repo_name,
            "base_url": self.base_url,
            "admin_address": self.admin_address,
            "title": eprint.metadata.title,
            "citation": eprint.metadata.citation_line,
        }

    def _render(self, kind: MailKind, fields: dict, to_address: str,
                attachments=()) -> MailMessage:
        template = self.templates[kind]
        return MailMessage(
            message_id=self._next_id(),
            kind=kind,
            from_address=self.admin_address,
            to_address=to_address,
            subject=template.subject.substitute(fields),
            body=template.body.substitute(fields) + "\n",
            attachments=attachments,
        )


@dataclass(frozen=True)
class OutboxRecord:
    """One line of the outbox file; the stable external format."""

    message_id: str
    kind: str
    from_address: str
    to_address: str
    subject: str
    body: str
    attachments: tuple  # of {filename, media_type, digest, byte_length}
    accepted_at: datetime

    def to_dict(self) -> dict:
        return {
            "message_id": self.message_id,
            "kind": self.kind,
            "from": self.from_address,
            "to": self.to_address,
            "subject": self.subject,
            "body": self.body,
            "attachments": list(self.attachments),
            "timestamp": format_timestamp(self.accepted_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OutboxRecord":
        return cls(
            message_id=data["message_id"],
            kind=data["kind"],
            from_address=data["from"],
            to_address=data["to"],
            subject=data["subject"],
            body=data["body"],
            attachments=tuple(data["attachments"]),
            accepted_at=parse_timestamp(data["timestamp"]),
        )


class OutboxTransport:
    """Default transport: append-to-file, inspectable, deduped on message id."""

    def __init__(self, path: Optional[Path] = None):
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._records: list[OutboxRecord] = []
        self._seen: set[str] = set()
        if self._path is not None and self._path.exists():
            with open(self._path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        record = OutboxRecord.from_dict(json.loads(line))
                        self._records.append(record)
                        self._seen.add(record.message_id)

    def send(self, message: MailMessage, accepted_at: datetime) -> DeliveryReceipt:
        record = OutboxRecord(
            message_id=message.message_id,
            kind=message.kind.value,
            from_address=message.from_address,
            to_address=message.to_address,
            subject=message.subject,
            body=message.body,
            attachments=tuple(
                {
                    "filename": a.filename,
                    "media_type": a.media_type,
                    "digest": hashlib.sha256(a.content).hexdigest(),
                    "byte_length": a.byte_length,
                }
                for a in message.attachments
            ),
            accepted_at=accepted_at,
        )
        with self._lock:
            if message.message_id in self._seen:
                return DeliveryReceipt(message.message_id, accepted_at)
            if self._path is not None:
                try:
                    with open(self._path, "a", encoding="utf-8") as fh:
                        fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
                except OSError as exc:
                    raise TransportError(f"outbox append failed: {exc}") from exc
            self._records.append(record)
            self._seen.add(message.message_id)
        return DeliveryReceipt(message.message_id, accepted_at)

    def messages(self) -> list[OutboxRecord]:
        with self._lock:
            return list(self._records)


class MailGateway:
    """Hands rendered messages to the configured transport."""

    def __init__(self, transport: OutboxTransport, clock=None):
        self.transport = transport
        self._clock = clock

    def send(self, message: MailMessage) -> DeliveryReceipt:
        now = self._clock.now() if self._clock is not None else utc_now()
        return self.transport.send(message, now)

    def outbox(self) -> list[OutboxRecord]:
        return self.transport.messages()
