"""Batch deposit ingestion: one JSON record per line.

Line schema (dates ISO-8601)::

    {"title": "...", "creators": ["..."], "year": 2009,
     "venue": {"kind": "journal-article", "container_title": "...",
               "volume": "65", "issue": "7", "pages": "1450-1454"},
     "access": "closed", "embargo_until": "2010-06-01",
     "depositor": {"name": "...", "email": "...", "active": true,
                   "fallback_email": null},
     "documents": ["relative/or/absolute/path.pdf"],
     "vor_identifier": "doi:..."}

``embargo_until`` may be empty/null (permanently closed) and is ignored
for open deposits. Document paths resolve relative to the ingest file.
Bad lines are reported with their line number and skipped; good lines are
still deposited.
"""

from __future__ import annotations

import json
import mimetypes
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .model import (
    AccessState,
    Depositor,
    DocumentPart,
    EprintMetadata,
    VenueKind,
    VenueRef,
    validate_email,
)
from .service import Repository
from .timeutil import parse_date


@dataclass
class IngestReport:
    deposited: int = 0
    errors: list = field(default_factory=list)  # (line_number, message)

    @property
    def ok(self) -> bool:
        return not self.errors


def parse_line(raw: dict, base_dir: Path):
    venue_raw = raw["venue"]
    venue = VenueRef(
        kind=VenueKind(venue_raw["kind"]),
        container_title=venue_raw["container_title"],
        volume=venue_raw.get("volume"),
        issue=venue_raw.get("issue"),
        chapter=venue_raw.get("chapter"),
        pages=venue_raw.get("pages"),
    )
    metadata = EprintMetadata.create(
        title=raw["title"],
        creators=raw["creators"],
        year=raw["year"],
        venue=venue,
        vor_identifier=raw.get("vor_identifier"),
    )
    dep = raw["depositor"]
    depositor = Depositor(
        display_name=dep["name"],
        contact_address=validate_email(dep["email"]),
        active=dep.get("active", True),
        fallback_address=dep.get("fallback_email"),
    )
    access_kind = raw["access"]
    if access_kind == "open":
        access = AccessState.open()
    elif access_kind == "closed":
        until = raw.get("embargo_until")
        access = AccessState.closed(parse_date(until) if until else None)
    else:
        raise ValidationError(f"access must be 'open' or 'closed', got {access_kind!r}")
    paths = [base_dir / p for p in raw.get("documents", [])]
    if not paths:
        raise ValidationError("a deposit needs at least one document path")
    return metadata, depositor, access, paths


def ingest_file(repo: Repository, path) -> IngestReport:
    path = Path(path)
    report = IngestReport()
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                metadata, depositor, access, doc_paths = parse_line(raw, path.parent)
                parts = tuple(_part_from_path(repo, p) for p in doc_paths)
                repo.store.deposit_eprint(metadata, depositor, parts, access,
                                          now=repo.now())
                report.deposited += 1
            except Exception as exc:
                report.errors.append((line_number, str(exc)))
    return report


def _part_from_path(repo: Repository, path: Path) -> DocumentPart:
    content = path.read_bytes()
    digest, ref = repo.store.put_blob(content)
    media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
    return DocumentPart(
        label=path.name,
        content_digest=digest,
        byte_length=len(content),
        media_type=media_type,
        storage_ref=ref,
    )
