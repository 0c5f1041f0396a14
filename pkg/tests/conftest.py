from __future__ import annotations

import itertools
from datetime import datetime, timezone

import pytest

from almostoa.config import RepositoryConfig
from almostoa.model import (
    AccessState,
    Depositor,
    DocumentPart,
    EprintMetadata,
    VenueKind,
    VenueRef,
)
from almostoa.service import ManualClock, open_repository

T0 = datetime(2009, 1, 15, 9, 0, tzinfo=timezone.utc)

# The worked example used throughout: a closed-access chemistry article.
ARTICLE_TITLE = (
    "Palladium-mediated organic synthesis using porous polymer monolith "
    "formed in situ as a continuous catalyst support structure for "
    "application in microfluidic devices"
)
ARTICLE_CITATION = (
    "Gömann, Anissa et al.(2009). " + ARTICLE_TITLE + ". Tetrahedron, 65(7): 1450-1454."
)

_counter = itertools.count(1)


def make_venue(container="Tetrahedron", volume="65", issue="7",
               pages=None, kind=VenueKind.JOURNAL_ARTICLE, chapter=None):
    return VenueRef(kind=kind, container_title=container, volume=volume,
                    issue=issue, chapter=chapter, pages=pages)


def make_metadata(title=None, creators=("Gömann, Anissa", "Vyhnal, Kristyna"),
                  year=2009, venue=None):
    return EprintMetadata.create(
        title=title or f"Study {next(_counter)}",
        creators=creators,
        year=year,
        venue=venue or make_venue(),
    )


def article_metadata():
    return make_metadata(title=ARTICLE_TITLE, venue=make_venue(pages="1450-1454"))


def make_depositor(email="anissa.gomann@example.edu", active=True, fallback=None):
    return Depositor(display_name="Gömann, Anissa", contact_address=email,
                     active=active, fallback_address=fallback)


def make_parts(repo, contents=(b"%PDF-1.4 body",), labels=None):
    parts = []
    for i, content in enumerate(contents):
        digest, ref = repo.store.put_blob(content)
        parts.append(DocumentPart(
            label=(labels[i] if labels else f"part-{i + 1}.pdf"),
            content_digest=digest,
            byte_length=len(content),
            media_type="application/pdf",
            storage_ref=ref,
        ))
    return tuple(parts)


def deposit(repo, access=None, metadata=None, depositor=None, contents=(b"%PDF-1.4 body",),
            now=None):
    return repo.store.deposit_eprint(
        metadata or make_metadata(),
        depositor or make_depositor(),
        make_parts(repo, contents),
        access or AccessState.closed(),
        now or repo.now(),
    )


def make_config(tmp_path=None, **overrides) -> RepositoryConfig:
    base = dict(
        name="Archipel",
        base_url="http://www.archipel.uqam.ca",
        admin_address="archipel-admin@uqam.ca",
        admin_secret="test-secret",
        store_path=tmp_path,
    )
    base.update(overrides)
    return RepositoryConfig(**base)


@pytest.fixture
def clock():
    return ManualClock(T0)


@pytest.fixture
def repo(tmp_path, clock):
    repository = open_repository(make_config(tmp_path / "store"), clock=clock)
    yield repository
    repository.close()


@pytest.fixture
def mem_repo(clock):
    """In-memory repository for high-volume property tests."""
    repository = open_repository(make_config(None), clock=clock)
    yield repository
    repository.close()
