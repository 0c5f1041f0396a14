"""File-backed event-sourced store with an in-memory index.

Layout under the store directory:

    events.log     append-only JSON lines, one event per line (the audit trail)
    snapshot.json  periodic full-state snapshot + the log offset it covers
    blobs/         content-addressed document bytes (sha256)

Every mutation appends one event and then updates the index, both under a
single mutation lock, so concurrent callers observe one total order of
transitions (linearizability). Reads are lock-free: the index maps ids to
immutable values and CPython dict access is atomic, so readers never block
writers. Passing ``root=None`` keeps everything in memory — useful for
property tests; production deployments always give a directory, because the
replayable log is the legal audit trail.
"""

from __future__ import annotations

import hashlib
import json
import threading
from datetime import date, datetime
from pathlib import Path
from typing import Optional

from .errors import InvalidTransition, NotFound, StorageError, ValidationError
from .model import (
    AccessKind,
    AccessState,
    AccessTransition,
    CopyRequest,
    DecisionState,
    DecisionToken,
    Depositor,
    EprintMetadata,
    EprintRecord,
    VenueRef,
)
from .timeutil import format_timestamp, parse_timestamp

SCHEDULER_ACTOR = "scheduler"
ADMIN_ACTOR = "admin"

_SNAPSHOT_VERSION = 1


class RepositoryStore:
    """Persistent store for eprints, copy requests, tokens and embargoes."""

    def __init__(self, root: Optional[Path] = None, snapshot_every: int = 1000):
        self._root = Path(root) if root is not None else None
        self._snapshot_every = max(1, snapshot_every)
        self._lock = threading.RLock()

        self._eprints: dict[str, EprintRecord] = {}
        self._audit: dict[str, tuple] = {}
        self._requests: dict[str, CopyRequest] = {}
        self._tokens: dict[str, DecisionToken] = {}          # token value -> token
        self._request_token: dict[str, DecisionToken] = {}   # request id -> token
        self._embargoes: dict[str, date] = {}                # eprint id -> expiry
        self._eprint_seq = 0
        self._request_seq = 0
        self._event_count = 0
        self._log_handle = None
        self._memory_blobs: dict[str, bytes] = {}

        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
            (self._root / "blobs").mkdir(exist_ok=True)
            self._recover()
            self._log_handle = open(self._root / "events.log", "a", encoding="utf-8")

    # -- persistence -------------------------------------------------

    def _recover(self):
        offset = 0
        snap_path = self._root / "snapshot.json"
        if snap_path.exists():
            with open(snap_path, encoding="utf-8") as fh:
                snap = json.load(fh)
            if snap.get("version") != _SNAPSHOT_VERSION:
                raise StorageError(f"unsupported snapshot version in {snap_path}")
            self._restore_snapshot(snap)
            offset = snap["log_offset"]
        log_path = self._root / "events.log"
        if log_path.exists():
            with open(log_path, encoding="utf-8") as fh:
                for i, line in enumerate(fh):
                    if i < offset or not line.strip():
                        continue
                    self._apply_event(json.loads(line))
                    self._event_count = i + 1

    def _append_event(self, event: dict):
        self._event_count += 1
        if self._log_handle is None:
            return
        try:
            self._log_handle.write(json.dumps(event, ensure_ascii=False) + "\n")
            self._log_handle.flush()
        except OSError as exc:
            raise StorageError(f"could not append to event log: {exc}") from exc
        if self._event_count % self._snapshot_every == 0:
            self.snapshot()

    def _apply_event(self, event: dict):
        """Replay one logged event into the index (recovery path)."""
        kind = event["type"]
        if kind == "deposit":
            record = EprintRecord.from_dict(event["record"])
            self._index_deposit(record)
        elif kind == "access":
            transition = AccessTransition.from_dict(event)
            record = self._eprints[transition.eprint_id]
            self._index_access(record.with_access(transition.new), transition)
        elif kind == "request":
            request = CopyRequest.from_dict(event["request"])
            token = DecisionToken.from_dict(event["token"])
            self._index_request(request, token)
        elif kind == "decision":
            request = self._requests[event["request_id"]]
            self._requests[request.id] = request.decided(
                DecisionState(event["state"]), parse_timestamp(event["at"]))
        else:
            raise StorageError(f"unknown event type in log: {kind!r}")

    def snapshot(self):
        """Write a full-state snapshot so recovery can skip the log prefix."""
        if self._root is None:
            return
        with self._lock:
            snap = {
                "version": _SNAPSHOT_VERSION,
                "log_offset": self._event_count,
                "eprints": [r.to_dict() for r in self._eprints.values()],
                "audit": {eid: [t.to_dict() for t in trail] for eid, trail in self._audit.items()},
                "requests": [r.to_dict() for r in self._requests.values()],
                "tokens": [t.to_dict() for t in self._tokens.values()],
                "eprint_seq": self._eprint_seq,
                "request_seq": self._request_seq,
            }
            tmp = self._root / "snapshot.json.tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(snap, fh, ensure_ascii=False)
            tmp.replace(self._root / "snapshot.json")

    def _restore_snapshot(self, snap: dict):
        for data in snap["eprints"]:
            record = EprintRecord.from_dict(data)
            self._eprints[record.id] = record
            if not record.access.is_open and record.access.embargo_until:
                self._embargoes[record.id] = record.access.embargo_until
        self._audit = {
            eid: tuple(AccessTransition.from_dict(t) for t in trail)
            for eid, trail in snap["audit"].items()
        }
        for data in snap["requests"]:
            request = CopyRequest.from_dict(data)
            self._requests[request.id] = request
        for data in snap["tokens"]:
            token = DecisionToken.from_dict(data)
            self._tokens[token.value] = token
            self._request_token[token.request_id] = token
        self._eprint_seq = snap["eprint_seq"]
        self._request_seq = snap["request_seq"]
        self._event_count = snap["log_offset"]

    def close(self):
        if self._log_handle is not None:
            self._log_handle.close()
            self._log_handle = None

    # -- index maintenance -------------------------------------------

    def _index_deposit(self, record: EprintRecord):
        self._eprints[record.id] = record
        self._audit.setdefault(record.id, ())
        if not record.access.is_open and record.access.embargo_until:
            self._embargoes[record.id] = record.access.embargo_until
        seq = _sequence_of(record.id, "ep")
        if seq is not None:
            self._eprint_seq = max(self._eprint_seq, seq)

    def _index_access(self, record: EprintRecord, transition: AccessTransition):
        self._eprints[record.id] = record
        self._audit[record.id] = self._audit.get(record.id, ()) + (transition,)
        if record.access.is_open or record.access.embargo_until is None:
            self._embargoes.pop(record.id, None)
        else:
            self._embargoes[record.id] = record.access.embargo_until

    def _index_request(self, request: CopyRequest, token: DecisionToken):
        self._requests[request.id] = request
        self._tokens[token.value] = token
        self._request_token[request.id] = token
        seq = _sequence_of(request.id, "rq")
        if seq is not None:
            self._request_seq = max(self._request_seq, seq)

    # -- blobs ---------------------------------------------------------

    def put_blob(self, content: bytes) -> tuple[str, str]:
        """Store document bytes, content-addressed. Returns (digest, storage_ref)."""
        digest = hashlib.sha256(content).hexdigest()
        if self._root is not None:
            path = self._root / "blobs" / digest
            if not path.exists():
                try:
                    path.write_bytes(content)
                except OSError as exc:
                    raise StorageError(f"could not store document blob: {exc}") from exc
        else:
            self._memory_blobs[digest] = content
        return digest, f"blob:{digest}"

    def get_blob(self, storage_ref: str) -> bytes:
        digest = storage_ref.split(":", 1)[1]
        if self._root is not None:
            path = self._root / "blobs" / digest
            if not path.exists():
                raise NotFound(f"no stored document {storage_ref}")
            return path.read_bytes()
        try:
            return self._memory_blobs[digest]
        except KeyError:
            raise NotFound(f"no stored document {storage_ref}") from None

    # -- eprints -------------------------------------------------------

    def deposit_eprint(self, metadata: EprintMetadata, depositor: Depositor,
                       parts, access: AccessState, now: datetime) -> str:
        parts = tuple(parts)
        if not parts:
            raise ValidationError("a deposit needs at least one document part")
        with self._lock:
            self._eprint_seq += 1
            record = EprintRecord(
                id=f"ep{self._eprint_seq:06d}",
                metadata=metadata,
                depositor=depositor,
                access=access,
                parts=parts,
                deposited_at=now,
            )
            self._append_event({"type": "deposit", "record": record.to_dict()})
            self._index_deposit(record)
            return record.id

    def get_eprint(self, eprint_id: str) -> EprintRecord:
        try:
            return self._eprints[eprint_id]
        except KeyError:
            raise NotFound(f"no eprint {eprint_id!r}") from None

    def set_access_state(self, eprint_id: str, new_state: AccessState,
                         actor: str, now: datetime) -> AccessState:
        """Replace the access state, appending to the audit trail.

        The scheduler may only move Closed -> Open; reopening a record as
        Closed is reserved to administrators. Setting the current state again
        is a recorded no-op.
        """
        with self._lock:
            record = self.get_eprint(eprint_id)
            old = record.access
            if actor == SCHEDULER_ACTOR and not (not old.is_open and new_state.is_open):
                raise InvalidTransition("the scheduler may only flip closed deposits open")
            if old.is_open and not new_state.is_open and actor != ADMIN_ACTOR:
                raise InvalidTransition("only an administrator may close an open deposit")
            transition = AccessTransition(eprint_id=eprint_id, old=old, new=new_state,
                                          actor=actor, at=now)
            event = transition.to_dict()
            event["type"] = "access"
            self._append_event(event)
            self._index_access(record.with_access(new_state), transition)
            return old

    def compare_and_open(self, eprint_id: str, actor: str, now: datetime) -> bool:
        """Flip to Open only if currently Closed; False when already Open.

        This is the scheduler's compare-and-set: losing a race to another
        tick (or an admin) is success.
        """
        with self._lock:
            record = self.get_eprint(eprint_id)
            if record.access.is_open:
                return False
            self.set_access_state(eprint_id, AccessState.open(), actor, now)
            return True

    def list_eprints(self, access_kind: Optional[AccessKind] = None,
                     venue: Optional[VenueRef] = None) -> list[EprintRecord]:
        with self._lock:
            records = list(self._eprints.values())
        if access_kind is not None:
            records = [r for r in records if r.access.kind is access_kind]
        if venue is not None:
            key = venue.grouping_key()
            records = [r for r in records if r.metadata.venue.grouping_key() == key]
        records.sort(key=lambda r: (r.deposited_at, r.id))
        return records

    def access_audit(self, eprint_id: str) -> tuple:
        self.get_eprint(eprint_id)
        return self._audit.get(eprint_id, ())

    # -- embargo registry ----------------------------------------------

    def due_embargoes(self, as_of: date) -> list[str]:
        """Eprint ids whose embargo expiry is on or before the given date."""
        with self._lock:
            due = [eid for eid, expiry in self._embargoes.items() if expiry <= as_of]
        return sorted(due)

    def embargo_entries(self) -> dict[str, date]:
        with self._lock:
            return dict(self._embargoes)

    # -- copy requests ---------------------------------------------------

    def next_request_id(self) -> str:
        with self._lock:
            self._request_seq += 1
            return f"rq{self._request_seq:06d}"

    def add_request(self, request: CopyRequest, token: DecisionToken):
        if token.request_id != request.id:
            raise ValidationError("token is bound to a different request")
        with self._lock:
            if token.value in self._tokens:
                raise StorageError("token value collision; refusing to overwrite")
            self._append_event({
                "type": "request",
                "request": request.to_dict(),
                "token": token.to_dict(),
            })
            self._index_request(request, token)

    def get_request(self, request_id: str) -> CopyRequest:
        try:
            return self._requests[request_id]
        except KeyError:
            raise NotFound(f"no copy request {request_id!r}") from None

    def list_requests(self) -> list[CopyRequest]:
        with self._lock:
            requests = list(self._requests.values())
        requests.sort(key=lambda r: (r.created_at, r.id))
        return requests

    def resolve_token(self, value: str) -> DecisionToken:
        try:
            return self._tokens[value]
        except KeyError:
            raise NotFound("unknown decision token") from None

    def token_for_request(self, request_id: str) -> DecisionToken:
        try:
            return self._request_token[request_id]
        except KeyError:
            raise NotFound(f"no token for request {request_id!r}") from None

    def apply_decision(self, request_id: str, state: DecisionState,
                       now: datetime) -> tuple[CopyRequest, bool]:
        """Compare-and-set the write-once decision.

        Returns (request after the call, whether this call applied it).
        A Pending request transitions; anything else leaves the stored
        decision untouched and reports ``applied=False``.
        """
        if state is DecisionState.PENDING:
            raise ValidationError("cannot decide a request back to pending")
        with self._lock:
            request = self.get_request(request_id)
            if request.decision.state is not DecisionState.PENDING:
                return request, False
            decided = request.decided(state, now)
            self._append_event({
                "type": "decision",
                "request_id": request_id,
                "state": state.value,
                "at": format_timestamp(now),
            })
            self._requests[request_id] = decided
            return decided, True


def _sequence_of(identifier: str, prefix: str) -> Optional[int]:
    if identifier.startswith(prefix) and identifier[len(prefix):].isdigit():
        return int(identifier[len(prefix):])
    return None
