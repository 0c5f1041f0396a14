"""Copy-request state machine: create, decide exactly once, notify.

A request is Pending until the author follows one of the two one-click
links from the notification email. The links carry an unguessable token
bound to exactly one request — the repository never exposes requester or
depositor addresses in URLs. Decisions are write-once: the store's
compare-and-set picks a single winner under racing clicks, repeat clicks
of the same link are idempotent, and a contradicting click is refused.

Ignoring the email is always allowed and is not a state: a Pending request
older than the configured window merely *classifies* as unanswered for
reporting, and a late decision is still honored.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Optional

from .errors import (
    AttestationRequired,
    DecisionConflict,
    NotRequestable,
    UnknownToken,
)
from .fairness import FairnessMonitor
from .mail import MailGateway, MailRenderer
from .model import (
    CopyRequest,
    DecisionState,
    DecisionToken,
    Purpose,
    validate_email,
)
from .store import RepositoryStore


def secure_token() -> str:
    """256 bits from the OS CSPRNG, URL-safe."""
    return secrets.token_urlsafe(32)


class ResponseClass(str, Enum):
    APPROVED = "approved"
    REJECTED = "rejected"
    UNANSWERED = "unanswered"
    FRESH_PENDING = "fresh-pending"


def classify_response(request: CopyRequest, now: datetime,
                      ignore_window: timedelta) -> ResponseClass:
    """Statistical classification; pure, and never a terminal state.

    Pending requests strictly older than the window count as unanswered,
    younger ones as fresh. A later decision reclassifies the request.
    """
    state = request.decision.state
    if state is DecisionState.APPROVED:
        return ResponseClass.APPROVED
    if state is DecisionState.REJECTED:
        return ResponseClass.REJECTED
    if now - request.created_at > ignore_window:
        return ResponseClass.UNANSWERED
    return ResponseClass.FRESH_PENDING


@dataclass(frozen=True)
class CreatedRequest:
    request_id: str
    token: str


@dataclass(frozen=True)
class DecisionOutcome:
    state_after: DecisionState
    delivered: bool


class RequestWorkflow:
    def __init__(self, store: RepositoryStore, renderer: MailRenderer,
                 gateway: MailGateway, manager_address: str,
                 monitor: Optional[FairnessMonitor] = None,
                 token_source: Callable[[], str] = secure_token):
        self.store = store
        self.renderer = renderer
        self.gateway = gateway
        self.manager_address = manager_address
        self.monitor = monitor
        self._new_token = token_source

    def create_request(self, eprint_id: str, requester_address: str,
                       purpose: Purpose, attested: bool,
                       now: datetime) -> CreatedRequest:
        """Store a Pending request and notify the depositing author.

        Only closed deposits are requestable; open ones never show the
        request affordance, so a direct call for one is refused. The
        attestation checkbox is the requester's fair-dealing assent and is
        mandatory — nothing is stored without it.
        """
        eprint = self.store.get_eprint(eprint_id)
        if eprint.access.is_open:
            raise NotRequestable(f"eprint {eprint_id} is open access")
        if not attested:
            raise AttestationRequired("the request must attest to a permitted purpose")
        validate_email(requester_address)

        request = CopyRequest(
            id=self.store.next_request_id(),
            eprint_id=eprint_id,
            requester_address=requester_address,
            purpose=purpose,
            attested=True,
            created_at=now,
        )
        alerts = ()
        if self.monitor is not None:
            alerts = tuple(self.monitor.evaluate_request(
                request, self.store.list_requests(), now))
        if alerts:
            request = replace(request, alerts_at_creation=alerts)
        token = DecisionToken(value=self._new_token(), request_id=request.id,
                              issued_at=now)
        self.store.add_request(request, token)

        notify = self.renderer.render_author_notification(
            request, eprint, token.value, alerts=alerts,
            to_address=eprint.depositor.effective_notification_address(self.manager_address),
        )
        self.gateway.send(notify)
        return CreatedRequest(request_id=request.id, token=token.value)

    def decide(self, token_value: str, action: str, now: datetime) -> DecisionOutcome:
        """Apply the author's decision; deliver or decline accordingly.

        Repeating a decision is an idempotent success with no second
        message; contradicting a recorded decision raises. Alerts held on
        the request never influence the outcome here.
        """
        if action not in ("accept", "reject"):
            raise ValueError(f"action must be 'accept' or 'reject', got {action!r}")
        try:
            token = self.store.resolve_token(token_value)
        except Exception as exc:
            raise UnknownToken("no such decision token") from exc

        wanted = DecisionState.APPROVED if action == "accept" else DecisionState.REJECTED
        request, applied = self.store.apply_decision(token.request_id, wanted, now)
        if not applied:
            if request.decision.state is not wanted:
                raise DecisionConflict(
                    f"request {request.id} was already "
                    f"{request.decision.state.value}; cannot {action} it now")
            return DecisionOutcome(state_after=request.decision.state, delivered=False)

        eprint = self.store.get_eprint(request.eprint_id)
        if wanted is DecisionState.APPROVED:
            contents = {p.storage_ref: self.store.get_blob(p.storage_ref)
                        for p in eprint.parts}
            self.gateway.send(self.renderer.render_delivery(request, eprint, contents))
            return DecisionOutcome(state_after=DecisionState.APPROVED, delivered=True)
        self.gateway.send(self.renderer.render_decline(request, eprint))
        return DecisionOutcome(state_after=DecisionState.REJECTED, delivered=False)

    def resend_notification(self, request_id: str, now: datetime):
        """Manual re-enqueue of the author notification, same token.

        For the occasional lost email; there is no automatic retry.
        """
        request = self.store.get_request(request_id)
        eprint = self.store.get_eprint(request.eprint_id)
        token = self.store.token_for_request(request_id)
        message = self.renderer.render_author_notification(
            request, eprint, token.value, alerts=request.alerts_at_creation,
            to_address=eprint.depositor.effective_notification_address(self.manager_address),
        )
        return self.gateway.send(message)
