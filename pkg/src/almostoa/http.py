"""HTTP facade: public metadata view, request submission, the one-click
respond endpoint, and secret-guarded admin endpoints.

Everything requester-facing goes through redacting view builders — no
depositor contact address and no token material ever appears in a public
response. ``/respond`` is a GET on purpose: the links live in emails and
get clicked (and pre-fetched) by mail clients, and the decide contract is
idempotent, which is what makes that safe.
"""

from __future__ import annotations

import hmac
from datetime import timedelta
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import (
    AttestationRequired,
    DecisionConflict,
    InvalidAddress,
    InvalidPeriod,
    NotFound,
    NotRequestable,
    UnknownToken,
    ValidationError,
)
from .model import AccessKind, EprintRecord, Purpose, PurposeKind
from .service import Repository
from .stats import render_access_table, render_response_table
from .timeutil import parse_timestamp


class CopyRequestBody(BaseModel):
    email: str
    purpose: str
    purpose_text: Optional[str] = None
    attested: bool = False


class TickBody(BaseModel):
    now: Optional[str] = None


def public_view(repo: Repository, record: EprintRecord) -> dict:
    """Redacted metadata view; built field by field so nothing private can leak."""
    requestable = record.access.kind is AccessKind.CLOSED
    view = {
        "id": record.id,
        "metadata": {
            "title": record.metadata.title,
            "creators": list(record.metadata.creators),
            "year": record.metadata.year,
            "venue": record.metadata.venue.to_dict(),
            "citation_line": record.metadata.citation_line,
            "vor_identifier": record.metadata.vor_identifier,
        },
        "access_kind": record.access.kind.value,
        "requestable": requestable,
    }
    if requestable:
        view["attestation_text"] = repo.config.jurisdiction.attestation_text
    else:
        view["document_links"] = [
            f"{repo.config.base_url.rstrip('/')}/eprints/{record.id}/documents/{i}"
            for i in range(len(record.parts))
        ]
    return view


def parse_purpose(name: str, text: Optional[str]) -> Purpose:
    try:
        kind = PurposeKind(name)
    except ValueError:
        raise ValidationError(
            f"purpose must be one of {[k.value for k in PurposeKind]}, got {name!r}")
    return Purpose(kind, text if kind is PurposeKind.OTHER else None)


def create_app(repo: Repository) -> FastAPI:
    app = FastAPI(title=repo.config.name, docs_url=None, redoc_url=None)

    def require_admin(x_admin_secret: str = Header(default="")):
        if not hmac.compare_digest(x_admin_secret, repo.config.admin_secret):
            raise HTTPException(status_code=401, detail="missing or bad admin secret")

    @app.exception_handler(NotFound)
    async def _not_found(_, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(NotRequestable)
    async def _not_requestable(_, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(DecisionConflict)
    async def _conflict(_, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(UnknownToken)
    async def _unknown_token(_, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(AttestationRequired)
    async def _attestation(_, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(InvalidAddress)
    async def _bad_address(_, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _bad_input(_, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/config")
    def service_config():
        return {
            "repo_name": repo.config.name,
            "base_url": repo.config.base_url,
            "jurisdiction": repo.config.jurisdiction.name,
        }

    @app.get("/eprints/{eprint_id}")
    def eprint_view(eprint_id: str):
        return public_view(repo, repo.store.get_eprint(eprint_id))

    @app.get("/eprints/{eprint_id}/documents/{index}")
    def document(eprint_id: str, index: int):
        record = repo.store.get_eprint(eprint_id)
        if record.access.kind is not AccessKind.OPEN:
            raise HTTPException(status_code=403, detail="closed access")
        if not (0 <= index < len(record.parts)):
            raise HTTPException(status_code=404, detail="no such document part")
        part = record.parts[index]
        return Response(content=repo.store.get_blob(part.storage_ref),
                        media_type=part.media_type)

    @app.post("/eprints/{eprint_id}/request", status_code=201)
    def submit_request(eprint_id: str, body: CopyRequestBody):
        created = repo.workflow.create_request(
            eprint_id=eprint_id,
            requester_address=body.email,
            purpose=parse_purpose(body.purpose, body.purpose_text),
            attested=body.attested,
            now=repo.now(),
        )
        # Deliberately no token here: only the author's email carries it.
        return {
            "request_id": created.request_id,
            "message": ("Your request has been sent to the author. "
                        "If the author approves it, the document will be "
                        "emailed to the address you gave."),
        }

    @app.get("/respond")
    def respond(token: Optional[str] = None, action: Optional[str] = None):
        if not token or action not in ("accept", "reject"):
            raise HTTPException(status_code=400,
                                detail="token and action=accept|reject are required")
        try:
            token_record = repo.store.resolve_token(token)
        except NotFound:
            raise HTTPException(status_code=404, detail="unknown decision token")
        outcome = repo.workflow.decide(token, action, now=repo.now())
        request = repo.store.get_request(token_record.request_id)
        title = repo.store.get_eprint(request.eprint_id).metadata.title
        sent = outcome.state_after.value == "approved"
        return {
            "state": outcome.state_after.value,
            "delivered": outcome.delivered,
            "title": title,
            "message": ("The requested document has been sent." if sent
                        else "The request has been declined."),
        }

    @app.get("/admin/stats/responses", dependencies=[Depends(require_admin)])
    def admin_response_stats(from_: Optional[str] = Query(default=None, alias="from"),
                             to: Optional[str] = None,
                             window_days: Optional[int] = None):
        now = repo.now()
        start = parse_timestamp(from_) if from_ else parse_timestamp("1970-01-01T00:00:00Z")
        end = parse_timestamp(to) if to else now
        window = (repo.config.ignore_window if window_days is None
                  else timedelta(days=window_days))
        try:
            stats = repo.stats.response_stats(start, end, window, now)
        except InvalidPeriod as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        payload = stats.to_dict()
        payload["rendered_table"] = render_response_table(stats, repo.config.name)
        return payload

    @app.get("/admin/stats/access", dependencies=[Depends(require_admin)])
    def admin_access_stats():
        stats = repo.stats.access_stats()
        payload = stats.to_dict()
        payload["rendered_table"] = render_access_table(stats, repo.config.name)
        return payload

    @app.get("/admin/alerts", dependencies=[Depends(require_admin)])
    def admin_alerts():
        stored = [
            alert.to_dict()
            for request in repo.store.list_requests()
            for alert in request.alerts_at_creation
        ]
        scanned = []
        if repo.monitor is not None:
            scanned = [a.to_dict() for a in repo.monitor.scan_accepted_volume(
                repo.store.list_requests(), repo.now())]
        return {"alerts": stored + scanned}

    @app.post("/admin/scheduler/tick", dependencies=[Depends(require_admin)])
    def admin_tick(body: Optional[TickBody] = None):
        now = parse_timestamp(body.now) if body and body.now else repo.now()
        return {"flipped": repo.scheduler.run_due_embargoes(now)}

    @app.post("/admin/requests/{request_id}/resend-notification",
              dependencies=[Depends(require_admin)])
    def admin_resend(request_id: str):
        receipt = repo.workflow.resend_notification(request_id, repo.now())
        return {"message_id": receipt.message_id,
                "accepted_at": receipt.accepted_at.isoformat()}

    if repo.config.ui_assets_dir is not None and repo.config.ui_assets_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=repo.config.ui_assets_dir, html=True),
                  name="ui")

    return app
