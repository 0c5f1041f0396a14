from __future__ import annotations

from datetime import timedelta

import pytest
from fastapi.testclient import TestClient

from almostoa.http import create_app
from almostoa.model import AccessState, MailKind

from .conftest import deposit, make_metadata, make_venue

ADMIN = {"X-Admin-Secret": "test-secret"}


@pytest.fixture
def client(repo):
    return TestClient(create_app(repo))


def request_body(email="requester@someplace.ca", purpose="research", attested=True,
                 **extra):
    body = {"email": email, "purpose": purpose, "attested": attested}
    body.update(extra)
    return body


class TestMetadataView:
    def test_closed_item_is_requestable_without_links(self, repo, client):
        eid = deposit(repo)
        view = client.get(f"/eprints/{eid}").json()
        assert view["requestable"] is True
        assert view["access_kind"] == "closed"
        assert "document_links" not in view
        assert "research, private study, criticism or news reporting" \
            in view["attestation_text"]

    def test_open_item_has_links_and_no_affordance(self, repo, client):
        eid = deposit(repo, access=AccessState.open())
        view = client.get(f"/eprints/{eid}").json()
        assert view["requestable"] is False
        assert view["document_links"] == [
            f"http://www.archipel.uqam.ca/eprints/{eid}/documents/0"]
        assert "attestation_text" not in view

    def test_unknown_id_404(self, client):
        assert client.get("/eprints/ep999999").status_code == 404

    def test_view_never_contains_depositor_address(self, repo, client):
        eid = deposit(repo)
        body = client.get(f"/eprints/{eid}").text
        assert repo.store.get_eprint(eid).depositor.contact_address not in body

    def test_open_document_download(self, repo, client):
        eid = deposit(repo, access=AccessState.open(), contents=(b"PDF BYTES",))
        response = client.get(f"/eprints/{eid}/documents/0")
        assert response.status_code == 200
        assert response.content == b"PDF BYTES"

    def test_closed_document_download_refused(self, repo, client):
        eid = deposit(repo)
        assert client.get(f"/eprints/{eid}/documents/0").status_code == 403


class TestSubmitRequest:
    def test_valid_submission(self, repo, client):
        eid = deposit(repo)
        response = client.post(f"/eprints/{eid}/request", json=request_body())
        assert response.status_code == 201
        payload = response.json()
        assert payload["request_id"]
        assert "token" not in payload
        (message,) = repo.gateway.outbox()
        assert message.kind == MailKind.AUTHOR_NOTIFICATION.value

    def test_unattested_422(self, repo, client):
        eid = deposit(repo)
        response = client.post(f"/eprints/{eid}/request",
                               json=request_body(attested=False))
        assert response.status_code == 422
        assert repo.gateway.outbox() == []

    def test_open_item_409(self, repo, client):
        eid = deposit(repo, access=AccessState.open())
        assert client.post(f"/eprints/{eid}/request",
                           json=request_body()).status_code == 409

    def test_bad_email_422(self, repo, client):
        eid = deposit(repo)
        assert client.post(f"/eprints/{eid}/request",
                           json=request_body(email="nope")).status_code == 422

    def test_unknown_eprint_404(self, client):
        assert client.post("/eprints/ep999999/request",
                           json=request_body()).status_code == 404

    def test_other_purpose_requires_text(self, repo, client):
        eid = deposit(repo)
        assert client.post(f"/eprints/{eid}/request",
                           json=request_body(purpose="other")).status_code == 422
        assert client.post(
            f"/eprints/{eid}/request",
            json=request_body(purpose="other", purpose_text="archival copy"),
        ).status_code == 201

    def test_unknown_purpose_422(self, repo, client):
        eid = deposit(repo)
        assert client.post(f"/eprints/{eid}/request",
                           json=request_body(purpose="piracy")).status_code == 422


class TestRespond:
    def _submit(self, repo, client):
        eid = deposit(repo)
        client.post(f"/eprints/{eid}/request", json=request_body())
        request = repo.store.list_requests()[-1]
        return repo.store.token_for_request(request.id).value

    def test_accept_sends_document(self, repo, client):
        token = self._submit(repo, client)
        response = client.get(f"/respond?token={token}&action=accept")
        assert response.status_code == 200
        payload = response.json()
        assert payload["state"] == "approved"
        assert payload["delivered"] is True
        assert payload["message"] == "The requested document has been sent."

    def test_reject_declines(self, repo, client):
        token = self._submit(repo, client)
        payload = client.get(f"/respond?token={token}&action=reject").json()
        assert payload["state"] == "rejected"
        assert payload["message"] == "The request has been declined."

    def test_repeat_click_is_idempotent(self, repo, client):
        token = self._submit(repo, client)
        client.get(f"/respond?token={token}&action=accept")
        outbox_after_one = [m.message_id for m in repo.gateway.outbox()]
        requests_after_one = repo.store.list_requests()
        for _ in range(5):  # mail clients prefetch and users re-click
            response = client.get(f"/respond?token={token}&action=accept")
            assert response.status_code == 200
            assert response.json()["delivered"] is False
        assert [m.message_id for m in repo.gateway.outbox()] == outbox_after_one
        assert repo.store.list_requests() == requests_after_one

    def test_conflicting_click_409(self, repo, client):
        token = self._submit(repo, client)
        client.get(f"/respond?token={token}&action=accept")
        assert client.get(f"/respond?token={token}&action=reject").status_code == 409

    def test_unknown_token_404(self, client):
        assert client.get("/respond?token=bogus&action=accept").status_code == 404

    def test_missing_or_bad_params_400(self, client):
        assert client.get("/respond").status_code == 400
        assert client.get("/respond?token=x").status_code == 400
        assert client.get("/respond?token=x&action=maybe").status_code == 400

    def test_no_addresses_leak_in_outcome(self, repo, client):
        token = self._submit(repo, client)
        text = client.get(f"/respond?token={token}&action=accept").text
        record = repo.store.list_eprints()[0]
        assert record.depositor.contact_address not in text
        assert "requester@someplace.ca" not in text


class TestAdmin:
    def test_endpoints_require_the_secret(self, client):
        for method, path in [
            ("get", "/admin/stats/responses"),
            ("get", "/admin/stats/access"),
            ("get", "/admin/alerts"),
            ("post", "/admin/scheduler/tick"),
            ("post", "/admin/requests/rq000001/resend-notification"),
        ]:
            assert getattr(client, method)(path).status_code == 401, path
            assert getattr(client, method)(
                path, headers={"X-Admin-Secret": "wrong"}).status_code == 401, path

    def test_tick_lists_flipped_ids(self, repo, client, clock):
        eid = deposit(repo, access=AccessState.closed(clock.now().date()))
        response = client.post("/admin/scheduler/tick", headers=ADMIN)
        assert response.json() == {"flipped": [eid]}
        assert client.post("/admin/scheduler/tick",
                           headers=ADMIN).json() == {"flipped": []}

    def test_tick_accepts_now_override(self, repo, client, clock):
        future = clock.now().date() + timedelta(days=300)
        eid = deposit(repo, access=AccessState.closed(future))
        body = {"now": "2010-06-01T00:00:00Z"}
        response = client.post("/admin/scheduler/tick", headers=ADMIN, json=body)
        assert response.json()["flipped"] == [eid]

    def test_alerts_surface_same_issue_pattern(self, repo, client):
        md = lambda: make_metadata(venue=make_venue())
        first = deposit(repo, metadata=md())
        second = deposit(repo, metadata=md())
        client.post(f"/eprints/{first}/request", json=request_body())
        client.post(f"/eprints/{second}/request", json=request_body())
        alerts = client.get("/admin/alerts", headers=ADMIN).json()["alerts"]
        assert [a["kind"] for a in alerts] == ["same-issue-multi-request"]
        assert alerts[0]["eprint_id"] == second

    def test_stats_endpoints_match_reporter(self, repo, client, clock):
        eid = deposit(repo)
        client.post(f"/eprints/{eid}/request", json=request_body())
        payload = client.get("/admin/stats/responses", headers=ADMIN,
                             params={"from": "2009-01-01T00:00:00Z",
                                     "to": "2009-12-31T23:59:59Z"}).json()
        assert payload["total"] == 1
        assert payload["fresh_pending"] == 1
        access = client.get("/admin/stats/access", headers=ADMIN).json()
        expected = repo.stats.access_stats()
        assert access["total"] == expected.total
        assert access["closed_share_display"] == expected.closed_share_display

    def test_resend_reenqueues_notification(self, repo, client):
        eid = deposit(repo)
        client.post(f"/eprints/{eid}/request", json=request_body())
        request = repo.store.list_requests()[0]
        response = client.post(
            f"/admin/requests/{request.id}/resend-notification", headers=ADMIN)
        assert response.status_code == 200
        kinds = [m.kind for m in repo.gateway.outbox()]
        assert kinds == [MailKind.AUTHOR_NOTIFICATION.value] * 2

    def test_resend_unknown_request_404(self, client):
        assert client.post("/admin/requests/rq424242/resend-notification",
                           headers=ADMIN).status_code == 404


class TestServiceConfig:
    def test_public_config_names_the_repo(self, client):
        payload = client.get("/config").json()
        assert payload["repo_name"] == "Archipel"
        assert payload["jurisdiction"] == "CA"
