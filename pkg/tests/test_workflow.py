from __future__ import annotations

import random
import threading
from datetime import timedelta

import pytest

from almostoa.errors import (
    AttestationRequired,
    DecisionConflict,
    InvalidAddress,
    NotFound,
    NotRequestable,
    UnknownToken,
)
from almostoa.model import (
    AccessState,
    DecisionState,
    MailKind,
    Purpose,
    PurposeKind,
)
from almostoa.service import ManualClock, SeededRandomSource, open_repository
from almostoa.workflow import ResponseClass, classify_response, secure_token

from .conftest import T0, deposit, make_config, make_metadata, make_venue

RESEARCH = Purpose(PurposeKind.RESEARCH)


def _without_alert_paragraphs(body: str) -> str:
    """Drop advisory lines and collapse the blank lines they brought along."""
    lines = [l for l in body.splitlines() if not l.startswith("Advisory")]
    collapsed = []
    for line in lines:
        if line == "" and collapsed and collapsed[-1] == "":
            continue
        collapsed.append(line)
    return "\n".join(collapsed)


def create(repo, eprint_id, requester="requester@someplace.ca", purpose=RESEARCH,
           attested=True):
    return repo.workflow.create_request(eprint_id, requester, purpose, attested,
                                        now=repo.now())


class TestCreateRequest:
    def test_happy_path_stores_pending_and_notifies_author(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        request = repo.store.get_request(created.request_id)
        assert request.decision.state is DecisionState.PENDING
        assert request.attested is True
        (message,) = repo.gateway.outbox()
        assert message.kind == MailKind.AUTHOR_NOTIFICATION.value
        assert "requested by requester@someplace.ca" in message.body

    def test_open_eprint_is_not_requestable(self, repo):
        eid = deposit(repo, access=AccessState.open())
        with pytest.raises(NotRequestable):
            create(repo, eid)

    def test_unattested_submission_stores_nothing(self, repo):
        eid = deposit(repo)
        with pytest.raises(AttestationRequired):
            create(repo, eid, attested=False)
        assert repo.store.list_requests() == []
        assert repo.gateway.outbox() == []

    def test_bad_address_rejected(self, repo):
        eid = deposit(repo)
        with pytest.raises(InvalidAddress):
            create(repo, eid, requester="not-an-address")

    def test_unknown_eprint(self, repo):
        with pytest.raises(NotFound):
            create(repo, "ep999999")

    def test_returns_no_depositor_address(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        depositor = repo.store.get_eprint(eid).depositor.contact_address
        assert depositor not in created.request_id
        assert depositor not in created.token

    def test_inactive_depositor_routes_to_fallback(self, repo):
        from .conftest import make_depositor

        eid = deposit(repo, depositor=make_depositor(
            active=False, fallback="office@uqam.ca"))
        create(repo, eid)
        (message,) = repo.gateway.outbox()
        assert message.to_address == "office@uqam.ca"

    def test_inactive_depositor_without_fallback_routes_to_manager(self, repo):
        from .conftest import make_depositor

        eid = deposit(repo, depositor=make_depositor(active=False))
        create(repo, eid)
        (message,) = repo.gateway.outbox()
        assert message.to_address == repo.config.effective_manager_address


class TestDecide:
    def test_accept_delivers_all_parts(self, repo):
        eid = deposit(repo, contents=(b"part one", b"part two"))
        created = create(repo, eid)
        outcome = repo.workflow.decide(created.token, "accept", repo.now())
        assert outcome.state_after is DecisionState.APPROVED
        assert outcome.delivered is True
        kinds = [m.kind for m in repo.gateway.outbox()]
        assert kinds == [MailKind.AUTHOR_NOTIFICATION.value, MailKind.DELIVERY.value]
        delivery = repo.gateway.outbox()[-1]
        assert len(delivery.attachments) == 2
        assert delivery.to_address == "requester@someplace.ca"

    def test_reject_sends_short_decline(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        outcome = repo.workflow.decide(created.token, "reject", repo.now())
        assert outcome.state_after is DecisionState.REJECTED
        assert outcome.delivered is False
        kinds = [m.kind for m in repo.gateway.outbox()]
        assert kinds == [MailKind.AUTHOR_NOTIFICATION.value,
                         MailKind.DECLINE_NOTICE.value]

    def test_repeat_accept_is_idempotent(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        repo.workflow.decide(created.token, "accept", repo.now())
        before = repo.gateway.outbox()
        again = repo.workflow.decide(created.token, "accept", repo.now())
        assert again.state_after is DecisionState.APPROVED
        assert again.delivered is False
        assert repo.gateway.outbox() == before

    def test_conflicting_action_raises(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        repo.workflow.decide(created.token, "reject", repo.now())
        with pytest.raises(DecisionConflict):
            repo.workflow.decide(created.token, "accept", repo.now())
        # and the stored decision is untouched
        request = repo.store.get_request(created.request_id)
        assert request.decision.state is DecisionState.REJECTED

    def test_unknown_token(self, repo):
        with pytest.raises(UnknownToken):
            repo.workflow.decide("no-such-token", "accept", repo.now())

    def test_bad_action_rejected(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        with pytest.raises(ValueError):
            repo.workflow.decide(created.token, "approve", repo.now())

    def test_request_on_later_opened_eprint_stays_decidable(self, repo, clock):
        eid = deposit(repo, access=AccessState.closed(clock.now().date()))
        created = create(repo, eid)
        clock.advance(timedelta(days=2))
        repo.scheduler.run_due_embargoes(clock.now())
        assert repo.store.get_eprint(eid).access.is_open
        outcome = repo.workflow.decide(created.token, "accept", repo.now())
        assert outcome.delivered is True

    def test_exactly_once_under_racing_decides(self, mem_repo):
        rng = random.Random(7)
        for trial in range(200):
            eid = deposit(mem_repo)
            created = create(mem_repo, eid)
            actions = ["accept", "accept"] if trial % 2 == 0 else ["accept", "reject"]
            rng.shuffle(actions)
            results, errors = [], []

            def hit(action):
                try:
                    results.append(mem_repo.workflow.decide(action=action,
                                                            token_value=created.token,
                                                            now=mem_repo.now()))
                except DecisionConflict as exc:
                    errors.append(exc)

            threads = [threading.Thread(target=hit, args=(a,)) for a in actions]
            for t in threads:
                t.start()
            for t in threads:
                t.join()

            request = mem_repo.store.get_request(created.request_id)
            assert request.decision.state in (DecisionState.APPROVED,
                                              DecisionState.REJECTED)
            deliveries = [m for m in mem_repo.gateway.outbox()
                          if m.kind == MailKind.DELIVERY.value
                          and created.request_id not in ()]  # all deliveries so far
            per_request = [m for m in deliveries
                           if m.to_address == "requester@someplace.ca"]
            delivered_flags = [r.delivered for r in results]
            assert delivered_flags.count(True) == \
                (1 if request.decision.state is DecisionState.APPROVED else 0)


class TestTokens:
    def test_secure_token_has_enough_entropy(self):
        token = secure_token()
        # 43 url-safe base64 chars ~ 256 bits; 128 bits needs 22.
        assert len(token) >= 22
        assert all(c.isalnum() or c in "-_" for c in token)

    def test_tokens_never_repeat(self, repo):
        eid = deposit(repo)
        tokens = {create(repo, eid).token for _ in range(100)}
        assert len(tokens) == 100

    def test_token_isolation_on_random_stores(self, mem_repo):
        rng = random.Random(99)
        eids = [deposit(mem_repo) for _ in range(5)]
        created = [create(mem_repo, rng.choice(eids),
                          requester=f"user{i}@example.org")
                   for i in range(30)]
        for _ in range(60):
            chosen = rng.choice(created)
            action = rng.choice(["accept", "reject"])
            snapshot = {r.id: r.decision.state
                        for r in mem_repo.store.list_requests()}
            try:
                mem_repo.workflow.decide(chosen.token, action, mem_repo.now())
            except DecisionConflict:
                pass
            after = {r.id: r.decision.state for r in mem_repo.store.list_requests()}
            for rid, state in after.items():
                if rid != chosen.request_id:
                    assert snapshot[rid] == state, "token changed a foreign request"


class TestClassifyResponse:
    WINDOW = timedelta(days=30)

    def _pending(self, repo, age):
        eid = deposit(repo)
        created = create(repo, eid)
        request = repo.store.get_request(created.request_id)
        return request, request.created_at + age

    def test_pending_31_days_is_unanswered(self, mem_repo):
        request, now = self._pending(mem_repo, timedelta(days=31))
        assert classify_response(request, now, self.WINDOW) is ResponseClass.UNANSWERED

    def test_pending_one_hour_is_fresh(self, mem_repo):
        request, now = self._pending(mem_repo, timedelta(hours=1))
        assert classify_response(request, now, self.WINDOW) is ResponseClass.FRESH_PENDING

    def test_pending_exactly_at_window_is_fresh(self, mem_repo):
        request, now = self._pending(mem_repo, self.WINDOW)
        assert classify_response(request, now, self.WINDOW) is ResponseClass.FRESH_PENDING

    def test_decided_requests_classify_by_decision_at_any_age(self, mem_repo):
        eid = deposit(mem_repo)
        created = create(mem_repo, eid)
        mem_repo.workflow.decide(created.token, "accept", mem_repo.now())
        request = mem_repo.store.get_request(created.request_id)
        later = request.created_at + timedelta(days=400)
        assert classify_response(request, later, self.WINDOW) is ResponseClass.APPROVED

    def test_late_decision_reclassifies_an_unanswered_request(self, mem_repo, clock):
        eid = deposit(mem_repo)
        created = create(mem_repo, eid)
        clock.advance(timedelta(days=45))
        request = mem_repo.store.get_request(created.request_id)
        assert classify_response(request, clock.now(), self.WINDOW) is \
            ResponseClass.UNANSWERED
        mem_repo.workflow.decide(created.token, "accept", clock.now())
        request = mem_repo.store.get_request(created.request_id)
        assert classify_response(request, clock.now(), self.WINDOW) is \
            ResponseClass.APPROVED

    def test_classes_partition_all_requests(self, mem_repo, clock):
        rng = random.Random(3)
        eids = [deposit(mem_repo) for _ in range(4)]
        created = []
        for i in range(40):
            clock.advance(timedelta(days=rng.randint(0, 3)))
            created.append(create(mem_repo, rng.choice(eids),
                                  requester=f"u{i}@example.org"))
            if rng.random() < 0.5:
                mem_repo.workflow.decide(created[-1].token,
                                         rng.choice(["accept", "reject"]),
                                         mem_repo.now())
        now = clock.now()
        classes = [classify_response(r, now, self.WINDOW)
                   for r in mem_repo.store.list_requests()]
        assert len(classes) == 40  # every request classified, exactly once each


class TestMonitorIntegration:
    def test_alert_is_stored_and_appended_to_notification(self, repo):
        md = lambda: make_metadata(venue=make_venue())
        a1 = deposit(repo, metadata=md())
        a2 = deposit(repo, metadata=md())
        create(repo, a1)
        created = create(repo, a2)
        request = repo.store.get_request(created.request_id)
        assert len(request.alerts_at_creation) == 1
        second_notification = repo.gateway.outbox()[1]
        assert "Advisory" in second_notification.body

    def test_disabling_the_monitor_changes_only_alert_text(self, tmp_path):
        def run(enabled, subdir):
            repository = open_repository(
                make_config(tmp_path / subdir, monitor_enabled=enabled),
                clock=ManualClock(T0),
                token_source=SeededRandomSource(5, prefix="tok"),
                message_id_source=SeededRandomSource(6, prefix="msg"),
            )
            md = lambda: make_metadata(title="Fixed title",
                                       venue=make_venue())
            a1 = deposit(repository, metadata=md())
            a2 = deposit(repository, metadata=md())
            first = create(repository, a1)
            second = create(repository, a2)
            outcome1 = repository.workflow.decide(first.token, "accept",
                                                  repository.now())
            outcome2 = repository.workflow.decide(second.token, "reject",
                                                  repository.now())
            result = {
                "outcomes": [(outcome1.state_after, outcome1.delivered),
                             (outcome2.state_after, outcome2.delivered)],
                "alerts": [len(r.alerts_at_creation)
                           for r in repository.store.list_requests()],
                "outbox": [(m.kind, m.to_address, m.subject,
                            _without_alert_paragraphs(m.body))
                           for m in repository.gateway.outbox()],
            }
            repository.close()
            return result

        with_monitor = run(True, "a")
        without = run(False, "b")
        assert with_monitor["outcomes"] == without["outcomes"]
        assert with_monitor["outbox"] == without["outbox"]
        assert with_monitor["alerts"] == [0, 1]
        assert without["alerts"] == [0, 0]


class TestResend:
    def test_resend_reuses_the_same_token(self, repo):
        eid = deposit(repo)
        created = create(repo, eid)
        repo.workflow.resend_notification(created.request_id, repo.now())
        first, second = repo.gateway.outbox()
        assert first.kind == second.kind == MailKind.AUTHOR_NOTIFICATION.value
        assert f"token={created.token}" in second.body
        assert first.message_id != second.message_id

    def test_resend_unknown_request(self, repo):
        with pytest.raises(NotFound):
            repo.workflow.resend_notification("rq999999", repo.now())
