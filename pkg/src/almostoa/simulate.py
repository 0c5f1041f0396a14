"""Scenario-driven synthetic traffic, on a virtual clock.

Scenarios exist to reproduce response tables and to exercise the whole
request path in tests and demos. All traffic goes through the same
workflow layer the HTTP service uses — never straight into the store — so
every invariant (attestation, tokens, exactly-once mail) applies to
simulated requests too.

Scenario file (JSON or YAML)::

    seed: 42
    start: "2009-01-01T09:00:00Z"
    step: "1h"                  # gap between request creations
    requests:
      - eprint: ep000001        # id, {"index": 3}, or "random-closed"
        requester: reader@example.net
        purpose: research
        decision: accept        # accept | reject | none
        decision_delay: "2d"

Replaying the same scenario against the same store with the same seed
produces identical event-log and outbox bytes: ids are sequential, time is
scenario-controlled, and tokens/message ids come from a seeded stream.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import yaml

from .errors import ValidationError
from .model import AccessKind, Purpose, PurposeKind
from .service import ManualClock, Repository
from .timeutil import parse_duration, parse_timestamp


@dataclass(frozen=True)
class ScenarioRequest:
    eprint: object              # id string, {"index": n}, or "random-closed"
    requester: str
    purpose: str = "research"
    purpose_text: str = ""
    decision: str = "none"      # accept | reject | none
    decision_delay: timedelta = timedelta(days=1)


@dataclass(frozen=True)
class Scenario:
    seed: int
    start: datetime
    step: timedelta
    requests: tuple


@dataclass
class SimulationSummary:
    created: int = 0
    accepted: int = 0
    rejected: int = 0
    undecided: int = 0
    end_time: datetime = None
    request_ids: list = field(default_factory=list)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> Scenario:
    requests = []
    for item in raw.get("requests", []):
        decision = item.get("decision", "none")
        if decision not in ("accept", "reject", "none"):
            raise ValidationError(f"decision must be accept/reject/none, got {decision!r}")
        requests.append(ScenarioRequest(
            eprint=item["eprint"],
            requester=item["requester"],
            purpose=item.get("purpose", "research"),
            purpose_text=item.get("purpose_text", ""),
            decision=decision,
            decision_delay=parse_duration(item.get("decision_delay", "1d")),
        ))
    return Scenario(
        seed=int(raw.get("seed", 0)),
        start=parse_timestamp(raw.get("start", "2009-01-01T00:00:00Z")),
        step=parse_duration(raw.get("step", "1h")),
        requests=tuple(requests),
    )


def run_scenario(repo: Repository, scenario: Scenario) -> SimulationSummary:
    """Create every request, then apply decisions in delay order.

    Decisions are interleaved with creations on the virtual clock: each
    pending action fires when the clock passes creation time + delay.
    """
    if not isinstance(repo.clock, ManualClock):
        raise ValidationError("simulation needs a repository opened on a manual clock")
    rng = random.Random(scenario.seed)
    clock: ManualClock = repo.clock
    clock.set(scenario.start)

    pending = []  # (due_time, token, action)
    summary = SimulationSummary()

    def flush_due(upto: datetime):
        for entry in sorted((p for p in pending if p[0] <= upto), key=lambda p: p[0]):
            pending.remove(entry)
            due, token, action = entry
            clock.set(max(clock.now(), due))
            repo.workflow.decide(token, action, now=clock.now())
            if action == "accept":
                summary.accepted += 1
            else:
                summary.rejected += 1

    for i, item in enumerate(scenario.requests):
        at = scenario.start + i * scenario.step
        flush_due(at)
        clock.set(at)
        eprint_id = _pick_eprint(repo, item.eprint, rng)
        purpose = Purpose(PurposeKind(item.purpose),
                          item.purpose_text or None)
        created = repo.workflow.create_request(
            eprint_id=eprint_id,
            requester_address=item.requester,
            purpose=purpose,
            attested=True,
            now=clock.now(),
        )
        summary.created += 1
        summary.request_ids.append(created.request_id)
        if item.decision != "none":
            pending.append((at + item.decision_delay, created.token, item.decision))
        else:
            summary.undecided += 1

    if pending:
        pending.sort(key=lambda p: p[0])
        flush_due(pending[-1][0])
    summary.end_time = clock.now()
    return summary


def _pick_eprint(repo: Repository, selector, rng: random.Random) -> str:
    if isinstance(selector, dict) and "index" in selector:
        records = repo.store.list_eprints()
        try:
            return records[selector["index"]].id
        except IndexError:
            raise ValidationError(f"eprint index {selector['index']} out of range")
    if selector == "random-closed":
        closed = repo.store.list_eprints(access_kind=AccessKind.CLOSED)
        if not closed:
            raise ValidationError("no closed deposits to pick from")
        return rng.choice(closed).id
    return str(selector)
