"""Wires the store, mail gateway, monitor, workflow, scheduler and reporter
into one Repository object, which is what the HTTP layer and the CLI hold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Optional

from .config import RepositoryConfig
from .embargo import EmbargoScheduler
from .fairness import FairnessMonitor
from .mail import MailGateway, MailRenderer, OutboxTransport, load_templates
from .stats import StatsReporter
from .store import RepositoryStore
from .timeutil import utc_now
from .workflow import RequestWorkflow, secure_token


class SystemClock:
    def now(self) -> datetime:
        return utc_now()


class ManualClock:
    """Test/simulation clock; time moves only when told to."""

    def __init__(self, start: datetime):
        self._now = start

    def now(self) -> datetime:
        return self._now

    def set(self, value: datetime):
        self._now = value

    def advance(self, delta: timedelta):
        self._now = self._now + delta


class SeededRandomSource:
    """Deterministic token/message-id stream for reproducible simulations.

    Not cryptographically secure — never wire this into a deployment; the
    production default is the OS CSPRNG.
    """

    def __init__(self, seed: int, prefix: str = ""):
        self._rng = random.Random(seed)
        self._prefix = prefix

    def __call__(self) -> str:
        return self._prefix + "".join(
            self._rng.choice("0123456789abcdef") for _ in range(32))


@dataclass
class Repository:
    config: RepositoryConfig
    clock: object
    store: RepositoryStore
    transport: OutboxTransport
    gateway: MailGateway
    renderer: MailRenderer
    monitor: Optional[FairnessMonitor]
    workflow: RequestWorkflow
    scheduler: EmbargoScheduler
    stats: StatsReporter

    def now(self) -> datetime:
        return self.clock.now()

    def close(self):
        self.scheduler.stop()
        self.store.close()


def open_repository(config: RepositoryConfig, clock=None,
                    token_source: Callable[[], str] = secure_token,
                    message_id_source: Optional[Callable[[], str]] = None) -> Repository:
    clock = clock or SystemClock()
    store = RepositoryStore(config.store_path, snapshot_every=config.snapshot_every)
    outbox_path = config.store_path / "outbox.jsonl" if config.store_path else None
    transport = OutboxTransport(outbox_path)
    gateway = MailGateway(transport, clock=clock)
    renderer_kwargs = {}
    if message_id_source is not None:
        renderer_kwargs["message_id_source"] = message_id_source
    renderer = MailRenderer(
        repo_name=config.name,
        base_url=config.base_url,
        admin_address=config.admin_address,
        templates=load_templates(config.templates_dir),
        **renderer_kwargs,
    )
    monitor = None
    if config.monitor_enabled:
        monitor = FairnessMonitor(config.jurisdiction, store.get_eprint)
    workflow = RequestWorkflow(
        store=store,
        renderer=renderer,
        gateway=gateway,
        manager_address=config.effective_manager_address,
        monitor=monitor,
        token_source=token_source,
    )
    scheduler = EmbargoScheduler(
        store, timezone=config.timezone,
        interval=config.scheduler_interval, clock=clock,
    )
    return Repository(
        config=config,
        clock=clock,
        store=store,
        transport=transport,
        gateway=gateway,
        renderer=renderer,
        monitor=monitor,
        workflow=workflow,
        scheduler=scheduler,
        stats=StatsReporter(store),
    )
