"""Automatic embargo expiry: closed deposits flip open, nobody lifts a finger.

The expiry entered at deposit time is a calendar date, compared in the
single configured repository time zone. A tick flips every closed record
whose expiry is on or before today via compare-and-set, so ticks are
idempotent and safe to run concurrently with request traffic, with an
admin, or with another tick — losing the race just means someone else
already opened the record. The scheduler can only open records; it has no
path that closes one.
"""

from __future__ import annotations

import threading
from datetime import datetime, timedelta
from typing import Optional
from zoneinfo import ZoneInfo

from .errors import InvalidTransition, NotFound
from .store import SCHEDULER_ACTOR, RepositoryStore
from .timeutil import utc_now


class EmbargoScheduler:
    def __init__(self, store: RepositoryStore, timezone: str = "UTC",
                 interval: timedelta = timedelta(hours=1), clock=None):
        self.store = store
        self.tz = ZoneInfo(timezone)
        self.interval = interval
        self._clock = clock
        self._timer: Optional[threading.Timer] = None
        self._stopped = threading.Event()

    def run_due_embargoes(self, now: Optional[datetime] = None) -> list[str]:
        """Flip every record whose expiry date has been reached.

        Returns the ids this call actually flipped, sorted. A second call
        at the same instant finds no due entries and returns empty.
        """
        if now is None:
            now = self._clock.now() if self._clock is not None else utc_now()
        today = now.astimezone(self.tz).date()
        flipped = []
        for eprint_id in self.store.due_embargoes(today):
            try:
                if self.store.compare_and_open(eprint_id, SCHEDULER_ACTOR, now):
                    flipped.append(eprint_id)
            except (NotFound, InvalidTransition):
                # Raced with a concurrent flip or an admin change: already
                # resolved, which is what this tick wanted.
                continue
        return flipped

    # -- periodic operation -------------------------------------------

    def start(self):
        self._stopped.clear()
        self._schedule_next()

    def stop(self):
        self._stopped.set()
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None

    def _schedule_next(self):
        if self._stopped.is_set():
            return
        self._timer = threading.Timer(self.interval.total_seconds(), self._tick)
        self._timer.daemon = True
        self._timer.start()

    def _tick(self):
        try:
            self.run_due_embargoes()
        finally:
            self._schedule_next()
