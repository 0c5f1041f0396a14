"""Deployment configuration: repository identity, policy knobs, jurisdiction.

Loaded from one YAML (or JSON) file. Only the admin secret is sensitive;
everything else is operational tuning with documented defaults.

Example::

    repository:
      name: Archipel
      base_url: http://www.archipel.uqam.ca
      admin_address: archipel-admin@uqam.ca
      admin_secret: change-me
      store_path: /var/lib/almostoa
      timezone: America/Montreal
      ignore_window_days: 30
    jurisdiction:
      name: CA        # AU | CA | UK | US | custom
      high_volume_threshold: 10
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Optional

import yaml

from .errors import ValidationError
from .fairness import BUILTIN_PROFILES, JurisdictionProfile


@dataclass(frozen=True)
class RepositoryConfig:
    name: str = "Repository"
    base_url: str = "http://localhost:8420"
    admin_address: str = "repository-admin@example.org"
    admin_secret: str = "change-me"
    manager_address: Optional[str] = None   # fallback for departed depositors
    store_path: Optional[Path] = None       # None = in-memory (tests, demos)
    timezone: str = "UTC"
    ignore_window: timedelta = timedelta(days=30)
    scheduler_interval: timedelta = timedelta(hours=1)
    snapshot_every: int = 1000
    monitor_enabled: bool = True
    templates_dir: Optional[Path] = None
    ui_assets_dir: Optional[Path] = None
    jurisdiction: JurisdictionProfile = field(default_factory=lambda: BUILTIN_PROFILES["CA"])

    @property
    def effective_manager_address(self) -> str:
        return self.manager_address or self.admin_address


def load_config(path) -> RepositoryConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RepositoryConfig:
    repo = raw.get("repository", {})
    defaults = RepositoryConfig()
    kwargs = {
        "name": repo.get("name", defaults.name),
        "base_url": repo.get("base_url", defaults.base_url),
        "admin_address": repo.get("admin_address", defaults.admin_address),
        "admin_secret": repo.get("admin_secret", defaults.admin_secret),
        "manager_address": repo.get("manager_address"),
        "store_path": Path(repo["store_path"]) if repo.get("store_path") else None,
        "timezone": repo.get("timezone", defaults.timezone),
        "ignore_window": timedelta(days=repo.get("ignore_window_days", 30)),
        "scheduler_interval": timedelta(seconds=repo.get("scheduler_interval_seconds", 3600)),
        "snapshot_every": repo.get("snapshot_every", defaults.snapshot_every),
        "monitor_enabled": repo.get("monitor_enabled", True),
        "templates_dir": Path(repo["templates_dir"]) if repo.get("templates_dir") else None,
        "ui_assets_dir": Path(repo["ui_assets_dir"]) if repo.get("ui_assets_dir") else None,
        "jurisdiction": _jurisdiction_from(raw.get("jurisdiction", {})),
    }
    return RepositoryConfig(**kwargs)


def _jurisdiction_from(raw: dict) -> JurisdictionProfile:
    name = raw.get("name", "CA")
    if name in BUILTIN_PROFILES:
        base = BUILTIN_PROFILES[name]
    elif name == "custom":
        if not raw.get("attestation_text"):
            raise ValidationError("a custom jurisdiction profile needs attestation_text")
        base = JurisdictionProfile(name="custom", attestation_text=raw["attestation_text"])
    else:
        raise ValidationError(f"unknown jurisdiction profile {name!r}")

    overrides = {}
    if "attestation_text" in raw:
        overrides["attestation_text"] = raw["attestation_text"]
    if "deemed_fair_same_issue_limit" in raw:
        overrides["deemed_fair_same_issue_limit"] = raw["deemed_fair_same_issue_limit"]
    if "deemed_fair_same_book_limit" in raw:
        overrides["deemed_fair_same_book_limit"] = raw["deemed_fair_same_book_limit"]
    if "high_volume_threshold" in raw:
        overrides["high_volume_threshold"] = raw["high_volume_threshold"]
    if "high_volume_window_days" in raw:
        overrides["high_volume_window"] = timedelta(days=raw["high_volume_window_days"])
    if "same_source_window_days" in raw:
        overrides["same_source_window"] = timedelta(days=raw["same_source_window_days"])
    if not overrides:
        return base
    from dataclasses import replace

    return replace(base, **overrides)
