"""Operator command line.

    almostoa --store-path /var/lib/almostoa ingest deposits.jsonl
    almostoa --config repo.yaml serve --port 8420
    almostoa --config repo.yaml --now 2010-02-01T00:00:00Z tick
    almostoa --config repo.yaml stats --from 2009-01-01 --to 2009-12-31

``--now`` pins the service clock for the invocation — that is how tests
and reproductions examine "30 days later" without waiting.
"""

from __future__ import annotations

import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from .config import RepositoryConfig, load_config
from .http import create_app
from .ingest import ingest_file
from .service import ManualClock, Repository, SeededRandomSource, open_repository
from .simulate import load_scenario, run_scenario
from .stats import render_access_table, render_response_table
from .timeutil import parse_timestamp


def _build_repo(ctx) -> Repository:
    params = ctx.obj
    config = load_config(params["config"]) if params["config"] else RepositoryConfig()
    if params["store_path"]:
        config = replace(config, store_path=Path(params["store_path"]))
    if config.store_path is None:
        raise click.UsageError("a store path is required (--store-path or config)")
    clock = ManualClock(parse_timestamp(params["now"])) if params["now"] else None
    repo = open_repository(config, clock=clock)
    ctx.call_on_close(repo.close)
    return repo


@click.group()
@click.option("--store-path", type=click.Path(), default=None,
              help="Store directory (overrides the config file).")
@click.option("--config", "config", type=click.Path(exists=True), default=None,
              help="Repository config file (YAML or JSON).")
@click.option("--now", default=None, metavar="TIMESTAMP",
              help="Pin the service clock to this ISO-8601 instant.")
@click.pass_context
def main(ctx, store_path, config, now):
    """Request-a-copy workflow service administration."""
    ctx.obj = {"store_path": store_path, "config": config, "now": now}


@main.command()
@click.argument("deposits_file", type=click.Path(exists=True))
@click.pass_context
def ingest(ctx, deposits_file):
    """Deposit every record in DEPOSITS_FILE (one JSON object per line)."""
    repo = _build_repo(ctx)
    report = ingest_file(repo, deposits_file)
    click.echo(f"deposited {report.deposited} record(s)")
    for line_number, message in report.errors:
        click.echo(f"line {line_number}: {message}", err=True)
    if not report.ok:
        sys.exit(1)


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True))
@click.pass_context
def simulate(ctx, scenario_file):
    """Drive synthetic request traffic from SCENARIO_FILE on a virtual clock."""
    params = ctx.obj
    config = load_config(params["config"]) if params["config"] else RepositoryConfig()
    if params["store_path"]:
        config = replace(config, store_path=Path(params["store_path"]))
    if config.store_path is None:
        raise click.UsageError("a store path is required (--store-path or config)")
    scenario = load_scenario(scenario_file)
    start = parse_timestamp(params["now"]) if params["now"] else scenario.start
    repo = open_repository(
        config,
        clock=ManualClock(start),
        token_source=SeededRandomSource(scenario.seed, prefix="tok"),
        message_id_source=SeededRandomSource(scenario.seed + 1, prefix="msg"),
    )
    ctx.call_on_close(repo.close)
    summary = run_scenario(repo, scenario)
    click.echo(f"created {summary.created} request(s): "
               f"{summary.accepted} accepted, {summary.rejected} rejected, "
               f"{summary.undecided} undecided")
    click.echo(f"virtual clock ended at {summary.end_time.isoformat()}")


@main.command()
@click.option("--from", "from_", required=True, metavar="DATE",
              help="Period start (ISO date or timestamp).")
@click.option("--to", required=True, metavar="DATE",
              help="Period end, inclusive.")
@click.option("--window-days", type=int, default=None,
              help="Unanswered cutoff; defaults to the configured window.")
@click.pass_context
def stats(ctx, from_, to, window_days):
    """Author-response table for requests created in the period."""
    from datetime import timedelta

    repo = _build_repo(ctx)
    start = _parse_period_bound(from_, end=False)
    end = _parse_period_bound(to, end=True)
    window = (timedelta(days=window_days) if window_days is not None
              else repo.config.ignore_window)
    result = repo.stats.response_stats(start, end, window, now=repo.now())
    click.echo(render_response_table(result, repo.config.name), nl=False)


@main.command("access-stats")
@click.pass_context
def access_stats(ctx):
    """Open/closed split of the whole store."""
    repo = _build_repo(ctx)
    click.echo(render_access_table(repo.stats.access_stats(), repo.config.name), nl=False)


@main.command()
@click.pass_context
def tick(ctx):
    """Run the embargo scheduler once; lists the ids flipped open."""
    repo = _build_repo(ctx)
    flipped = repo.scheduler.run_due_embargoes(repo.now())
    if flipped:
        for eprint_id in flipped:
            click.echo(eprint_id)
    else:
        click.echo("no due embargoes")


@main.command()
@click.argument("request_id")
@click.pass_context
def resend(ctx, request_id):
    """Re-send the author notification for REQUEST_ID (same decision links)."""
    repo = _build_repo(ctx)
    receipt = repo.workflow.resend_notification(request_id, repo.now())
    click.echo(f"re-enqueued notification {receipt.message_id}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int,
              help="Defaults to $PORT or 8420.")
@click.pass_context
def serve(ctx, host, port):
    """Start the HTTP service (and the periodic embargo scheduler)."""
    import uvicorn

    repo = _build_repo(ctx)
    app = create_app(repo)
    repo.scheduler.start()
    uvicorn.run(app, host=host, port=port or int(os.environ.get("PORT", "8420")))


def _parse_period_bound(value: str, end: bool):
    from datetime import datetime, time, timezone

    text = value.strip()
    if len(text) == 10:  # bare date
        from .timeutil import parse_date

        day = parse_date(text)
        moment = time(23, 59, 59, 999999) if end else time(0, 0)
        return datetime.combine(day, moment, tzinfo=timezone.utc)
    return parse_timestamp(text)


if __name__ == "__main__":
    main()
