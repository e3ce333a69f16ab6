"""Boot the full topology and drive a run to quiescence.

One aggregator, one repository, one archive, and the dashboard API, each
on its own port, talking only over HTTP. The run loop alternates sending
sweeps with author-script passes until two consecutive idle iterations:
nothing unanswered in the mail queue, nothing eligible to send, nothing
in flight.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .aggregator import AggregatorActor
from .archive import ArchiveActor
from .authors import ScriptedAuthors
from .config import RunConfig
from .dashboard import DashboardApi
from .httpd import HttpService
from .identifiers import SeededIds
from .mail import MailChannel
from .model import ActorKind, ActorRef, ServiceEndpoint
from .registry import (
    MentionRegistry,
    MentionState,
    ResponseKind,
    load_corpus,
)
from .repository import RepositoryActor, catalog_from_drafts

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunStats:
    records: int
    states: dict[str, int]
    responses: dict[str, int]
    announces: int
    pids: int

    def render(self) -> str:
        state_text = " ".join(f"{s.value}={self.states[s.value]}" for s in MentionState)
        response_text = " ".join(
            f"{k.value}={self.responses[k.value]}" for k in ResponseKind
        )
        return "\n".join(
            [
                f"records: {self.records}",
                f"states: {state_text}",
                f"responses: {response_text}",
                f"announces: {self.announces}",
                f"pids: {self.pids}",
            ]
        )


def stats_for(registry: MentionRegistry) -> RunStats:
    records = registry.records()
    states = {state.value: count for state, count in registry.tally_by_state().items()}
    responses = {kind.value: count for kind, count in registry.tally_by_response().items()}
    announces = sum(
        1 for r in records if any(e.event == "announced" for e in r.event_log)
    )
    pids = sum(1 for r in records if r.pid is not None)
    return RunStats(
        records=len(records),
        states=states,
        responses=responses,
        announces=announces,
        pids=pids,
    )


class Simulation:
    """All actors of one run, wired and ready to start."""

    def __init__(self, config: RunConfig, fresh: bool = True):
        self.config = config
        config.run_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = config.run_dir / "registry.log"
        journals = {
            name: config.run_dir / f"inbox-{name}.ndjson"
            for name in ("aggregator", "repository", "archive")
        }
        if fresh:
            for stale in [self.log_path, *journals.values()]:
                if stale.exists():
                    stale.unlink()

        drafts = load_corpus(config.corpus_path)
        self.drafts = drafts
        self.registry = MentionRegistry(log_path=self.log_path)
        self.mail = MailChannel(mailbox_dir=config.run_dir / "mailbox")

        self.archive_service = HttpService(config.host, config.ports["archive"], name="archive")
        self.archive = ArchiveActor(
            self.archive_service,
            inbox_path=config.inbox_path,
            inbox_journal=journals["archive"],
        )

        self.repo_service = HttpService(config.host, config.ports["repository"], name="repository")
        self.repository = RepositoryActor(
            service=self.repo_service,
            catalog=catalog_from_drafts(drafts),
            mail=self.mail,
            institution_domain=config.institution_domain,
            archive_register_url=f"{self.archive_service.base_url}/register",
            recipient_cap=config.policy.max_authors_per_institution,
            id_source=SeededIds(config.seed * 31 + 1),
            retry=config.retry,
            inbox_path=config.inbox_path,
            inbox_journal=journals["repository"],
        )

        self.agg_service = HttpService(config.host, config.ports["aggregator"], name="aggregator")
        self.aggregator = AggregatorActor(
            service=self.agg_service,
            registry=self.registry,
            repository=self.repository.endpoint,
            subscribers=[
                ServiceEndpoint(
                    id=f"{self.archive_service.base_url}/archive",
                    inbox=f"{self.archive_service.base_url}{config.inbox_path}",
                )
            ],
            manager=ActorRef(
                id=f"mailto:manager@{config.institution_domain}",
                name="Repository manager",
                actor_kind=ActorKind.PERSON,
            ),
            policy=config.policy,
            id_source=SeededIds(config.seed),
            retry=config.retry,
            inbox_path=config.inbox_path,
            inbox_journal=journals["aggregator"],
        )

        self.dash_service = HttpService(
            config.host, config.ports["dashboard"], name="dashboard", cors=True
        )
        self.dashboard = DashboardApi(
            service=self.dash_service,
            aggregator=self.aggregator,
            institution_domain=config.institution_domain,
        )

        self.authors = ScriptedAuthors(config.scripts, rng=random.Random(config.seed))
        self._started = False

    @property
    def services(self) -> list[HttpService]:
        return [self.archive_service, self.repo_service, self.agg_service, self.dash_service]

    def start(self) -> "Simulation":
        if not self._started:
            for service in self.services:
                service.start()
            self.aggregator.start_sweeper(self.config.sweep_interval)
            self._started = True
        return self

    def stop(self) -> None:
        if self._started:
            self.aggregator.stop_sweeper()
            for service in self.services:
                service.stop()
            self._started = False
        for inbox in (self.aggregator.inbox, self.repository.inbox, self.archive.inbox):
            inbox.close()
        self.registry.close()

    # -- the run loop -------------------------------------------------------

    def ingest(self) -> int:
        count = self.registry.ingest(self.drafts)
        self.aggregator.poke_sweeper()
        return count

    def _expire_stale_offers(self) -> None:
        if self.config.expiry is None:
            return
        now = datetime.now().astimezone()
        for record in self.registry.records():
            if record.state is not MentionState.SENT:
                continue
            sent_events = [e for e in record.event_log if e.event == "offer-sent"]
            if not sent_events:
                continue
            sent_at = datetime.fromisoformat(sent_events[-1].ts)
            if (now - sent_at).total_seconds() >= self.config.expiry:
                log.info("offer for %s expired; cancelling", record.key)
                self.aggregator.cancel(record.key, reason="offer expired")

    def _idle(self) -> bool:
        if self.mail.has_unhandled() or self.aggregator.busy():
            return False
        if self.config.policy.auto_send and self.aggregator.policy.auto_send:
            if self.registry.select_for_sending(self.aggregator.policy):
                return False
        return True

    def run_to_quiescence(self, max_iterations: int = 1000) -> RunStats:
        """Alternate sweeps and author passes until nothing moves twice in a row."""
        self.start()
        calm = 0
        for _ in range(max_iterations):
            moved = 0
            if self.aggregator.policy.auto_send:
                moved += self.aggregator.sweep_once()
            moved += self.authors.run(self.mail)
            self._expire_stale_offers()
            if moved == 0 and self._idle():
                calm += 1
                if calm >= 2:
                    break
            else:
                calm = 0
        return self.stats()

    def stats(self) -> RunStats:
        return stats_for(self.registry)
