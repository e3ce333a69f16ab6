"""Linked-data notification inbox: receive, list, and fetch entries.

POSTed documents are validated with the payload codec, stored under a
server-assigned entry IRI, journalled to disk before the consumer
callback runs, and deduplicated by notification id so retried deliveries
are received exactly once.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .codec import MEDIA_TYPE, ValidationReport, parse_payload
from .httpd import HttpService, Request, Response, error_response, json_response
from .model import NotificationPayload
from .registry import Clock, utc_now_iso

log = logging.getLogger(__name__)

LDP_INBOX_REL = "http://www.w3.org/ns/ldp#inbox"

Consumer = Callable[[NotificationPayload], None]


@dataclass(frozen=True)
class InboxEntry:
    entry_iri: str
    received_at: str
    payload: NotificationPayload
    raw_bytes: bytes


class Inbox:
    """Notification store with exactly-once consumption semantics."""

    def __init__(
        self,
        base_url: str,
        inbox_path: str = "/inbox/",
        consumer: Optional[Consumer] = None,
        journal_path: Optional[Path] = None,
        clock: Clock = utc_now_iso,
    ):
        if not inbox_path.endswith("/"):
            inbox_path += "/"
        self.base_url = base_url.rstrip("/")
        self.inbox_path = inbox_path
        self.consumer = consumer
        self.clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, InboxEntry] = {}
        self._order: list[str] = []
        self._by_notification: dict[str, str] = {}
        self._next = 1
        self._journal_path = Path(journal_path) if journal_path else None
        self._journal = None
        if self._journal_path:
            self._journal_path.parent.mkdir(parents=True, exist_ok=True)
            self._replay_journal()
            self._journal = open(self._journal_path, "a", encoding="utf-8")

    @property
    def inbox_iri(self) -> str:
        return self.base_url + self.inbox_path

    def _replay_journal(self) -> None:
        if not self._journal_path.exists():
            return
        for line in self._journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            raw = doc["raw"].encode("utf-8")
            payload = parse_payload(raw)
            if not isinstance(payload, NotificationPayload):
                continue
            self._store(payload, raw, received_at=doc["received_at"], journal=False)

    def _store(
        self, payload: NotificationPayload, raw: bytes, received_at: str, journal: bool
    ) -> tuple[InboxEntry, bool]:
        """Insert unless the notification id was already seen; atomic."""
        with self._lock:
            existing = self._by_notification.get(payload.notification_id)
            if existing is not None:
                return self._entries[existing], False
            entry_iri = f"{self.inbox_iri}{self._next}"
            self._next += 1
            entry = InboxEntry(
                entry_iri=entry_iri,
                received_at=received_at,
                payload=payload,
                raw_bytes=raw,
            )
            if journal and self._journal is not None:
                self._journal.write(
                    json.dumps(
                        {"received_at": received_at, "raw": raw.decode("utf-8")},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                self._journal.flush()
            self._entries[entry_iri] = entry
            self._order.append(entry_iri)
            self._by_notification[payload.notification_id] = entry_iri
            return entry, True

    def receive(self, raw: bytes) -> tuple[object, Optional[InboxEntry], bool]:
        """Validate, store, and consume; returns (parse result, entry, fresh)."""
        parsed = parse_payload(raw)
        if not isinstance(parsed, NotificationPayload):
            return parsed, None, False
        entry, fresh = self._store(parsed, raw, received_at=self.clock(), journal=True)
        if fresh and self.consumer is not None:
            try:
                self.consumer(entry.payload)
            except Exception:
                # The entry is journalled already; a consumer fault must not
                # turn an accepted notification into a delivery failure.
                log.exception("consumer failed for %s", entry.payload.notification_id)
        return parsed, entry, fresh

    def entries(self) -> list[InboxEntry]:
        with self._lock:
            return [self._entries[iri] for iri in self._order]

    def get(self, entry_iri: str) -> Optional[InboxEntry]:
        with self._lock:
            return self._entries.get(entry_iri)

    def close(self) -> None:
        with self._lock:
            if self._journal is not None:
                self._journal.close()
                self._journal = None

    # -- HTTP surface -----------------------------------------------------

    def mount(self, service: HttpService) -> None:
        inbox_route = self.inbox_path.strip("/")
        service.router.add("POST", f"/{inbox_route}/", self.handle_post)
        service.router.add("POST", f"/{inbox_route}", self.handle_post)
        service.router.add("GET", f"/{inbox_route}/", self.handle_list)
        service.router.add("GET", f"/{inbox_route}", self.handle_list)
        service.router.add("GET", f"/{inbox_route}/{{entry}}", self.handle_get_entry)
        service.router.add("GET", "/", self.handle_root)

    def handle_post(self, request: Request) -> Response:
        if request.content_type not in (MEDIA_TYPE, "application/json"):
            return error_response(415, f"expected {MEDIA_TYPE}")
        parsed, entry, _fresh = self.receive(request.body)
        if entry is None:
            assert isinstance(parsed, ValidationReport)
            return Response(status=400, body=parsed.to_json())
        return json_response(
            {"id": entry.entry_iri}, status=201, Location=entry.entry_iri
        )

    def handle_list(self, request: Request) -> Response:
        doc = {
            "@context": "http://www.w3.org/ns/ldp",
            "@id": self.inbox_iri,
            "contains": [entry.entry_iri for entry in self.entries()],
        }
        return Response(
            status=200,
            body=json.dumps(doc, indent=2).encode("utf-8"),
            content_type=MEDIA_TYPE,
        )

    def handle_get_entry(self, request: Request) -> Response:
        entry_iri = f"{self.inbox_iri}{request.params['entry']}"
        entry = self.get(entry_iri)
        if entry is None:
            return error_response(404, "no such entry")
        return Response(status=200, body=entry.raw_bytes, content_type=MEDIA_TYPE)

    def handle_root(self, request: Request) -> Response:
        # Minimal inbox discovery: advertise the inbox IRI as a link relation.
        return json_response(
            {"inbox": self.inbox_iri},
            Link=f'<{self.inbox_iri}>; rel="{LDP_INBOX_REL}"',
        )
