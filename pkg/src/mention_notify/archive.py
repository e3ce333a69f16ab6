"""Archive actor: receives announces, registers assets, mints identifiers.

Registration is a pure function of the request content: the identifier is
the SHA-1 of the canonical citation rendering plus the repository link,
so resubmitting the same asset always yields the same identifier.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from .codec import ValidationReport, canonical_citation_bytes, citation_from_dict
from .httpd import HttpService, Request, Response, error_response, json_response
from .identifiers import PersistentIdentifier, mint_pid
from .inbox import Inbox
from .model import SoftwareCitation
from .registry import Clock, utc_now_iso


@dataclass(frozen=True)
class RegistrationRequest:
    citation: SoftwareCitation
    repository_link: Optional[str]
    requested_by: str  # service id of the requesting actor


@dataclass(frozen=True)
class RegistrationResult:
    pid: PersistentIdentifier
    archived_at: str


class ArchiveActor:
    """Permanent-archiving service with an announce inbox and a register endpoint."""

    def __init__(
        self,
        service: HttpService,
        clock: Clock = utc_now_iso,
        inbox_path: str = "/inbox/",
        inbox_journal=None,
    ):
        self.clock = clock
        self.inbox = Inbox(
            base_url=service.base_url,
            inbox_path=inbox_path,
            journal_path=inbox_journal,
            clock=clock,
        )
        self.inbox.mount(service)
        service.router.add("POST", "/register", self.handle_register)
        service.router.add("GET", "/registrations", self.handle_list_registrations)
        self._lock = threading.Lock()
        self.registrations: list[dict] = []

    def register(self, request: RegistrationRequest) -> RegistrationResult:
        pid = mint_pid(
            canonical_citation_bytes(request.citation), request.repository_link or ""
        )
        result = RegistrationResult(pid=pid, archived_at=self.clock())
        with self._lock:
            self.registrations.append(
                {
                    "pid": pid.render(),
                    "name": request.citation.name,
                    "repositoryLink": request.repository_link,
                    "requestedBy": request.requested_by,
                    "archivedAt": result.archived_at,
                }
            )
        return result

    # -- HTTP surface -----------------------------------------------------

    def handle_register(self, request: Request) -> Response:
        try:
            doc = request.json()
        except ValueError:
            return error_response(400, "body is not JSON")
        if not isinstance(doc, dict) or not isinstance(doc.get("citation"), dict):
            return error_response(400, "expected a citation object")
        report = ValidationReport()
        citation = citation_from_dict(doc["citation"], "citation", report)
        if citation is None:
            return Response(status=400, body=report.to_json())
        link = doc.get("repositoryLink")
        if link is not None and not isinstance(link, str):
            return error_response(400, "repositoryLink: expected a string")
        requested_by = doc.get("requestedBy")
        if not isinstance(requested_by, str) or not requested_by:
            return error_response(400, "requestedBy: expected a service id")
        result = self.register(
            RegistrationRequest(citation=citation, repository_link=link, requested_by=requested_by)
        )
        return json_response(
            {"pid": result.pid.render(), "archivedAt": result.archived_at}, status=200
        )

    def handle_list_registrations(self, request: Request) -> Response:
        with self._lock:
            return json_response({"registrations": list(self.registrations)})

    def announce_entries(self):
        return self.inbox.entries()
