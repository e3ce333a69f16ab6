"""Repository actor: routes offers to authors and answers on their behalf.

An incoming offer is resolved against the repository's own paper catalog,
rendered into an author message with four single-use action tokens, and
queued on the simulated mail channel. Author actions come back through
``POST /actions/{token}``; validate and edit additionally trigger asset
registration with the archive, and the minted identifier is reported to
the offering service. Offers for a paper whose message is still open are
merged into that message rather than generating a second mail.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from .codec import ValidationReport, citation_to_dict, mention_from_dict
from .delivery import RetryPolicy, deliver
from .httpd import HttpService, Request, Response, error_response, json_response, service_base
from .identifiers import IdSource, PersistentIdentifier, random_urn
from .inbox import Inbox
from .mail import ACTIONS, AuthorMessage, MailChannel, subject_for
from .model import (
    ActorKind,
    ActorRef,
    MentionDescriptor,
    MessageKind,
    NotificationPayload,
    ServiceEndpoint,
    build_response,
)
from .registry import Author, Clock, pick_recipients, utc_now_iso

log = logging.getLogger(__name__)


class ActionError(Exception):
    pass


class UnknownToken(ActionError):
    pass


class TokenAlreadyUsed(ActionError):
    pass


class NoEligibleRecipient(Exception):
    pass


class ArchiveUnavailable(Exception):
    pass


@dataclass(frozen=True)
class PaperInfo:
    oai_id: str
    title: str
    authors: list[Author]


def catalog_from_drafts(drafts) -> dict[str, PaperInfo]:
    """Index paper metadata by record IRI, as the repository's own catalog."""
    catalog = {}
    for draft in drafts:
        catalog[draft.descriptor.record_id] = PaperInfo(
            oai_id=draft.oai_id, title=draft.paper_title, authors=list(draft.authors)
        )
    return catalog


@dataclass
class _MessageState:
    message: AuthorMessage
    offer_ids: list[str]
    status: str = "open"  # open | answered | revoked
    revoked_offers: set[str] = field(default_factory=set)

    def live_offers(self) -> list[str]:
        return [oid for oid in self.offer_ids if oid not in self.revoked_offers]


class RepositoryActor:
    """Institutional repository service with inbox, mail routing, and actions."""

    def __init__(
        self,
        service: HttpService,
        catalog: dict[str, PaperInfo],
        mail: MailChannel,
        institution_domain: str,
        archive_register_url: str,
        recipient_cap: int = 1,
        id_source: IdSource = random_urn,
        clock: Clock = utc_now_iso,
        retry: RetryPolicy = RetryPolicy(),
        name: str = "Repository",
        inbox_path: str = "/inbox/",
        inbox_journal=None,
        post: Callable = requests.post,
    ):
        self.catalog = catalog
        self.mail = mail
        self.institution_domain = institution_domain
        self.archive_register_url = archive_register_url
        self.recipient_cap = recipient_cap
        self.id_source = id_source
        self.clock = clock
        self.retry = retry
        self.post = post
        self.base_url = service.base_url
        if not inbox_path.endswith("/"):
            inbox_path += "/"
        self.endpoint = ServiceEndpoint(
            id=f"{service.base_url}/repository", inbox=f"{service.base_url}{inbox_path}"
        )
        self.actor = ActorRef(id=self.endpoint.id, name=name, actor_kind=ActorKind.SERVICE)
        self.inbox = Inbox(
            base_url=service.base_url,
            inbox_path=inbox_path,
            consumer=self._consume_notification,
            journal_path=inbox_journal,
            clock=clock,
        )
        self.inbox.mount(service)
        service.router.add("POST", "/actions/{token}", self.handle_action)
        service.router.add("POST", "/revocations", self.handle_revocation)
        self._lock = threading.RLock()
        self._offers: dict[str, NotificationPayload] = {}
        self._messages: dict[str, _MessageState] = {}
        self._tokens: dict[str, str] = {}  # token -> message_id
        self._open_message: dict[tuple[str, str], str] = {}  # (record IRI, email) -> message_id

    # -- offer intake ------------------------------------------------------

    def _consume_notification(self, payload: NotificationPayload) -> None:
        if payload.kind is MessageKind.OFFER:
            self.on_offer(payload)
        else:
            log.warning("repository ignoring %s notification", payload.kind.value)

    def on_offer(self, offer: NotificationPayload) -> list[AuthorMessage]:
        """Route one offer to its authors; auto-reject when nobody is eligible."""
        paper = self.catalog.get(offer.object.record_id)
        recipients = (
            pick_recipients(paper.authors, self.recipient_cap, self.institution_domain)
            if paper
            else []
        )
        if not recipients:
            log.warning(
                "no eligible recipient for %s at %s; auto-rejecting",
                offer.object.record_id,
                self.institution_domain,
            )
            reject = build_response(offer, MessageKind.REJECT, self.actor, self.id_source)
            deliver(reject, self.retry)
            return []
        with self._lock:
            self._offers[offer.notification_id] = offer
            messages = []
            for recipient in recipients:
                messages.append(self._mail_offer(offer, paper, recipient))
            return messages

    def _mail_offer(
        self, offer: NotificationPayload, paper: PaperInfo, recipient: Author
    ) -> AuthorMessage:
        key = (offer.object.record_id, recipient.email)
        open_id = self._open_message.get(key)
        if open_id is not None and self._messages[open_id].status == "open":
            state = self._messages[open_id]
            state.message.mentions.append(offer.object)
            state.offer_ids.append(offer.notification_id)
            self.mail.refresh(state.message)
            return state.message
        tokens = {action: self.id_source().rpartition(":")[2] for action in ACTIONS}
        message = AuthorMessage(
            message_id=self.id_source(),
            recipient=recipient,
            subject=subject_for(paper.title),
            paper_title=paper.title,
            oai_id=paper.oai_id,
            record_iri=offer.object.record_id,
            mentions=[offer.object],
            action_tokens=tokens,
            action_base_url=self.base_url,
        )
        state = _MessageState(message=message, offer_ids=[offer.notification_id])
        self._messages[message.message_id] = state
        for token in tokens.values():
            self._tokens[token] = message.message_id
        self._open_message[key] = message.message_id
        self.mail.send(message)
        return message

    # -- author actions ----------------------------------------------------

    def on_author_action(
        self,
        token: str,
        action: str,
        edited: Optional[list[MentionDescriptor]] = None,
    ) -> list[NotificationPayload]:
        """Answer the offers covered by the token's message.

        Returns the responses sent (empty for ignore). The token set of a
        message is consumed by any action except ignore.
        """
        with self._lock:
            message_id = self._tokens.get(token)
            if message_id is None:
                raise UnknownToken(token)
            state = self._messages[message_id]
            if state.status != "open":
                raise TokenAlreadyUsed(token)
            if action == "ignore":
                return []
            live = state.live_offers()
            if not live:
                raise TokenAlreadyUsed(token)
            if action == "edit":
                if edited is None or len(edited) != len(state.offer_ids):
                    raise ActionError("edit requires one edited mention per offer")
                edits = dict(zip(state.offer_ids, edited))
            state.status = "answered"
            recipient = state.message.recipient
        author = ActorRef(
            id=f"mailto:{recipient.email}", name=recipient.name, actor_kind=ActorKind.PERSON
        )
        responses = []
        for offer_id in live:
            offer = self._offers[offer_id]
            if action == "validate":
                response = build_response(offer, MessageKind.ACCEPT, author, self.id_source)
            elif action == "reject":
                response = build_response(offer, MessageKind.REJECT, author, self.id_source)
            elif action == "edit":
                response = build_response(
                    offer,
                    MessageKind.TENTATIVE_ACCEPT,
                    author,
                    self.id_source,
                    edited=edits[offer_id],
                )
            else:
                raise ActionError(f"unknown action {action!r}")
            receipt = deliver(response, self.retry)
            if not receipt.delivered:
                log.warning("response for %s undeliverable: %s", offer_id, receipt)
                continue
            responses.append(response)
            if action in ("validate", "edit"):
                self._register_and_report(offer, response.object)
        return responses

    def _register_and_report(
        self, offer: NotificationPayload, mention: MentionDescriptor
    ) -> None:
        try:
            pid = self.register_asset(mention)
        except ArchiveUnavailable as exc:
            log.warning("registration failed for %s: %s", offer.notification_id, exc)
            return
        report_url = f"{service_base(offer.origin.inbox)}/registrations"
        try:
            self.post(
                report_url,
                json={"offerId": offer.notification_id, "pid": pid.render()},
                timeout=self.retry.timeout,
            )
        except requests.RequestException as exc:
            log.warning("identifier report to %s failed: %s", report_url, exc)

    def register_asset(self, mention: MentionDescriptor) -> PersistentIdentifier:
        """Ask the archive to permanently archive the asset; returns its identifier."""
        body = {
            "citation": citation_to_dict(mention.citation),
            "repositoryLink": mention.citation.repository_link,
            "requestedBy": self.endpoint.id,
        }
        last_error = "gave up"
        for attempt in range(1, self.retry.max_attempts + 1):
            try:
                response = self.post(
                    self.archive_register_url, json=body, timeout=self.retry.timeout
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                response = None
            if response is not None:
                if response.status_code == 200:
                    return PersistentIdentifier.parse(response.json()["pid"])
                last_error = f"archive answered {response.status_code}"
                if 400 <= response.status_code < 500:
                    break
            if attempt < self.retry.max_attempts:
                time.sleep(self.retry.delay(attempt))
        raise ArchiveUnavailable(last_error)

    # -- HTTP surface --------------------------------------------------------

    def handle_action(self, request: Request) -> Response:
        try:
            body = request.json()
        except ValueError:
            return error_response(400, "body is not JSON")
        if not isinstance(body, dict):
            return error_response(400, "expected a JSON object")
        action = body.get("action")
        if action not in ("validate", "edit", "reject", "ignore"):
            return error_response(400, "action must be validate, edit, reject, or ignore")
        edited = None
        if action == "edit":
            raw = body.get("edited")
            if isinstance(raw, dict):
                raw = [raw]
            if not isinstance(raw, list):
                return error_response(400, "edit requires an edited mention")
            report = ValidationReport()
            edited = [
                mention_from_dict(entry, f"edited[{i}]", report)
                for i, entry in enumerate(raw)
                if isinstance(entry, dict)
            ]
            if len(edited) != len(raw) or any(m is None for m in edited):
                return Response(status=400, body=report.to_json())
        try:
            responses = self.on_author_action(request.params["token"], action, edited)
        except UnknownToken:
            return error_response(404, "unknown token")
        except TokenAlreadyUsed:
            return error_response(409, "token already used")
        except ActionError as exc:
            return error_response(400, str(exc))
        return json_response(
            {"action": action, "responses": [r.notification_id for r in responses]}
        )

    def handle_revocation(self, request: Request) -> Response:
        try:
            body = request.json()
        except ValueError:
            return error_response(400, "body is not JSON")
        offer_id = body.get("offerId") if isinstance(body, dict) else None
        if not isinstance(offer_id, str):
            return error_response(400, "offerId: expected a string")
        with self._lock:
            touched = 0
            for state in self._messages.values():
                if offer_id in state.offer_ids and offer_id not in state.revoked_offers:
                    state.revoked_offers.add(offer_id)
                    touched += 1
                    if not state.live_offers() and state.status == "open":
                        state.status = "revoked"
        return json_response({"revoked": touched})
