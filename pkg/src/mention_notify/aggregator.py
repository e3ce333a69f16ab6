"""Aggregator actor: offers mentions, consumes responses, announces.

Owns the mention registry that backs the dashboard. Offers go out to the
repository inbox under the sending policy; each response transitions the
matching record, and accepting responses fan an announce out to every
subscriber before the record reaches Announced. Responses that arrive
before their offer is booked (the auto-reject race) are parked and
replayed once the send settles.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Optional

from .delivery import DeliveryReceipt, RetryPolicy, deliver
from .httpd import HttpService, Request, Response, error_response, json_response, service_base
from .identifiers import IdSource, PersistentIdentifier, random_urn
from .inbox import Inbox
from .model import (
    ActorKind,
    ActorRef,
    MessageKind,
    NotificationPayload,
    RESPONSE_KINDS,
    ServiceEndpoint,
    build_announce,
    build_offer,
)
from .registry import (
    Announced,
    Clock,
    IllegalTransition,
    ManagerCancelled,
    MentionRecord,
    MentionRegistry,
    MentionState,
    OfferSent,
    ResponseKind,
    ResponseReceived,
    SendPolicy,
    utc_now_iso,
)

log = logging.getLogger(__name__)

_RESPONSE_MAP = {
    MessageKind.ACCEPT: ResponseKind.VALIDATED,
    MessageKind.TENTATIVE_ACCEPT: ResponseKind.EDITED,
    MessageKind.REJECT: ResponseKind.REJECTED,
}


@dataclass
class OfferOutcome:
    record_key: str
    receipt: DeliveryReceipt
    offer_id: Optional[str]


class AggregatorActor:
    """Discovery service holding the registry and steering the conversation."""

    def __init__(
        self,
        service: HttpService,
        registry: MentionRegistry,
        repository: ServiceEndpoint,
        subscribers: list[ServiceEndpoint],
        manager: ActorRef,
        policy: SendPolicy = SendPolicy(),
        id_source: IdSource = random_urn,
        clock: Clock = utc_now_iso,
        retry: RetryPolicy = RetryPolicy(),
        name: str = "CORE",
        inbox_path: str = "/inbox/",
        inbox_journal=None,
        revoke_post=None,
    ):
        self.registry = registry
        self.repository = repository
        self.subscribers = list(subscribers)
        self.manager = manager
        self.policy = policy
        self.id_source = id_source
        self.clock = clock
        self.retry = retry
        if not inbox_path.endswith("/"):
            inbox_path += "/"
        self.endpoint = ServiceEndpoint(
            id=f"{service.base_url}/system", inbox=f"{service.base_url}{inbox_path}"
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
        service.router.add("POST", "/registrations", self.handle_pid_report)
        self._lock = threading.RLock()
        self._send_lock = threading.Lock()
        self._offers: dict[str, NotificationPayload] = {}
        self._orphans: dict[str, list[NotificationPayload]] = {}
        self._pending_pids: dict[str, PersistentIdentifier] = {}
        self._sweeping = False
        self._sweeper: Optional[threading.Thread] = None
        self._wake = threading.Event()
        self._stop = threading.Event()
        if revoke_post is None:
            import requests

            revoke_post = requests.post
        self._post = revoke_post

    # -- sending ----------------------------------------------------------

    def offer_mentions(self, policy: Optional[SendPolicy] = None) -> list[OfferOutcome]:
        """Offer every eligible Ready record to the repository."""
        policy = policy or self.policy
        outcomes = []
        for record in self.registry.select_for_sending(policy):
            try:
                outcomes.append(self.offer_record(record.key))
            except IllegalTransition:
                # a concurrent sweep already sent this record
                continue
        return outcomes

    def offer_record(self, record_key: str) -> OfferOutcome:
        with self._send_lock:
            record = self.registry.get(record_key)
            if record.state is not MentionState.READY:
                raise IllegalTransition(record.state, "offer-sent")
            offer = build_offer(
                record.descriptor, self.manager, self.endpoint, self.repository, self.id_source
            )
            receipt = deliver(offer, self.retry)
            if not receipt.delivered:
                log.warning("offer for %s not delivered; record stays Ready", record_key)
                return OfferOutcome(record_key, receipt, None)
            with self._lock:
                self._offers[offer.notification_id] = offer
            self.registry.transition(record_key, OfferSent(offer_id=offer.notification_id))
        self._drain_orphans(offer.notification_id)
        return OfferOutcome(record_key, receipt, offer.notification_id)

    def _drain_orphans(self, offer_id: str) -> None:
        with self._lock:
            parked = self._orphans.pop(offer_id, [])
        for payload in parked:
            self.on_response(payload)

    # -- receiving --------------------------------------------------------

    def _consume_notification(self, payload: NotificationPayload) -> None:
        if payload.kind in RESPONSE_KINDS:
            self.on_response(payload)
        else:
            log.warning("aggregator ignoring %s notification", payload.kind.value)

    def on_response(self, payload: NotificationPayload) -> None:
        record = self.registry.find_by_offer(payload.in_reply_to)
        if record is None:
            with self._lock:
                self._orphans.setdefault(payload.in_reply_to, []).append(payload)
            log.warning("response threads to unknown offer %s; parked", payload.in_reply_to)
            return
        response_kind = _RESPONSE_MAP[payload.kind]
        edited = payload.object if response_kind is ResponseKind.EDITED else None
        try:
            self.registry.transition(
                record.key, ResponseReceived(kind=response_kind, mention=edited)
            )
        except IllegalTransition as exc:
            log.warning("response for %s dropped: %s", record.key, exc)
            return
        if response_kind is ResponseKind.REJECTED:
            return
        self._announce(record.key, payload.in_reply_to, edited)

    def _announce(self, record_key: str, offer_id: str, edited) -> None:
        with self._lock:
            offer = self._offers.get(offer_id)
        if offer is None:
            log.error("no stored offer %s; cannot announce", offer_id)
            return
        all_delivered = True
        for subscriber in self.subscribers:
            announce = build_announce(
                offer, self.actor, self.endpoint, subscriber, self.id_source, mention=edited
            )
            receipt = deliver(announce, self.retry)
            if not receipt.delivered:
                all_delivered = False
                log.warning("announce to %s failed: %s", subscriber.inbox, receipt.outcome)
        if not all_delivered:
            log.warning("record %s stays Responded until announce succeeds", record_key)
            return
        self.registry.transition(record_key, Announced())
        with self._lock:
            pid = self._pending_pids.pop(offer_id, None)
        if pid is not None:
            self.registry.set_pid(record_key, pid)

    def handle_pid_report(self, request: Request) -> Response:
        try:
            body = request.json()
        except ValueError:
            return error_response(400, "body is not JSON")
        offer_id = body.get("offerId") if isinstance(body, dict) else None
        pid_text = body.get("pid") if isinstance(body, dict) else None
        if not isinstance(offer_id, str) or not isinstance(pid_text, str):
            return error_response(400, "expected offerId and pid")
        try:
            pid = PersistentIdentifier.parse(pid_text)
        except ValueError as exc:
            return error_response(400, str(exc))
        record = self.registry.find_by_offer(offer_id)
        if record is not None and record.state is MentionState.ANNOUNCED:
            if record.pid is None:
                self.registry.set_pid(record.key, pid)
            return json_response({"stored": True})
        with self._lock:
            self._pending_pids[offer_id] = pid
        return json_response({"stored": False, "parked": True})

    # -- manager actions ----------------------------------------------------

    def cancel(self, record_key: str, reason: str = "manager cancelled") -> MentionRecord:
        """Cancel a Ready or Sent record; revokes open tokens for sent offers."""
        record = self.registry.get(record_key)
        was_sent = record.state is MentionState.SENT
        self.registry.transition(record_key, ManagerCancelled(reason=reason))
        if was_sent and record.offer_id:
            url = f"{service_base(self.repository.inbox)}/revocations"
            try:
                self._post(url, json={"offerId": record.offer_id}, timeout=self.retry.timeout)
            except Exception as exc:
                log.warning("revocation call to %s failed: %s", url, exc)
        return self.registry.get(record_key)

    # -- background sweep -----------------------------------------------------

    def sweep_once(self) -> int:
        """One auto-send pass; returns how many offers were attempted."""
        self._sweeping = True
        try:
            if not self.policy.auto_send:
                return 0
            return len(self.offer_mentions(self.policy))
        finally:
            self._sweeping = False

    def start_sweeper(self, interval: float) -> None:
        if self._sweeper is not None:
            return

        def loop():
            while not self._stop.is_set():
                self._wake.wait(interval)
                self._wake.clear()
                if self._stop.is_set():
                    return
                try:
                    self.sweep_once()
                except Exception:
                    log.exception("auto-send sweep failed")

        self._sweeper = threading.Thread(target=loop, name="auto-send-sweep", daemon=True)
        self._sweeper.start()

    def poke_sweeper(self) -> None:
        self._wake.set()

    def stop_sweeper(self) -> None:
        self._stop.set()
        self._wake.set()
        if self._sweeper is not None:
            self._sweeper.join(timeout=5)
            self._sweeper = None

    def busy(self) -> bool:
        return self._sweeping

    def set_policy(self, policy: SendPolicy) -> None:
        self.policy = policy
        if policy.auto_send:
            self.poke_sweeper()
