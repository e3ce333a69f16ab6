"""REST surface over the registry and aggregator for the review console.

Four queues mirror the console tabs; Announced records appear in the
responded queue since they have been reviewed. All mutations funnel
through the aggregator so every successful call corresponds to exactly
one registry transition.
"""

from __future__ import annotations

import csv
import io
from typing import Optional

from .aggregator import AggregatorActor
from .codec import mention_to_dict
from .httpd import HttpService, Request, Response, error_response, json_response
from .registry import (
    IllegalTransition,
    MentionRecord,
    MentionState,
    SendPolicy,
    UnknownRecord,
    recipients_for,
)

QUEUES = {
    "ready": (MentionState.READY,),
    "sent": (MentionState.SENT,),
    "responded": (MentionState.RESPONDED, MentionState.ANNOUNCED),
    "cancelled": (MentionState.CANCELLED,),
}

CSV_HEADER = ["oai_id", "title", "software_name", "confidence", "mention_type", "state", "pid"]


def status_label(record: MentionRecord) -> str:
    if record.state is MentionState.READY:
        return "Ready to be sent"
    if record.state is MentionState.RESPONDED:
        return f"Responded ({record.response_kind.value})"
    return record.state.value


def policy_to_dict(policy: SendPolicy) -> dict:
    return {
        "autoSend": policy.auto_send,
        "highConfidenceOnly": policy.high_confidence_only,
        "threshold": policy.threshold,
        "maxAuthorsPerInstitution": policy.max_authors_per_institution,
    }


def policy_from_dict(doc: dict) -> SendPolicy:
    return SendPolicy(
        auto_send=doc.get("autoSend", False),
        high_confidence_only=doc.get("highConfidenceOnly", False),
        threshold=doc.get("threshold", 0),
        max_authors_per_institution=doc.get("maxAuthorsPerInstitution", 1),
    )


class DashboardApi:
    def __init__(
        self,
        service: HttpService,
        aggregator: AggregatorActor,
        institution_domain: str,
    ):
        self.aggregator = aggregator
        self.registry = aggregator.registry
        self.institution_domain = institution_domain
        service.router.add("GET", "/api/mentions", self.handle_list)
        service.router.add("GET", "/api/mentions/{key}", self.handle_detail)
        service.router.add("POST", "/api/mentions/{key}/approve", self.handle_approve)
        service.router.add("POST", "/api/mentions/{key}/cancel", self.handle_cancel)
        service.router.add("GET", "/api/settings", self.handle_get_settings)
        service.router.add("PUT", "/api/settings", self.handle_put_settings)
        service.router.add("GET", "/api/tallies", self.handle_tallies)
        service.router.add("GET", "/api/export.csv", self.handle_export)

    # -- queues -----------------------------------------------------------

    def _queue_records(self, queue: str) -> list[MentionRecord]:
        wanted = QUEUES[queue]
        if queue == "ready":
            return self.aggregator.registry.select_for_sending(
                SendPolicy(high_confidence_only=False)
            )
        records = [r for r in self.registry.records() if r.state in wanted]
        records.sort(key=lambda r: r.seq)
        return records

    def handle_list(self, request: Request) -> Response:
        queue = request.query.get("state", "ready").lower()
        if queue not in QUEUES:
            return error_response(400, f"unknown state {queue!r}")
        try:
            page = int(request.query.get("page", "1"))
            page_size = int(request.query.get("page_size", "10"))
        except ValueError:
            return error_response(400, "page and page_size must be integers")
        if page < 1 or page_size < 1:
            return error_response(400, "page and page_size must be positive")
        records = self._queue_records(queue)
        window = records[(page - 1) * page_size : page * page_size]
        rows = [
            {
                "key": r.key,
                "oaiId": r.oai_id,
                "title": r.paper_title,
                "authorsDisplay": ", ".join(a.name for a in r.authors),
                "statusLabel": status_label(r),
                "confidence": r.descriptor.mention_confidence,
            }
            for r in window
        ]
        return json_response(
            {
                "queue": queue,
                "rows": rows,
                "total": len(records),
                "page": page,
                "pageSize": page_size,
            }
        )

    def handle_tallies(self, request: Request) -> Response:
        by_state = self.registry.tally_by_state()
        return json_response(
            {queue: sum(by_state[s] for s in states) for queue, states in QUEUES.items()}
        )

    # -- record detail ------------------------------------------------------

    def _record_or_none(self, key: str) -> Optional[MentionRecord]:
        try:
            return self.registry.get(key)
        except UnknownRecord:
            return None

    def handle_detail(self, request: Request) -> Response:
        record = self._record_or_none(request.params["key"])
        if record is None:
            return error_response(404, "no such mention")
        recipients = recipients_for(record, self.aggregator.policy, self.institution_domain)
        return json_response(
            {
                "key": record.key,
                "oaiId": record.oai_id,
                "paperTitle": record.paper_title,
                "authors": [{"name": a.name, "email": a.email} for a in record.authors],
                "state": record.state.value,
                "statusLabel": status_label(record),
                "responseKind": record.response_kind.value if record.response_kind else None,
                "offerId": record.offer_id,
                "pid": record.pid.render() if record.pid else None,
                "mention": mention_to_dict(record.descriptor),
                "recipients": [{"name": a.name, "email": a.email} for a in recipients],
                "eventLog": [
                    {"ts": e.ts, "event": e.event, "detail": e.detail}
                    for e in record.event_log
                ],
            }
        )

    # -- actions ------------------------------------------------------------

    def handle_approve(self, request: Request) -> Response:
        record = self._record_or_none(request.params["key"])
        if record is None:
            return error_response(404, "no such mention")
        if record.state is not MentionState.READY:
            return error_response(409, f"record is {record.state.value}, not Ready")
        try:
            outcome = self.aggregator.offer_record(record.key)
        except IllegalTransition as exc:
            return error_response(409, str(exc))
        return json_response(
            {"delivered": outcome.receipt.delivered, "offerId": outcome.offer_id}
        )

    def handle_cancel(self, request: Request) -> Response:
        record = self._record_or_none(request.params["key"])
        if record is None:
            return error_response(404, "no such mention")
        if record.state not in (MentionState.READY, MentionState.SENT):
            return error_response(409, f"record is {record.state.value}")
        try:
            after = self.aggregator.cancel(record.key)
        except IllegalTransition as exc:
            return error_response(409, str(exc))
        return json_response({"state": after.state.value})

    # -- settings -------------------------------------------------------------

    def handle_get_settings(self, request: Request) -> Response:
        return json_response(policy_to_dict(self.aggregator.policy))

    def handle_put_settings(self, request: Request) -> Response:
        try:
            doc = request.json()
        except ValueError:
            return error_response(400, "body is not JSON")
        if not isinstance(doc, dict):
            return error_response(400, "expected a JSON object")
        policy = policy_from_dict(doc)
        problems = policy.problems()
        if problems:
            return json_response({"error": "invalid policy", "problems": problems}, status=400)
        self.aggregator.set_policy(policy)
        return json_response(policy_to_dict(policy))

    # -- export ----------------------------------------------------------------

    def handle_export(self, request: Request) -> Response:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(CSV_HEADER)
        for record in self.registry.records():
            writer.writerow(
                [
                    record.oai_id,
                    record.paper_title,
                    record.descriptor.citation.name,
                    record.descriptor.mention_confidence,
                    record.descriptor.mention_type.value,
                    record.state.value,
                    record.pid.render() if record.pid else "",
                ]
            )
        return Response(
            status=200,
            body=buffer.getvalue().encode("utf-8"),
            content_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="mentions.csv"'},
        )
