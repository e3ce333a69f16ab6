"""Shared fixtures: the two wire-format table payloads and their files."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from mention_notify.model import (
    ActorKind,
    ActorRef,
    MentionDescriptor,
    MentionType,
    MessageKind,
    NotificationPayload,
    ServiceEndpoint,
    SoftwareCitation,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

REPOSITORY = ServiceEndpoint(
    id="https://research-organisation.org/repository",
    inbox="https://research-organisation.org/inbox/",
)
REVIEW_SERVICE = ServiceEndpoint(
    id="https://review-service.com/system",
    inbox="https://review-service.com/inbox/",
)

FIXTURE_MENTION = MentionDescriptor(
    record_id="https://research-organisation.org/repository/record/201203/421/",
    cite_as="https://doi.org/10.5555/12345680",
    citation=SoftwareCitation(
        name="SoFAIR",
        reference_publication="https://doi.org/10.1016/j.procs.2012.04.202",
    ),
    mention_confidence=99,
    mention_type=MentionType.USED,
    mention_context="In this paper, we present the software X vY (http://sw/link)",
)


@pytest.fixture
def offer_payload() -> NotificationPayload:
    return NotificationPayload(
        notification_id="urn:uuid:0370c0fb-bb78-4a9b-87f5-bed307a509dd",
        kind=MessageKind.OFFER,
        actor=ActorRef(
            id="mailto:library@repo.com",
            name="Repository manager",
            actor_kind=ActorKind.PERSON,
        ),
        object=FIXTURE_MENTION,
        origin=REPOSITORY,
        target=REVIEW_SERVICE,
    )


@pytest.fixture
def announce_payload() -> NotificationPayload:
    return NotificationPayload(
        notification_id="urn:uuid:94ecae35-dcf4-4182-8550-22c7164fe23f",
        kind=MessageKind.ANNOUNCE,
        actor=ActorRef(
            id="https://review-service.com/system",
            name="CORE",
            actor_kind=ActorKind.SERVICE,
        ),
        object=FIXTURE_MENTION,
        origin=REVIEW_SERVICE,
        target=REPOSITORY,
        context_list=("https://www.w3.org/ns/activitystreams", "https://coar-notify.net"),
        in_reply_to="urn:uuid:0370c0fb-bb78-4a9b-87f5-bed307a509dd",
        conversation_context="https://research-organisation.org/repository/preprint/201203/421/",
    )


@pytest.fixture
def offer_fixture_bytes() -> bytes:
    return (FIXTURES / "canonical_offer.json").read_bytes()


@pytest.fixture
def announce_fixture_bytes() -> bytes:
    return (FIXTURES / "canonical_announce.json").read_bytes()


def compact(data: bytes | str) -> str:
    """Whitespace-normalized rendering that keeps the document's key order."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.dumps(json.loads(data), separators=(",", ":"), ensure_ascii=False)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    print(f"\n[acceptance] {name}: {'PASS' if report.passed else 'FAIL'}")
