"""Conversation validator vs a hand-written truth table of kind sequences."""

from __future__ import annotations

import itertools
from typing import Optional

import pytest

from mention_notify.conversation import validate_conversation
from mention_notify.identifiers import SeededIds
from mention_notify.model import (
    ActorKind,
    ActorRef,
    MessageKind,
    NotificationPayload,
)

from conftest import REPOSITORY, REVIEW_SERVICE, FIXTURE_MENTION

O = MessageKind.OFFER
A = MessageKind.ACCEPT
T = MessageKind.TENTATIVE_ACCEPT
R = MessageKind.REJECT
N = MessageKind.ANNOUNCE

# Every valid kind sequence of length <= 3, written out by hand.
VALID_SEQUENCES = {
    (O,),
    (O, A),
    (O, T),
    (O, R),
    (O, A, A),
    (O, A, T),
    (O, A, R),
    (O, T, A),
    (O, T, T),
    (O, T, R),
    (O, R, A),
    (O, R, T),
    (O, R, R),
    (O, A, N),
    (O, T, N),
}


def _message(kind: MessageKind, ids, offer_id: Optional[str]) -> NotificationPayload:
    actor = ActorRef(id="mailto:someone@repo.com", name="Someone", actor_kind=ActorKind.PERSON)
    return NotificationPayload(
        notification_id=ids(),
        kind=kind,
        actor=actor,
        object=FIXTURE_MENTION,
        origin=REPOSITORY,
        target=REVIEW_SERVICE,
        in_reply_to=None if kind is O else offer_id,
    )


def _conversation(kinds) -> list[NotificationPayload]:
    ids = SeededIds(99)
    first = _message(kinds[0], ids, offer_id=None)
    rest = [_message(kind, ids, offer_id=first.notification_id) for kind in kinds[1:]]
    return [first] + rest


def _all_sequences(max_len: int):
    for length in range(1, max_len + 1):
        yield from itertools.product(list(MessageKind), repeat=length)


def test_enumeration_matches_truth_table():
    checked = 0
    for kinds in _all_sequences(3):
        verdict = validate_conversation(_conversation(kinds))
        expected = kinds in VALID_SEQUENCES
        assert verdict.valid == expected, f"{[k.value for k in kinds]} -> {verdict}"
        checked += 1
    assert checked == 5 + 25 + 125


def test_offer_alone_is_open_and_valid():
    assert validate_conversation(_conversation((O,))).valid


def test_reject_then_announce_fails_at_index_2():
    verdict = validate_conversation(_conversation((O, R, N)))
    assert not verdict.valid
    assert verdict.failure_index == 2


def test_tables_thread_as_one_conversation(offer_payload, announce_payload):
    accept = _message(A, SeededIds(5), offer_id=offer_payload.notification_id)
    verdict = validate_conversation([offer_payload, accept, announce_payload])
    assert verdict.valid


def test_mismatched_in_reply_to_names_index():
    offer, accept = _conversation((O, A))
    from dataclasses import replace

    stray = replace(accept, in_reply_to="urn:uuid:00000000-0000-4000-8000-000000000000")
    verdict = validate_conversation([offer, stray])
    assert not verdict.valid
    assert verdict.failure_index == 1


def test_empty_conversation_is_invalid():
    verdict = validate_conversation([])
    assert not verdict.valid
