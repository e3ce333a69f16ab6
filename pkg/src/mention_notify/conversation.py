"""Conversation-thread validation over ordered notification lists.

A well-formed conversation is one Offer, any number of responses
(Accept, TentativeAccept, Reject), and at most one final Announce that
must follow an accepting response. Every message after the Offer must
thread back to the Offer's id via inReplyTo.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import MessageKind, NotificationPayload, RESPONSE_KINDS


@dataclass(frozen=True)
class ConversationVerdict:
    valid: bool
    failure_index: Optional[int] = None
    reason: Optional[str] = None

    @classmethod
    def ok(cls) -> "ConversationVerdict":
        return cls(valid=True)

    @classmethod
    def fail(cls, index: int, reason: str) -> "ConversationVerdict":
        return cls(valid=False, failure_index=index, reason=reason)


def validate_conversation(messages: Sequence[NotificationPayload]) -> ConversationVerdict:
    """Check the offer -> responses -> optional announce shape and threading."""
    if not messages:
        return ConversationVerdict.fail(0, "empty conversation")
    offer = messages[0]
    if offer.kind is not MessageKind.OFFER:
        return ConversationVerdict.fail(0, "conversation must open with an Offer")

    accepted = False
    announced = False
    for index, message in enumerate(messages[1:], start=1):
        if announced:
            return ConversationVerdict.fail(index, "no message may follow the Announce")
        if message.kind is MessageKind.OFFER:
            return ConversationVerdict.fail(index, "second Offer in one conversation")
        if message.in_reply_to != offer.notification_id:
            return ConversationVerdict.fail(index, "inReplyTo does not name the Offer")
        if message.kind in RESPONSE_KINDS:
            if message.kind in (MessageKind.ACCEPT, MessageKind.TENTATIVE_ACCEPT):
                accepted = True
        elif message.kind is MessageKind.ANNOUNCE:
            if not accepted:
                return ConversationVerdict.fail(
                    index, "Announce without a prior Accept or TentativeAccept"
                )
            announced = True
        else:
            return ConversationVerdict.fail(index, f"unexpected kind {message.kind.value}")
    return ConversationVerdict.ok()
