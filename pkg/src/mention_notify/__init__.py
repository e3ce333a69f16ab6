"""Software-mention validation and dissemination over linked-data notifications."""

from .codec import ValidationReport, parse_payload, serialize_payload
from .conversation import ConversationVerdict, validate_conversation
from .identifiers import PersistentIdentifier, SeededIds, mint_pid
from .model import (
    ActorKind,
    ActorRef,
    MentionDescriptor,
    MentionType,
    MessageKind,
    NotificationPayload,
    ServiceEndpoint,
    SoftwareCitation,
    build_announce,
    build_offer,
    build_response,
)
from .registry import (
    Author,
    MentionDraft,
    MentionRecord,
    MentionRegistry,
    MentionState,
    ResponseKind,
    SendPolicy,
    load_corpus,
)

__all__ = [
    "ActorKind",
    "ActorRef",
    "Author",
    "ConversationVerdict",
    "MentionDescriptor",
    "MentionDraft",
    "MentionRecord",
    "MentionRegistry",
    "MentionState",
    "MentionType",
    "MessageKind",
    "NotificationPayload",
    "PersistentIdentifier",
    "ResponseKind",
    "SeededIds",
    "SendPolicy",
    "ServiceEndpoint",
    "SoftwareCitation",
    "ValidationReport",
    "build_announce",
    "build_offer",
    "build_response",
    "load_corpus",
    "mint_pid",
    "parse_payload",
    "serialize_payload",
    "validate_conversation",
]
