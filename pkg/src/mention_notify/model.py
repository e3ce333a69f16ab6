"""Notification wire-format domain types and payload builders.

The validation conversation uses five message kinds riding one activity
type: an Offer proposes a paper-software relationship, Accept /
TentativeAccept / Reject answer it, and Announce disseminates the
validated relationship. Payload values are immutable; invariants are
checked by :func:`payload_violations` and friends so that builders can
raise and the codec can report without duplicating rules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional
from urllib.parse import urlsplit

from .identifiers import IdSource, is_urn_uuid

ACTIVITYSTREAMS_CONTEXT = "https://www.w3.org/ns/activitystreams"
COAR_NOTIFY_CONTEXT = "https://purl.org/coar/notify"
COAR_NOTIFY_CONTEXT_ALT = "https://coar-notify.net"
DEFAULT_CONTEXT: tuple[str, str] = (ACTIVITYSTREAMS_CONTEXT, COAR_NOTIFY_CONTEXT)

COAR_RELATIONSHIP_ACTION = "coar-notify:RelationshipAction"
CODEMETA_CONTEXT = "https://doi.org/10.5063/schema/codemeta-2.0"
SOFTWARE_SOURCE_CODE = "SoftwareSourceCode"


class PayloadError(ValueError):
    """Base class for payload construction errors."""


class InvalidMention(PayloadError):
    """Mention descriptor violates its invariants."""


class SelfAddressed(PayloadError):
    """Origin and target endpoints share one id."""


class NotAnOffer(PayloadError):
    """A response or announce was requested for a non-Offer payload."""


class InvariantViolation(PayloadError):
    """Payload failed invariant checks at serialization time."""


class ActorKind(str, Enum):
    PERSON = "Person"
    SERVICE = "Service"


class MessageKind(str, Enum):
    OFFER = "Offer"
    ACCEPT = "Accept"
    TENTATIVE_ACCEPT = "TentativeAccept"
    REJECT = "Reject"
    ANNOUNCE = "Announce"


RESPONSE_KINDS = (MessageKind.ACCEPT, MessageKind.TENTATIVE_ACCEPT, MessageKind.REJECT)


class MentionType(str, Enum):
    USED = "used"
    CREATED = "created"
    SHARED = "shared"


@dataclass(frozen=True)
class ActorRef:
    """The entity a message speaks for: a person (mailto id) or a service."""

    id: str
    name: str
    actor_kind: ActorKind


@dataclass(frozen=True)
class ServiceEndpoint:
    """A service identity plus the inbox IRI notifications are POSTed to."""

    id: str
    inbox: str
    endpoint_kind: str = "Service"


@dataclass(frozen=True)
class SoftwareCitation:
    """CodeMeta-style description of the mentioned software."""

    name: str
    reference_publication: Optional[str] = None
    repository_link: Optional[str] = None
    context_iri: str = CODEMETA_CONTEXT
    type_name: str = SOFTWARE_SOURCE_CODE


@dataclass(frozen=True)
class MentionDescriptor:
    """One discovered software mention bound to a repository paper record."""

    record_id: str
    citation: SoftwareCitation
    mention_confidence: float
    mention_type: MentionType
    mention_context: str
    cite_as: Optional[str] = None


@dataclass(frozen=True)
class NotificationPayload:
    notification_id: str
    kind: MessageKind
    actor: ActorRef
    object: MentionDescriptor
    origin: ServiceEndpoint
    target: ServiceEndpoint
    context_list: tuple[str, ...] = DEFAULT_CONTEXT
    in_reply_to: Optional[str] = None
    conversation_context: Optional[str] = None
    coar_type: str = COAR_RELATIONSHIP_ACTION


def _is_absolute_iri(value: str) -> bool:
    if not value:
        return False
    parts = urlsplit(value)
    return bool(parts.scheme) and bool(parts.netloc or parts.path)


def _is_http_inbox(value: str) -> bool:
    parts = urlsplit(value)
    return parts.scheme in ("http", "https") and bool(parts.netloc) and bool(parts.path)


def actor_violations(actor: ActorRef, path: str = "actor") -> list[str]:
    out = []
    if not actor.id or not (_is_absolute_iri(actor.id) or actor.id.startswith("mailto:")):
        out.append(f"{path}.id: not an absolute IRI or mailto address")
    if not isinstance(actor.actor_kind, ActorKind):
        out.append(f"{path}.type: must be Person or Service")
    return out


def endpoint_violations(endpoint: ServiceEndpoint, path: str) -> list[str]:
    out = []
    if not _is_absolute_iri(endpoint.id):
        out.append(f"{path}.id: not an absolute IRI")
    if not _is_http_inbox(endpoint.inbox):
        out.append(f"{path}.inbox: not an absolute http(s) IRI with a path")
    if endpoint.endpoint_kind != "Service":
        out.append(f"{path}.type: must be Service")
    return out


def citation_violations(citation: SoftwareCitation, path: str = "object.sorg:citation") -> list[str]:
    out = []
    if citation.context_iri != CODEMETA_CONTEXT:
        out.append(f"{path}.@context: must be {CODEMETA_CONTEXT}")
    if citation.type_name != SOFTWARE_SOURCE_CODE:
        out.append(f"{path}.type: must be {SOFTWARE_SOURCE_CODE}")
    if not citation.name:
        out.append(f"{path}.name: must be non-empty")
    return out


def mention_violations(mention: MentionDescriptor, path: str = "object") -> list[str]:
    out = []
    if not _is_absolute_iri(mention.record_id):
        out.append(f"{path}.id: not an absolute IRI")
    out.extend(citation_violations(mention.citation, f"{path}.sorg:citation"))
    if isinstance(mention.mention_confidence, bool) or not isinstance(
        mention.mention_confidence, (int, float)
    ):
        out.append(f"{path}.mentionConfidence: must be a number")
    elif not 0 <= mention.mention_confidence <= 100:
        out.append(f"{path}.mentionConfidence: must be within [0, 100]")
    if not isinstance(mention.mention_type, MentionType):
        out.append(f"{path}.mentionType: must be one of used, created, shared")
    if not mention.mention_context:
        out.append(f"{path}.mentionContext: must be non-empty")
    return out


def payload_violations(payload: NotificationPayload) -> list[str]:
    """Every invariant violation in the payload, with a path per entry."""
    out = []
    if not is_urn_uuid(payload.notification_id):
        out.append("id: not an urn:uuid identifier")
    if not isinstance(payload.kind, MessageKind):
        out.append("type: unknown message kind")
    if payload.coar_type != COAR_RELATIONSHIP_ACTION:
        out.append(f"type: second element must be {COAR_RELATIONSHIP_ACTION}")
    if ACTIVITYSTREAMS_CONTEXT not in payload.context_list:
        out.append("@context: missing the activitystreams context")
    if payload.kind is MessageKind.OFFER:
        if payload.in_reply_to is not None:
            out.append("inReplyTo: must be absent on an Offer")
    else:
        if payload.in_reply_to is None:
            out.append("inReplyTo: required on every kind except Offer")
        elif not is_urn_uuid(payload.in_reply_to):
            out.append("inReplyTo: not an urn:uuid identifier")
    if payload.conversation_context is not None and not _is_absolute_iri(
        payload.conversation_context
    ):
        out.append("context.id: not an absolute IRI")
    out.extend(actor_violations(payload.actor))
    out.extend(mention_violations(payload.object))
    out.extend(endpoint_violations(payload.origin, "origin"))
    out.extend(endpoint_violations(payload.target, "target"))
    return out


def build_offer(
    mention: MentionDescriptor,
    manager: ActorRef,
    origin: ServiceEndpoint,
    target: ServiceEndpoint,
    id_source: IdSource,
) -> NotificationPayload:
    """Offer the paper-software relationship for validation."""
    problems = mention_violations(mention)
    if problems:
        raise InvalidMention("; ".join(problems))
    if origin.id == target.id:
        raise SelfAddressed(f"origin and target share one id: {origin.id}")
    return NotificationPayload(
        notification_id=id_source(),
        kind=MessageKind.OFFER,
        actor=manager,
        object=mention,
        origin=origin,
        target=target,
    )


def build_response(
    offer: NotificationPayload,
    verdict: MessageKind,
    responder: ActorRef,
    id_source: IdSource,
    edited: Optional[MentionDescriptor] = None,
) -> NotificationPayload:
    """Answer an offer: Accept, TentativeAccept (optionally edited), or Reject.

    The response travels the reverse route: the offer's target becomes the
    sending origin and the offer's origin becomes the target.
    """
    if offer.kind is not MessageKind.OFFER:
        raise NotAnOffer(f"cannot respond to a {offer.kind.value}")
    if verdict not in RESPONSE_KINDS:
        raise PayloadError(f"not a response kind: {verdict!r}")
    mention = offer.object
    if edited is not None:
        if verdict is not MessageKind.TENTATIVE_ACCEPT:
            raise PayloadError("only TentativeAccept may carry an edited mention")
        mention = edited
    return NotificationPayload(
        notification_id=id_source(),
        kind=verdict,
        actor=responder,
        object=mention,
        origin=replace(offer.target),
        target=replace(offer.origin),
        in_reply_to=offer.notification_id,
    )


def build_announce(
    offer: NotificationPayload,
    announcer: ActorRef,
    origin: ServiceEndpoint,
    target: ServiceEndpoint,
    id_source: IdSource,
    mention: Optional[MentionDescriptor] = None,
) -> NotificationPayload:
    """Announce the validated relationship to a subscriber.

    `mention` overrides the offered descriptor when an author edit
    superseded it; the conversation context names the paper's record IRI.
    """
    if offer.kind is not MessageKind.OFFER:
        raise NotAnOffer(f"cannot announce a {offer.kind.value}")
    return NotificationPayload(
        notification_id=id_source(),
        kind=MessageKind.ANNOUNCE,
        actor=announcer,
        object=mention if mention is not None else offer.object,
        origin=origin,
        target=target,
        in_reply_to=offer.notification_id,
        conversation_context=offer.object.record_id,
    )
