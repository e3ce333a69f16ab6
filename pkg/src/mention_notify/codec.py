"""Canonical JSON rendering and total parsing of notification payloads.

Serialization emits keys in the fixed document order of the wire format
(`@context`, `actor`, `context`, `id`, `inReplyTo`, `object`, `origin`,
`target`, `type`), so equal payloads always produce byte-identical UTF-8
text. Parsing never raises: malformed input of any shape comes back as a
:class:`ValidationReport` listing every violation with a key path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .model import (
    ActorKind,
    ActorRef,
    MentionDescriptor,
    MentionType,
    MessageKind,
    NotificationPayload,
    InvariantViolation,
    ServiceEndpoint,
    SoftwareCitation,
    payload_violations,
)

MEDIA_TYPE = "application/ld+json"


@dataclass(frozen=True)
class Problem:
    """One violation: the offending key path and what went wrong there."""

    path: str
    message: str

    def render(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class ValidationReport:
    problems: list[Problem] = field(default_factory=list)

    def add(self, path: str, message: str) -> None:
        self.problems.append(Problem(path, message))

    def paths(self) -> list[str]:
        return [p.path for p in self.problems]

    def render(self) -> str:
        return "\n".join(p.render() for p in self.problems)

    def to_json(self) -> bytes:
        doc = {"problems": [{"path": p.path, "message": p.message} for p in self.problems]}
        return json.dumps(doc, indent=2).encode("utf-8")


def _confidence_value(confidence: float) -> Union[int, float]:
    # 99 stays 99, 99.45 stays 99.45: integral floats render without a fraction.
    if isinstance(confidence, float) and confidence.is_integer():
        return int(confidence)
    return confidence


def citation_to_dict(citation: SoftwareCitation) -> dict:
    doc: dict[str, Any] = {
        "@context": citation.context_iri,
        "type": citation.type_name,
        "name": citation.name,
    }
    if citation.reference_publication is not None:
        doc["referencePublication"] = citation.reference_publication
    if citation.repository_link is not None:
        doc["codeRepository"] = citation.repository_link
    return doc


def canonical_citation_bytes(citation: SoftwareCitation) -> bytes:
    """Compact canonical rendering, the hashing input for minted identifiers."""
    return json.dumps(
        citation_to_dict(citation), separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def mention_to_dict(mention: MentionDescriptor) -> dict:
    doc: dict[str, Any] = {"id": mention.record_id}
    if mention.cite_as is not None:
        doc["ietf:cite-as"] = mention.cite_as
    doc["sorg:citation"] = citation_to_dict(mention.citation)
    doc["mentionConfidence"] = _confidence_value(mention.mention_confidence)
    doc["mentionType"] = mention.mention_type.value
    doc["mentionContext"] = mention.mention_context
    return doc


def _actor_to_dict(actor: ActorRef) -> dict:
    return {"id": actor.id, "name": actor.name, "type": actor.actor_kind.value}


def _endpoint_to_dict(endpoint: ServiceEndpoint) -> dict:
    return {"id": endpoint.id, "inbox": endpoint.inbox, "type": endpoint.endpoint_kind}


def payload_to_dict(payload: NotificationPayload) -> dict:
    doc: dict[str, Any] = {"@context": list(payload.context_list)}
    doc["actor"] = _actor_to_dict(payload.actor)
    if payload.conversation_context is not None:
        doc["context"] = {"id": payload.conversation_context}
    doc["id"] = payload.notification_id
    if payload.in_reply_to is not None:
        doc["inReplyTo"] = payload.in_reply_to
    doc["object"] = mention_to_dict(payload.object)
    doc["origin"] = _endpoint_to_dict(payload.origin)
    doc["target"] = _endpoint_to_dict(payload.target)
    doc["type"] = [payload.kind.value, payload.coar_type]
    return doc


def serialize_payload(payload: NotificationPayload) -> bytes:
    """Canonical UTF-8 JSON rendering; raises on invariant violations."""
    problems = payload_violations(payload)
    if problems:
        raise InvariantViolation("; ".join(problems))
    return json.dumps(payload_to_dict(payload), indent=2, ensure_ascii=False).encode("utf-8")


def _take(doc: dict, key: str, path: str, kind: type, report: ValidationReport):
    value = doc.get(key)
    prefix = f"{path}.{key}" if path else key
    if value is None:
        report.add(prefix, "missing")
        return None
    if not isinstance(value, kind):
        report.add(prefix, f"expected {kind.__name__}")
        return None
    return value


def _parse_string(doc: dict, key: str, path: str, report: ValidationReport) -> Optional[str]:
    return _take(doc, key, path, str, report)


def _parse_actor(doc: dict, report: ValidationReport) -> Optional[ActorRef]:
    raw = _take(doc, "actor", "", dict, report)
    if raw is None:
        return None
    actor_id = _parse_string(raw, "id", "actor", report)
    name = _parse_string(raw, "name", "actor", report)
    kind_text = _parse_string(raw, "type", "actor", report)
    kind: Optional[ActorKind] = None
    if kind_text is not None:
        try:
            kind = ActorKind(kind_text)
        except ValueError:
            report.add("actor.type", "must be Person or Service")
    if actor_id is None or name is None or kind is None:
        return None
    return ActorRef(id=actor_id, name=name, actor_kind=kind)


def _parse_endpoint(doc: dict, key: str, report: ValidationReport) -> Optional[ServiceEndpoint]:
    raw = _take(doc, key, "", dict, report)
    if raw is None:
        return None
    endpoint_id = _parse_string(raw, "id", key, report)
    inbox = _parse_string(raw, "inbox", key, report)
    kind = _parse_string(raw, "type", key, report)
    if kind is not None and kind != "Service":
        report.add(f"{key}.type", "must be Service")
    if endpoint_id is None or inbox is None or kind != "Service":
        return None
    return ServiceEndpoint(id=endpoint_id, inbox=inbox)


def _parse_citation(doc: dict, path: str, report: ValidationReport) -> Optional[SoftwareCitation]:
    raw = _take(doc, "sorg:citation", path, dict, report)
    if raw is None:
        return None
    return citation_from_dict(raw, f"{path}.sorg:citation", report)


def citation_from_dict(raw: dict, cite_path: str, report: ValidationReport) -> Optional[SoftwareCitation]:
    context_iri = _parse_string(raw, "@context", cite_path, report)
    type_name = _parse_string(raw, "type", cite_path, report)
    name = _parse_string(raw, "name", cite_path, report)
    reference = raw.get("referencePublication")
    if reference is not None and not isinstance(reference, str):
        report.add(f"{cite_path}.referencePublication", "expected str")
        reference = None
    repo_link = raw.get("codeRepository")
    if repo_link is not None and not isinstance(repo_link, str):
        report.add(f"{cite_path}.codeRepository", "expected str")
        repo_link = None
    if context_iri is None or type_name is None or name is None:
        return None
    return SoftwareCitation(
        name=name,
        reference_publication=reference,
        repository_link=repo_link,
        context_iri=context_iri,
        type_name=type_name,
    )


def _parse_mention(doc: dict, report: ValidationReport) -> Optional[MentionDescriptor]:
    raw = _take(doc, "object", "", dict, report)
    if raw is None:
        return None
    return mention_from_dict(raw, "object", report)


def mention_from_dict(raw: dict, path: str, report: ValidationReport) -> Optional[MentionDescriptor]:
    record_id = _parse_string(raw, "id", path, report)
    cite_as = raw.get("ietf:cite-as")
    if cite_as is not None and not isinstance(cite_as, str):
        report.add(f"{path}.ietf:cite-as", "expected str")
        cite_as = None
    citation = _parse_citation(raw, path, report)
    confidence = raw.get("mentionConfidence")
    if confidence is None:
        report.add(f"{path}.mentionConfidence", "missing")
    elif isinstance(confidence, bool) or not isinstance(confidence, (int, float)):
        report.add(f"{path}.mentionConfidence", "expected a number")
        confidence = None
    type_text = _parse_string(raw, "mentionType", path, report)
    mention_type: Optional[MentionType] = None
    if type_text is not None:
        try:
            mention_type = MentionType(type_text)
        except ValueError:
            report.add(f"{path}.mentionType", "must be one of used, created, shared")
    context = _parse_string(raw, "mentionContext", path, report)
    if None in (record_id, citation, confidence, mention_type, context):
        return None
    return MentionDescriptor(
        record_id=record_id,
        citation=citation,
        mention_confidence=confidence,
        mention_type=mention_type,
        mention_context=context,
        cite_as=cite_as,
    )


def _parse_type_pair(doc: dict, report: ValidationReport) -> tuple[Optional[MessageKind], str]:
    raw = doc.get("type")
    if raw is None:
        report.add("type", "missing")
        return None, ""
    if not isinstance(raw, list) or len(raw) != 2 or not all(isinstance(t, str) for t in raw):
        report.add("type", "expected a two-element array of strings")
        return None, ""
    kind_text, coar_type = raw
    try:
        kind = MessageKind(kind_text)
    except ValueError:
        report.add("type", f"unknown message kind {kind_text!r}")
        kind = None
    return kind, coar_type


def parse_payload(data: bytes) -> Union[NotificationPayload, ValidationReport]:
    """Parse wire bytes; total over arbitrary input.

    Returns the payload when every invariant holds, otherwise a report
    naming each offending key. Unknown keys are ignored.
    """
    report = ValidationReport()
    try:
        if isinstance(data, (bytes, bytearray)):
            doc = json.loads(data.decode("utf-8"))
        else:
            doc = json.loads(data)
    except (ValueError, UnicodeDecodeError):
        report.add("document", "not parseable")
        return report
    if not isinstance(doc, dict):
        report.add("document", "not a JSON object")
        return report

    context_raw = doc.get("@context")
    context_list: tuple[str, ...] = ()
    if context_raw is None:
        report.add("@context", "missing")
    elif not isinstance(context_raw, list) or not all(isinstance(c, str) for c in context_raw):
        report.add("@context", "expected an array of IRI strings")
    else:
        context_list = tuple(context_raw)

    actor = _parse_actor(doc, report)
    notification_id = _parse_string(doc, "id", "", report)
    mention = _parse_mention(doc, report)
    origin = _parse_endpoint(doc, "origin", report)
    target = _parse_endpoint(doc, "target", report)
    kind, coar_type = _parse_type_pair(doc, report)

    in_reply_to = doc.get("inReplyTo")
    if in_reply_to is not None and not isinstance(in_reply_to, str):
        report.add("inReplyTo", "expected str")
        in_reply_to = None

    conversation_context = None
    context_block = doc.get("context")
    if context_block is not None:
        if isinstance(context_block, dict) and isinstance(context_block.get("id"), str):
            conversation_context = context_block["id"]
        else:
            report.add("context", "expected an object with an id")

    if None in (actor, notification_id, mention, origin, target, kind):
        return report

    payload = NotificationPayload(
        notification_id=notification_id,
        kind=kind,
        actor=actor,
        object=mention,
        origin=origin,
        target=target,
        context_list=context_list,
        in_reply_to=in_reply_to,
        conversation_context=conversation_context,
        coar_type=coar_type,
    )
    for violation in payload_violations(payload):
        head, _, message = violation.partition(": ")
        report.add(head, message or "invalid")
    if report.problems:
        return report
    return payload
