"""Mention records, their lifecycle state machine, and event-log storage.

Records move Ready -> Sent -> Responded -> Announced, with Cancelled
reachable from Ready or Sent; every change appends one line to a
newline-delimited event log, and replaying that log rebuilds the exact
registry state. The registry serializes mutations behind one lock, so
it is safe to share with concurrent inbox handlers.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Union

from .codec import ValidationReport, mention_from_dict, mention_to_dict
from .identifiers import PersistentIdentifier
from .model import MentionDescriptor, mention_violations


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


Clock = Callable[[], str]


class RegistryError(Exception):
    pass


class UnknownRecord(RegistryError):
    pass


class InvalidDraft(RegistryError):
    def __init__(self, index: int, detail: str):
        super().__init__(f"draft {index}: {detail}")
        self.index = index


class IllegalTransition(RegistryError):
    def __init__(self, state: "MentionState", event: str):
        super().__init__(f"no transition from {state.value} on {event}")
        self.state = state
        self.event = event


class CorruptLog(RegistryError):
    """Replay stopped at a bad line; `registry` holds state up to it."""

    def __init__(self, line_number: int, detail: str, registry: "MentionRegistry"):
        super().__init__(f"line {line_number}: {detail}")
        self.line_number = line_number
        self.registry = registry


class MentionState(str, Enum):
    READY = "Ready"
    SENT = "Sent"
    RESPONDED = "Responded"
    ANNOUNCED = "Announced"
    CANCELLED = "Cancelled"


class ResponseKind(str, Enum):
    VALIDATED = "Validated"
    EDITED = "Edited"
    REJECTED = "Rejected"


@dataclass(frozen=True)
class Author:
    name: str
    email: str


@dataclass(frozen=True)
class SendPolicy:
    auto_send: bool = False
    high_confidence_only: bool = False
    threshold: float = 0.0
    max_authors_per_institution: int = 1

    def problems(self) -> list[str]:
        out = []
        if not isinstance(self.auto_send, bool):
            out.append("auto_send: expected a boolean")
        if not isinstance(self.high_confidence_only, bool):
            out.append("high_confidence_only: expected a boolean")
        if (
            isinstance(self.threshold, bool)
            or not isinstance(self.threshold, (int, float))
            or not 0 <= self.threshold <= 100
        ):
            out.append("threshold: must be a number within [0, 100]")
        if not isinstance(self.max_authors_per_institution, int) or self.max_authors_per_institution < 1:
            out.append("max_authors_per_institution: must be an integer >= 1")
        return out


# Transition events ----------------------------------------------------------


@dataclass(frozen=True)
class OfferSent:
    offer_id: str


@dataclass(frozen=True)
class ResponseReceived:
    kind: ResponseKind
    mention: Optional[MentionDescriptor] = None  # set when the author edited


@dataclass(frozen=True)
class Announced:
    pid: Optional[PersistentIdentifier] = None


@dataclass(frozen=True)
class ManagerCancelled:
    reason: str = ""


RegistryEvent = Union[OfferSent, ResponseReceived, Announced, ManagerCancelled]


@dataclass(frozen=True)
class RecordEvent:
    ts: str
    event: str
    detail: dict


@dataclass
class MentionRecord:
    oai_id: str
    paper_title: str
    authors: list[Author]
    descriptor: MentionDescriptor
    state: MentionState = MentionState.READY
    response_kind: Optional[ResponseKind] = None
    offer_id: Optional[str] = None
    pid: Optional[PersistentIdentifier] = None
    event_log: list[RecordEvent] = field(default_factory=list)
    seq: int = 0  # order of the last state change, for queue listings

    @property
    def key(self) -> str:
        return record_key(self.oai_id, self.descriptor)

    def snapshot(self) -> "MentionRecord":
        return replace(
            self, authors=list(self.authors), event_log=list(self.event_log)
        )


@dataclass(frozen=True)
class MentionDraft:
    """A record as ingested: everything but lifecycle state."""

    oai_id: str
    paper_title: str
    authors: list[Author]
    descriptor: MentionDescriptor


def record_key(oai_id: str, descriptor: MentionDescriptor) -> str:
    identity = "\n".join([oai_id, descriptor.citation.name, descriptor.mention_context])
    return hashlib.sha1(identity.encode("utf-8")).hexdigest()[:16]


def pick_recipients(authors: list[Author], cap: int, institution_domain: str) -> list[Author]:
    """The first `cap` authors whose mail domain is the institution's."""
    domain = institution_domain.lower()
    matching = [a for a in authors if a.email.rpartition("@")[2].lower() == domain]
    return matching[:cap]


def recipients_for(
    record: MentionRecord, policy: SendPolicy, institution_domain: str
) -> list[Author]:
    return pick_recipients(record.authors, policy.max_authors_per_institution, institution_domain)


# Draft / corpus serialization ------------------------------------------------


def draft_to_dict(draft: MentionDraft) -> dict:
    return {
        "oaiId": draft.oai_id,
        "paperTitle": draft.paper_title,
        "authors": [{"name": a.name, "email": a.email} for a in draft.authors],
        "mention": mention_to_dict(draft.descriptor),
    }


def draft_from_dict(doc: dict) -> MentionDraft:
    report = ValidationReport()
    mention = mention_from_dict(doc.get("mention") or {}, "mention", report)
    if mention is None:
        raise ValueError(report.render() or "mention: missing")
    authors = [
        Author(name=a["name"], email=a["email"]) for a in doc.get("authors") or []
    ]
    return MentionDraft(
        oai_id=doc["oaiId"],
        paper_title=doc["paperTitle"],
        authors=authors,
        descriptor=mention,
    )


def load_corpus(path: Path) -> list[MentionDraft]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, list):
        raise ValueError(f"{path}: corpus must be a JSON array of drafts")
    drafts = []
    for index, entry in enumerate(doc):
        try:
            drafts.append(draft_from_dict(entry))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDraft(index, str(exc)) from exc
    return drafts


# The registry ----------------------------------------------------------------

_LEGAL = {
    (MentionState.READY, OfferSent): MentionState.SENT,
    (MentionState.READY, ManagerCancelled): MentionState.CANCELLED,
    (MentionState.SENT, ResponseReceived): MentionState.RESPONDED,
    (MentionState.SENT, ManagerCancelled): MentionState.CANCELLED,
    (MentionState.RESPONDED, Announced): MentionState.ANNOUNCED,
}

_EVENT_NAMES = {
    OfferSent: "offer-sent",
    ResponseReceived: "response-received",
    Announced: "announced",
    ManagerCancelled: "cancelled",
}


class MentionRegistry:
    """In-memory record store backed by an append-only event log file."""

    def __init__(self, log_path: Optional[Path] = None, clock: Clock = utc_now_iso):
        self._lock = threading.RLock()
        self._records: dict[str, MentionRecord] = {}
        self._by_offer: dict[str, str] = {}
        self._clock = clock
        self._seq = 0
        self._log_path = Path(log_path) if log_path else None
        self._log_file = None
        if self._log_path:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
            self._log_file = open(self._log_path, "a", encoding="utf-8")

    # -- storage ---------------------------------------------------------

    def _append_line(self, record_key_: str, event: str, detail: dict) -> str:
        ts = self._clock()
        if self._log_file is not None:
            line = json.dumps(
                {"ts": ts, "record_key": record_key_, "event": event, "detail": detail},
                ensure_ascii=False,
            )
            self._log_file.write(line + "\n")
            self._log_file.flush()
        return ts

    def persist(self) -> Optional[Path]:
        """Flush the event log; the log is written eagerly on every change."""
        with self._lock:
            if self._log_file is not None:
                self._log_file.flush()
            return self._log_path

    def close(self) -> None:
        with self._lock:
            if self._log_file is not None:
                self._log_file.close()
                self._log_file = None

    @classmethod
    def restore(cls, log_path: Path, clock: Clock = utc_now_iso) -> "MentionRegistry":
        """Rebuild a registry by replaying its event log.

        Raises CorruptLog on the first unparseable or inapplicable line; the
        exception carries the registry built from the valid prefix.
        """
        registry = cls(log_path=None, clock=clock)
        log_path = Path(log_path)
        text = log_path.read_text(encoding="utf-8") if log_path.exists() else ""
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                registry._apply_logged(entry)
            except (ValueError, KeyError, TypeError, RegistryError) as exc:
                registry._log_path = log_path
                raise CorruptLog(number, str(exc), registry) from exc
        registry._log_path = log_path
        registry._log_file = open(log_path, "a", encoding="utf-8")
        return registry

    def _apply_logged(self, entry: dict) -> None:
        event = entry["event"]
        key = entry["record_key"]
        detail = entry.get("detail") or {}
        if event == "ingested":
            draft = draft_from_dict(detail)
            self._add_record(draft, logged=False, ts=entry["ts"])
            return
        if event == "pid-assigned":
            self._set_pid_locked(key, PersistentIdentifier.parse(detail["pid"]), logged=False, ts=entry["ts"])
            return
        if event == "offer-sent":
            parsed: RegistryEvent = OfferSent(offer_id=detail["offer_id"])
        elif event == "response-received":
            mention = None
            if detail.get("mention") is not None:
                report = ValidationReport()
                mention = mention_from_dict(detail["mention"], "mention", report)
                if mention is None:
                    raise ValueError(report.render())
            parsed = ResponseReceived(kind=ResponseKind(detail["kind"]), mention=mention)
        elif event == "announced":
            pid = PersistentIdentifier.parse(detail["pid"]) if detail.get("pid") else None
            parsed = Announced(pid=pid)
        elif event == "cancelled":
            parsed = ManagerCancelled(reason=detail.get("reason", ""))
        else:
            raise ValueError(f"unknown event {event!r}")
        self.transition(key, parsed, logged=False, ts=entry["ts"])

    # -- ingestion -------------------------------------------------------

    def ingest(self, drafts: list[MentionDraft]) -> int:
        """Store drafts as Ready records; duplicates are skipped, not errors."""
        for index, draft in enumerate(drafts):
            problems = mention_violations(draft.descriptor, "mention")
            if problems:
                raise InvalidDraft(index, "; ".join(problems))
            if not draft.oai_id or not draft.paper_title:
                raise InvalidDraft(index, "oaiId and paperTitle must be non-empty")
        count = 0
        with self._lock:
            for draft in drafts:
                if self._add_record(draft, logged=True):
                    count += 1
        return count

    def _add_record(self, draft: MentionDraft, logged: bool, ts: Optional[str] = None) -> bool:
        key = record_key(draft.oai_id, draft.descriptor)
        if key in self._records:
            return False
        if logged:
            ts = self._append_line(key, "ingested", draft_to_dict(draft))
        self._seq += 1
        record = MentionRecord(
            oai_id=draft.oai_id,
            paper_title=draft.paper_title,
            authors=list(draft.authors),
            descriptor=draft.descriptor,
            seq=self._seq,
        )
        record.event_log.append(RecordEvent(ts or self._clock(), "ingested", {}))
        self._records[key] = record
        return True

    # -- transitions -----------------------------------------------------

    def transition(
        self,
        record_key_: str,
        event: RegistryEvent,
        logged: bool = True,
        ts: Optional[str] = None,
    ) -> MentionState:
        name = _EVENT_NAMES[type(event)]
        with self._lock:
            record = self._records.get(record_key_)
            if record is None:
                raise UnknownRecord(record_key_)
            target = _LEGAL.get((record.state, type(event)))
            if target is None:
                raise IllegalTransition(record.state, name)
            if isinstance(event, Announced) and record.response_kind is ResponseKind.REJECTED:
                raise IllegalTransition(record.state, name)
            detail = self._event_detail(event)
            if logged:
                ts = self._append_line(record_key_, name, detail)
            self._apply_event(record, event)
            record.state = target
            self._seq += 1
            record.seq = self._seq
            record.event_log.append(RecordEvent(ts or self._clock(), name, detail))
            return record.state

    @staticmethod
    def _event_detail(event: RegistryEvent) -> dict:
        if isinstance(event, OfferSent):
            return {"offer_id": event.offer_id}
        if isinstance(event, ResponseReceived):
            detail: dict = {"kind": event.kind.value}
            if event.mention is not None:
                detail["mention"] = mention_to_dict(event.mention)
            return detail
        if isinstance(event, Announced):
            return {"pid": event.pid.render() if event.pid else None}
        return {"reason": event.reason}

    def _apply_event(self, record: MentionRecord, event: RegistryEvent) -> None:
        if isinstance(event, OfferSent):
            record.offer_id = event.offer_id
            self._by_offer[event.offer_id] = record.key
        elif isinstance(event, ResponseReceived):
            record.response_kind = event.kind
            if event.mention is not None:
                record.descriptor = event.mention
        elif isinstance(event, Announced):
            if event.pid is not None:
                record.pid = event.pid

    def set_pid(self, record_key_: str, pid: PersistentIdentifier) -> None:
        """Attach an archive-minted identifier; only Announced records may hold one."""
        with self._lock:
            self._set_pid_locked(record_key_, pid, logged=True)

    def _set_pid_locked(
        self, record_key_: str, pid: PersistentIdentifier, logged: bool, ts: Optional[str] = None
    ) -> None:
        record = self._records.get(record_key_)
        if record is None:
            raise UnknownRecord(record_key_)
        if record.state is not MentionState.ANNOUNCED:
            raise IllegalTransition(record.state, "pid-assigned")
        if logged:
            ts = self._append_line(record_key_, "pid-assigned", {"pid": pid.render()})
        record.pid = pid
        record.event_log.append(
            RecordEvent(ts or self._clock(), "pid-assigned", {"pid": pid.render()})
        )

    # -- queries ---------------------------------------------------------

    def get(self, record_key_: str) -> MentionRecord:
        with self._lock:
            record = self._records.get(record_key_)
            if record is None:
                raise UnknownRecord(record_key_)
            return record.snapshot()

    def find_by_offer(self, offer_id: str) -> Optional[MentionRecord]:
        with self._lock:
            key = self._by_offer.get(offer_id)
            return self._records[key].snapshot() if key else None

    def records(self) -> list[MentionRecord]:
        with self._lock:
            return [r.snapshot() for r in self._records.values()]

    def select_for_sending(self, policy: SendPolicy) -> list[MentionRecord]:
        """Ready records eligible under the policy, highest confidence first."""
        with self._lock:
            ready = [r for r in self._records.values() if r.state is MentionState.READY]
            if policy.high_confidence_only:
                ready = [
                    r
                    for r in ready
                    if r.descriptor.mention_confidence >= policy.threshold
                ]
            ready.sort(key=lambda r: (-r.descriptor.mention_confidence, r.oai_id))
            return [r.snapshot() for r in ready]

    def tally_by_state(self) -> dict[MentionState, int]:
        with self._lock:
            tally = {state: 0 for state in MentionState}
            for record in self._records.values():
                tally[record.state] += 1
            return tally

    def tally_by_response(self) -> dict[ResponseKind, int]:
        with self._lock:
            tally = {kind: 0 for kind in ResponseKind}
            for record in self._records.values():
                if record.response_kind is not None:
                    tally[record.response_kind] += 1
            return tally
