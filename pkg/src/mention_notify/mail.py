"""Simulated mail: author messages rendered to disk and queued in-process.

No real transport exists in the simulation; each message is written to
``mailbox/<email>/<uuid>.txt`` so a human can read what the author would
have received, and queued for the scripted author agents to answer.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import MentionDescriptor
from .registry import Author

ACTIONS = ("validate", "edit", "reject", "ignore")


def subject_for(paper_title: str) -> str:
    words = paper_title.split()
    return "Registering your research software for " + " ".join(words[:6]) + "..."


@dataclass
class AuthorMessage:
    message_id: str
    recipient: Author
    subject: str
    paper_title: str
    oai_id: str
    record_iri: str
    mentions: list[MentionDescriptor]
    action_tokens: dict[str, str]  # action name -> single-use token
    action_base_url: str

    def action_url(self, action: str) -> str:
        return f"{self.action_base_url}/actions/{self.action_tokens[action]}"

    def filename(self) -> str:
        return self.message_id.rpartition(":")[2] + ".txt"


@dataclass
class MailChannel:
    mailbox_dir: Optional[Path] = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _queue: list[AuthorMessage] = field(default_factory=list, repr=False)
    _handled: set[str] = field(default_factory=set, repr=False)

    def send(self, message: AuthorMessage) -> None:
        with self._lock:
            self._queue.append(message)
        self._write(message)

    def refresh(self, message: AuthorMessage) -> None:
        """Rewrite an open message whose mention list grew."""
        self._write(message)

    def _write(self, message: AuthorMessage) -> None:
        if self.mailbox_dir is None:
            return
        target = Path(self.mailbox_dir) / message.recipient.email
        target.mkdir(parents=True, exist_ok=True)
        (target / message.filename()).write_text(render_message(message), encoding="utf-8")

    def next_unhandled(self) -> Optional[AuthorMessage]:
        with self._lock:
            for message in self._queue:
                if message.message_id not in self._handled:
                    return message
            return None

    def mark_handled(self, message_id: str) -> None:
        with self._lock:
            self._handled.add(message_id)

    def has_unhandled(self) -> bool:
        with self._lock:
            return any(m.message_id not in self._handled for m in self._queue)

    def sent_count(self) -> int:
        with self._lock:
            return len(self._queue)


def render_message(message: AuthorMessage) -> str:
    lines = [
        f"Subject: {message.subject}",
        f"To: {message.recipient.name} <{message.recipient.email}>",
        "",
        "In order to make sure you receive credit and recognition for research",
        "software you created, your institution wants to identify software assets",
        "created by its researchers and students.",
        "",
        "Our systems have identified that your recent paper seems to mention a",
        "research software you and your co-authors might have created. Could you",
        "please confirm or edit the information below so the asset can be registered.",
        "",
        message.oai_id,
        message.paper_title,
    ]
    for index, mention in enumerate(message.mentions, start=1):
        lines += [
            "",
            f"Software mention {index}",
            f"  Software name:            {mention.citation.name}",
            f"  Software mention context: {mention.mention_context}",
        ]
        if mention.citation.repository_link:
            lines.append(f"  Software repository link: {mention.citation.repository_link}")
        lines += [
            f"  Mention type:             {mention.mention_type.value}",
            f"  Confidence:               {mention.mention_confidence}",
        ]
    lines += [
        "",
        "Actions (POST the named action to its URL):",
        f"  validate: {message.action_url('validate')}",
        f"  edit:     {message.action_url('edit')}",
        f"  reject:   {message.action_url('reject')}",
        "",
        "If this email has nothing to do with you or is not relevant to your",
        "paper, use:",
        f"  ignore:   {message.action_url('ignore')}",
        "",
    ]
    return "\n".join(lines)
