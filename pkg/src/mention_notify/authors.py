"""Scripted author agents answering queued validation messages.

Each recipient email is matched against script patterns; the chosen
script decides validate / edit / reject / ignore and the agent POSTs the
action to the repository's action endpoint, exactly as the author would
by clicking a link. Probabilistic scripts draw from a seeded RNG so runs
replay identically.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from enum import Enum
from fnmatch import fnmatch
from typing import Callable, Optional

import requests

from .codec import mention_to_dict
from .mail import AuthorMessage, MailChannel
from .model import MentionDescriptor

log = logging.getLogger(__name__)


class ScriptPolicy(str, Enum):
    ALWAYS_VALIDATE = "always-validate"
    ALWAYS_REJECT = "always-reject"
    EDIT_THEN_VALIDATE = "edit-then-validate"
    IGNORE_ALL = "ignore-all"
    PROBABILISTIC = "probabilistic"


@dataclass(frozen=True)
class AuthorScript:
    policy: ScriptPolicy
    p_validate: float = 0.0
    p_edit: float = 0.0
    p_reject: float = 0.0
    edit_transform: str = "append-version"

    def problems(self) -> list[str]:
        out = []
        weights = (self.p_validate, self.p_edit, self.p_reject)
        if any(w < 0 for w in weights):
            out.append("probabilities must be non-negative")
        if sum(weights) > 1 + 1e-9:
            out.append("probabilities must sum to at most 1 (remainder is ignore)")
        return out


def parse_script(text: str) -> AuthorScript:
    """Parse config values like ``always-validate`` or ``probabilistic:0.5,0.25,0.25``."""
    head, _, rest = text.strip().partition(":")
    policy = ScriptPolicy(head)
    if policy is ScriptPolicy.PROBABILISTIC:
        parts = [float(p) for p in rest.split(",")] if rest else []
        if len(parts) != 3:
            raise ValueError("probabilistic takes exactly p_validate,p_edit,p_reject")
        script = AuthorScript(policy, *parts)
    else:
        if rest:
            raise ValueError(f"{head} takes no parameters")
        script = AuthorScript(policy)
    errors = script.problems()
    if errors:
        raise ValueError("; ".join(errors))
    return script


def _append_version(mention: MentionDescriptor) -> MentionDescriptor:
    citation = replace(mention.citation, name=mention.citation.name + " v2")
    return replace(mention, citation=citation)


EDIT_TRANSFORMS: dict[str, Callable[[MentionDescriptor], MentionDescriptor]] = {
    "append-version": _append_version,
}


def apply_edit(transform: str, mention: MentionDescriptor) -> MentionDescriptor:
    return EDIT_TRANSFORMS[transform](mention)


def _default_post(url: str, doc: dict):
    return requests.post(url, json=doc, timeout=10)


class ScriptedAuthors:
    """Drains the mail queue, answering each message per its recipient's script."""

    def __init__(
        self,
        scripts: dict[str, AuthorScript],
        rng: Optional[random.Random] = None,
        post: Callable = _default_post,
    ):
        self.scripts = dict(scripts)
        self.rng = rng or random.Random()
        self.post = post
        self._edited_already: set[str] = set()

    def script_for(self, email: str) -> Optional[AuthorScript]:
        for pattern, script in self.scripts.items():
            if pattern == email or fnmatch(email, pattern):
                return script
        return None

    def choose_action(self, script: AuthorScript, email: str) -> str:
        if script.policy is ScriptPolicy.ALWAYS_VALIDATE:
            return "validate"
        if script.policy is ScriptPolicy.ALWAYS_REJECT:
            return "reject"
        if script.policy is ScriptPolicy.IGNORE_ALL:
            return "ignore"
        if script.policy is ScriptPolicy.EDIT_THEN_VALIDATE:
            if email in self._edited_already:
                return "validate"
            self._edited_already.add(email)
            return "edit"
        draw = self.rng.random()
        if draw < script.p_validate:
            return "validate"
        if draw < script.p_validate + script.p_edit:
            return "edit"
        if draw < script.p_validate + script.p_edit + script.p_reject:
            return "reject"
        return "ignore"

    def answer(self, message: AuthorMessage) -> str:
        script = self.script_for(message.recipient.email)
        if script is None:
            log.warning("no script for %s; ignoring message", message.recipient.email)
            return "ignore"
        action = self.choose_action(script, message.recipient.email)
        body: dict = {"action": action}
        if action == "edit":
            body["edited"] = [
                mention_to_dict(apply_edit(script.edit_transform, m))
                for m in message.mentions
            ]
        # ignore is an explicit click in the rendered message, so POST it too
        response = self.post(message.action_url(action), body)
        status = getattr(response, "status_code", None)
        if status is not None and status >= 400:
            log.warning("action %s on %s rejected with %s", action, message.message_id, status)
        return action

    def run(self, mail: MailChannel) -> int:
        """Answer every unhandled message once; returns the action count."""
        count = 0
        while True:
            message = mail.next_unhandled()
            if message is None:
                return count
            mail.mark_handled(message.message_id)
            self.answer(message)
            count += 1
