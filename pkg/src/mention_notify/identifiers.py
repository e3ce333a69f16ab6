"""Identifier helpers: urn:uuid notification ids and swh-style persistent ids."""

from __future__ import annotations

import hashlib
import random
import re
import uuid
from dataclasses import dataclass
from typing import Callable

URN_UUID_RE = re.compile(
    r"^urn:uuid:[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$"
)

SWHID_RE = re.compile(r"^swh:1:(dir|rev|snp):[0-9a-f]{40}$")

# Type of a notification-id provider: every call yields a fresh urn:uuid string.
IdSource = Callable[[], str]


def is_urn_uuid(value: str) -> bool:
    return bool(URN_UUID_RE.match(value))


def random_urn() -> str:
    """A fresh urn:uuid id from the system RNG."""
    return f"urn:uuid:{uuid.uuid4()}"


class SeededIds:
    """Deterministic urn:uuid provider for reproducible runs.

    Draws 128-bit values from a seeded PRNG and shapes them into
    RFC-4122 version-4 uuids, so equal seeds yield equal id streams.
    """

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def __call__(self) -> str:
        value = uuid.UUID(int=self._rng.getrandbits(128), version=4)
        return f"urn:uuid:{value}"


@dataclass(frozen=True)
class PersistentIdentifier:
    """Archive-minted identifier, rendered as ``swh:1:<object_type>:<hash>``."""

    hash_hex: str
    object_type: str = "dir"
    scheme: str = "swh"
    version: int = 1

    def __post_init__(self):
        if self.object_type not in ("dir", "rev", "snp"):
            raise ValueError(f"unknown object type: {self.object_type!r}")
        if not re.fullmatch(r"[0-9a-f]{40}", self.hash_hex):
            raise ValueError("hash_hex must be 40 lowercase hex chars")

    def render(self) -> str:
        return f"{self.scheme}:{self.version}:{self.object_type}:{self.hash_hex}"

    @classmethod
    def parse(cls, text: str) -> "PersistentIdentifier":
        if not SWHID_RE.match(text):
            raise ValueError(f"not a valid persistent identifier: {text!r}")
        _, _, object_type, hash_hex = text.split(":")
        return cls(hash_hex=hash_hex, object_type=object_type)


def mint_pid(canonical_citation: bytes, repository_link: str) -> PersistentIdentifier:
    """Deterministic dir-type identifier over a citation plus its repo link.

    Same input bytes and link always produce the same identifier; the hash is
    SHA-1 of the canonical citation serialization, a newline, and the link.
    """
    digest = hashlib.sha1(
        canonical_citation + b"\n" + repository_link.encode("utf-8")
    ).hexdigest()
    return PersistentIdentifier(hash_hex=digest)
