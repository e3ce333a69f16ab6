"""Flat key/value run configuration with command-line overrides.

Lines look like ``policy.threshold = 90``; ``#`` starts a comment. Any
key can be overridden with ``--set key=value`` and the config path can
come from the MENTION_NOTIFY_CONFIG environment variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .authors import AuthorScript, ScriptPolicy, parse_script
from .delivery import RetryPolicy
from .registry import SendPolicy

ACTOR_NAMES = ("aggregator", "repository", "archive", "dashboard")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    host: str = "127.0.0.1"
    seed: int = 42
    corpus_path: Path = Path("fixtures/corpus.json")
    run_dir: Path = Path("run")
    ports: dict[str, int] = field(
        default_factory=lambda: {name: 0 for name in ACTOR_NAMES}
    )
    policy: SendPolicy = field(default_factory=SendPolicy)
    institution_domain: str = "oru.example.org"
    inbox_path: str = "/inbox/"
    scripts: dict[str, AuthorScript] = field(
        default_factory=lambda: {"*": AuthorScript(ScriptPolicy.ALWAYS_VALIDATE)}
    )
    edit_transform: str = "append-version"
    sweep_interval: float = 0.05
    retry: RetryPolicy = field(default_factory=lambda: RetryPolicy(max_attempts=3, base_delay=0.05))
    expiry: Optional[float] = None

    def validate(self) -> None:
        bound = [p for p in self.ports.values() if p != 0]
        if len(bound) != len(set(bound)):
            raise ConfigError("ports must be distinct")
        problems = self.policy.problems()
        if problems:
            raise ConfigError("; ".join(problems))
        for pattern, script in self.scripts.items():
            errors = script.problems()
            if errors:
                raise ConfigError(f"script.{pattern}: " + "; ".join(errors))


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_number(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def parse_pairs(text: str) -> list[tuple[str, str]]:
    pairs = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {number}: expected key = value")
        pairs.append((key.strip(), value.strip()))
    return pairs


def build_config(pairs: list[tuple[str, str]], base_dir: Path = Path(".")) -> RunConfig:
    config = RunConfig()
    scripts: dict[str, AuthorScript] = {}
    policy = {}
    retry = {}
    for key, value in pairs:
        if key == "host":
            config.host = value
        elif key == "seed":
            config.seed = int(_parse_number(value, key))
        elif key == "corpus":
            config.corpus_path = (base_dir / value).resolve() if not Path(value).is_absolute() else Path(value)
        elif key == "run_dir":
            config.run_dir = (base_dir / value).resolve() if not Path(value).is_absolute() else Path(value)
        elif key.startswith("port."):
            actor = key.removeprefix("port.")
            if actor not in ACTOR_NAMES:
                raise ConfigError(f"{key}: unknown actor (expected one of {', '.join(ACTOR_NAMES)})")
            config.ports[actor] = int(_parse_number(value, key))
        elif key == "policy.auto_send":
            policy["auto_send"] = _parse_bool(value, key)
        elif key == "policy.high_confidence_only":
            policy["high_confidence_only"] = _parse_bool(value, key)
        elif key == "policy.threshold":
            policy["threshold"] = _parse_number(value, key)
        elif key == "policy.max_authors_per_institution":
            policy["max_authors_per_institution"] = int(_parse_number(value, key))
        elif key == "institution.domain":
            config.institution_domain = value
        elif key == "inbox.path":
            config.inbox_path = value if value.startswith("/") else f"/{value}"
        elif key.startswith("script."):
            pattern = key.removeprefix("script.")
            try:
                scripts[pattern] = parse_script(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
        elif key == "edit.transform":
            config.edit_transform = value
        elif key == "sweep.interval":
            config.sweep_interval = _parse_number(value, key)
        elif key == "retry.max_attempts":
            retry["max_attempts"] = int(_parse_number(value, key))
        elif key == "retry.base_delay":
            retry["base_delay"] = _parse_number(value, key)
        elif key == "expiry":
            config.expiry = None if value.lower() in ("none", "") else _parse_number(value, key)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    if policy:
        config.policy = SendPolicy(**{**config.policy.__dict__, **policy})
    if retry:
        config.retry = RetryPolicy(**{**config.retry.__dict__, **retry})
    if scripts:
        config.scripts = scripts
    if config.edit_transform:
        config.scripts = {
            pattern: AuthorScript(
                script.policy,
                script.p_validate,
                script.p_edit,
                script.p_reject,
                edit_transform=config.edit_transform,
            )
            for pattern, script in config.scripts.items()
        }
    config.validate()
    return config


def load_config(path: Path, overrides: Optional[list[str]] = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    pairs = parse_pairs(path.read_text(encoding="utf-8"))
    for item in overrides or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r}: expected key=value")
        pairs.append((key.strip(), value.strip()))
    return build_config(pairs, base_dir=path.parent)
