"""Command-line harness: run the simulation, seed, replay, and inspect."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .registry import CorruptLog, MentionRegistry
from .runner import Simulation, stats_for


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="run configuration file (falls back to $MENTION_NOTIFY_CONFIG)",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mention-notify",
        description="Software-mention validation workflow simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="boot all actors and run to quiescence"))
    _add_common(sub.add_parser("seed", help="ingest the corpus into a fresh registry log"))
    _add_common(sub.add_parser("replay", help="rebuild state from the registry log"))
    _add_common(sub.add_parser("stats", help="print tallies from the registry log"))
    serve = sub.add_parser(
        "serve", help="boot the stack, ingest, and stay up (for the console UI)"
    )
    _add_common(serve)
    return parser


def _fail(message: str) -> int:
    print(f"mention-notify: {message}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
    args = build_parser().parse_args(argv)
    config_path = args.config or os.environ.get("MENTION_NOTIFY_CONFIG")
    if not config_path:
        return _fail("no config given; pass --config or set MENTION_NOTIFY_CONFIG")
    try:
        config = load_config(Path(config_path), args.overrides)
    except ConfigError as exc:
        return _fail(str(exc))

    log_path = config.run_dir / "registry.log"

    if args.command in ("run", "seed", "serve") and not config.corpus_path.exists():
        return _fail(f"corpus not found: {config.corpus_path}")

    if args.command == "run":
        simulation = Simulation(config, fresh=True)
        try:
            simulation.start()
            simulation.ingest()
            stats = simulation.run_to_quiescence()
        finally:
            simulation.stop()
        print(stats.render())
        return 0

    if args.command == "serve":
        import json
        import time

        simulation = Simulation(config, fresh=True)
        try:
            simulation.start()
            simulation.ingest()
            print(
                json.dumps(
                    {
                        "dashboard": simulation.dash_service.base_url,
                        "aggregator": simulation.agg_service.base_url,
                        "repository": simulation.repo_service.base_url,
                        "archive": simulation.archive_service.base_url,
                    }
                ),
                flush=True,
            )
            while True:
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            simulation.stop()
        return 0

    if args.command == "seed":
        if log_path.exists():
            log_path.unlink()
        from .registry import load_corpus

        registry = MentionRegistry(log_path=log_path)
        registry.ingest(load_corpus(config.corpus_path))
        print(stats_for(registry).render())
        registry.close()
        return 0

    if not log_path.exists():
        return _fail(f"registry log not found: {log_path}")

    if args.command == "replay":
        try:
            registry = MentionRegistry.restore(log_path)
        except CorruptLog as exc:
            return _fail(f"registry log corrupt at {exc}")
        print(stats_for(registry).render())
        registry.close()
        return 0

    # stats: tolerant of a torn tail, reports what replays cleanly
    try:
        registry = MentionRegistry.restore(log_path)
    except CorruptLog as exc:
        print(f"mention-notify: warning: {exc}; showing replayable prefix", file=sys.stderr)
        registry = exc.registry
    print(stats_for(registry).render())
    registry.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
