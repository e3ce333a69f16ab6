"""The serve subcommand keeps a stack up for external consoles."""

from __future__ import annotations

import json
import signal
import subprocess
import sys

import requests

from conftest import FIXTURES

REPO_ROOT = FIXTURES.parent


def test_serve_boots_and_answers(tmp_path):
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "mention_notify.cli",
            "serve",
            "--config",
            str(REPO_ROOT / "demo.config"),
            "--set",
            f"run_dir={tmp_path / 'run'}",
            "--set",
            "policy.auto_send=false",
        ],
        cwd=REPO_ROOT,
        stdout=subprocess.PIPE,
        stderr=subprocess.DEVNULL,
        text=True,
    )
    try:
        urls = json.loads(proc.stdout.readline())
        assert set(urls) == {"dashboard", "aggregator", "repository", "archive"}
        tallies = requests.get(urls["dashboard"] + "/api/tallies").json()
        assert tallies == {"ready": 20, "sent": 0, "responded": 0, "cancelled": 0}
        # CORS headers let a browser console on another origin talk to it
        preflight = requests.options(urls["dashboard"] + "/api/tallies")
        assert preflight.headers.get("Access-Control-Allow-Origin") == "*"
        inbox_root = requests.get(urls["repository"] + "/")
        assert "inbox" in inbox_root.json()
    finally:
        proc.send_signal(signal.SIGINT)
        assert proc.wait(timeout=10) == 0
