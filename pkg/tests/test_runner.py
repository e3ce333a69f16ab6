"""Run-loop behavior: quiescence, expiry, mixed scripts, journalled inboxes."""

from __future__ import annotations

import requests

from mention_notify.authors import AuthorScript, ScriptPolicy
from mention_notify.config import RunConfig
from mention_notify.registry import MentionState, SendPolicy
from mention_notify.runner import Simulation

from conftest import FIXTURES


def config_for(tmp_path, **kwargs) -> RunConfig:
    defaults = dict(
        corpus_path=FIXTURES / "corpus.json",
        run_dir=tmp_path / "run",
        policy=SendPolicy(auto_send=True),
        scripts={"*": AuthorScript(ScriptPolicy.ALWAYS_VALIDATE)},
        sweep_interval=0.02,
    )
    defaults.update(kwargs)
    return RunConfig(**defaults)


def run_sim(config) -> tuple[Simulation, "RunStats"]:
    sim = Simulation(config)
    try:
        sim.start()
        sim.ingest()
        stats = sim.run_to_quiescence()
    finally:
        sim.stop()
    return sim, stats


def test_ignore_all_reaches_quiescence_with_open_offers(tmp_path):
    sim, stats = run_sim(
        config_for(tmp_path, scripts={"*": AuthorScript(ScriptPolicy.IGNORE_ALL)})
    )
    assert stats.states["Sent"] == 20
    assert stats.announces == 0
    assert not sim.mail.has_unhandled()


def test_expiry_cancels_ignored_offers(tmp_path):
    sim, stats = run_sim(
        config_for(
            tmp_path,
            scripts={"*": AuthorScript(ScriptPolicy.IGNORE_ALL)},
            expiry=0.0,
        )
    )
    assert stats.states["Cancelled"] == 20
    assert stats.states["Sent"] == 0


def test_auto_send_off_leaves_everything_ready(tmp_path):
    _, stats = run_sim(config_for(tmp_path, policy=SendPolicy(auto_send=False)))
    assert stats.states["Ready"] == 20
    assert stats.announces == 0


def test_mixed_scripts_by_email_pattern(tmp_path):
    scripts = {
        "m.sabou@oru.example.org": AuthorScript(ScriptPolicy.ALWAYS_REJECT),
        "*": AuthorScript(ScriptPolicy.ALWAYS_VALIDATE),
    }
    sim, stats = run_sim(config_for(tmp_path, scripts=scripts))
    # m.sabou receives the batched two-mention message for paper 3011
    assert stats.responses["Rejected"] == 2
    assert stats.responses["Validated"] == 18
    assert stats.states["Announced"] == 18
    assert stats.states["Responded"] == 2


def test_edit_scripts_produce_tentative_accepts(tmp_path):
    sim, stats = run_sim(
        config_for(tmp_path, scripts={"*": AuthorScript(ScriptPolicy.EDIT_THEN_VALIDATE)})
    )
    assert stats.states["Announced"] == 20
    assert stats.responses["Edited"] > 0
    edited = [
        r for r in sim.registry.records() if r.descriptor.citation.name.endswith(" v2")
    ]
    assert len(edited) == stats.responses["Edited"]


def test_custom_inbox_path_everywhere(tmp_path):
    config = config_for(tmp_path, inbox_path="/ldn/inbox/")
    sim, stats = run_sim(config)
    assert stats.states["Announced"] == 20
    assert sim.repository.endpoint.inbox.endswith("/ldn/inbox/")
    assert sim.aggregator.endpoint.inbox.endswith("/ldn/inbox/")


def test_inbox_journals_written_and_restartable(tmp_path):
    config = config_for(tmp_path)
    sim, stats = run_sim(config)
    archive_journal = config.run_dir / "inbox-archive.ndjson"
    assert archive_journal.exists()
    from mention_notify.inbox import Inbox

    reborn = Inbox(base_url=sim.archive_service.base_url, journal_path=archive_journal)
    assert len(reborn.entries()) == 20
    reborn.close()


def test_every_api_mutation_is_one_registry_transition(tmp_path):
    config = config_for(tmp_path, policy=SendPolicy(auto_send=False))
    sim = Simulation(config)
    try:
        sim.start()
        sim.ingest()
        log_lines = lambda: len(
            (config.run_dir / "registry.log").read_text().splitlines()
        )
        baseline = log_lines()
        api = f"{sim.dash_service.base_url}/api"
        keys = [r.key for r in sim.registry.records()]
        mutations = 0
        assert requests.post(f"{api}/mentions/{keys[0]}/approve").status_code == 200
        mutations += 1
        assert requests.post(f"{api}/mentions/{keys[1]}/cancel").status_code == 200
        mutations += 1
        # failed mutations must not grow the log
        assert requests.post(f"{api}/mentions/{keys[1]}/cancel").status_code == 409
        assert requests.post(f"{api}/mentions/zzz/approve").status_code == 404
        assert log_lines() == baseline + mutations
    finally:
        sim.stop()
