"""Label store durability, triage queue order, and round mechanics."""

import json
import time

import numpy as np
import pytest

from burnscan.ingest import ingest_ledger, parse_tx
from burnscan.looper import (
    EmptyPool,
    IllegalBurnLabel,
    LabelConflict,
    LabelRecord,
    LabelStore,
    RoundActive,
    TriageItem,
    TriageQueue,
    TriageSession,
    UnknownAddress,
    build_initial_set,
    highlight_spans,
    run_loop,
    source_for_round,
    training_sets,
)
from burnscan.synth import forge_body, low_entropy_spender, make_regular_address

from .test_addrcodec import NAMED_BURNS


def record(address, label="burn", source="manual", round=0, annotator="ann"):
    return LabelRecord(
        address=address,
        label=label,
        source=source,
        round=round,
        annotator=annotator,
        timestamp=time.time(),
    )


class TestLabelStore:
    def test_append_and_replay(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            store.append(record("addr1", "burn"))
            store.append(record("addr2", "regular"))
        with LabelStore(path) as store:
            assert len(store) == 2
            assert store.active("addr1").label == "burn"
            assert store.active("addr2").label == "regular"

    def test_relabel_keeps_history(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            store.append(record("addr1", "burn", annotator="a"))
            store.append(record("addr1", "regular", annotator="b"))
            assert store.active("addr1").label == "regular"
            assert [r.label for r in store.history("addr1")] == ["burn", "regular"]

    def test_unknown_label_rejected(self, tmp_path):
        with LabelStore(tmp_path / "labels.log") as store:
            with pytest.raises(ValueError, match="unknown label"):
                store.append(record("addr1", "banana"))

    def test_torn_tail_truncated(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            store.append(record("addr1"))
            store.append(record("addr2"))
        blob = path.read_bytes()
        path.write_bytes(blob + b"deadbeef:{\"addr")  # torn write, no newline
        with LabelStore(path) as store:
            assert len(store) == 2
        assert path.read_bytes() == blob  # tail gone from disk too

    def test_corrupt_line_stops_replay(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            store.append(record("addr1"))
            good = path.read_bytes()
            store.append(record("addr2"))
        blob = bytearray(path.read_bytes())
        blob[len(good) + 12] ^= 0xFF  # flip a byte inside the second body
        path.write_bytes(bytes(blob))
        with LabelStore(path) as store:
            assert len(store) == 1
            assert store.active("addr2") is None
        assert path.read_bytes() == good

    def test_append_after_truncated_reopen(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            store.append(record("addr1"))
        path.write_bytes(path.read_bytes() + b"garbage")
        with LabelStore(path) as store:
            store.append(record("addr2"))
        with LabelStore(path) as store:
            assert [r.address for r in store.records()] == ["addr1", "addr2"]

    def test_compact_drops_history(self, tmp_path):
        path = tmp_path / "labels.log"
        with LabelStore(path) as store:
            for label in ("burn", "regular", "other"):
                store.append(record("addr1", label))
            store.append(record("addr2", "burn"))
            before = path.stat().st_size
            store.compact()
            after = path.stat().st_size
            assert after < before
            assert len(store) == 2
            assert store.active("addr1").label == "other"
            assert len(store.history("addr1")) == 1
            store.append(record("addr3", "regular"))
        with LabelStore(path) as store:
            assert {a for a, _ in store.active_items()} == {"addr1", "addr2", "addr3"}


class TestHighlights:
    def test_run_span(self):
        spans = highlight_spans("1QQQQQQab")
        runs = [s for s in spans if s["kind"] == "run"]
        assert runs == [{"start": 1, "end": 7, "kind": "run", "text": "QQQQQQ"}]

    def test_word_span_case_insensitive(self):
        spans = highlight_spans("1LoveForever2")
        words = [(s["text"], s["start"], s["end"]) for s in spans if s["kind"] == "word"]
        assert ("Love", 1, 5) in words
        assert ("Forever", 5, 12) in words

    def test_short_runs_and_words_ignored(self):
        assert highlight_spans("1abQQQ2") == []  # run of 3, no 4-letter word

    def test_spans_sorted(self):
        spans = highlight_spans("1HelpXXXXXLove")
        starts = [s["start"] for s in spans]
        assert starts == sorted(starts)


class TestQueue:
    def item(self, addr, score, round=1):
        return TriageItem(
            address=addr, scheme="base58", score=score, round=round,
            stats=None, context_txids=[], highlights=[],
        )

    def test_order_score_desc_then_address(self):
        q = TriageQueue([self.item("b", 0.5), self.item("a", 0.5), self.item("c", 0.9)])
        assert q.addresses() == ["c", "a", "b"]
        assert q.next().address == "c"

    def test_merge_updates_existing(self):
        q = TriageQueue([self.item("a", 0.2)])
        q.merge([self.item("a", 0.8, round=2), self.item("b", 0.5)])
        assert q.addresses() == ["a", "b"]
        assert q.get("a").round == 2
        assert len(q) == 2

    def test_remove_and_empty_next(self):
        q = TriageQueue([self.item("a", 0.2)])
        q.remove("a")
        q.remove("a")  # idempotent
        assert q.next() is None
        assert "a" not in q

    def test_page(self):
        q = TriageQueue([self.item(c, s) for c, s in [("a", 0.1), ("b", 0.9), ("c", 0.5)]])
        assert [i.address for i in q.page(0, 2)] == ["b", "c"]
        assert [i.address for i in q.page(2, 2)] == ["a"]


def tx(txid_byte, ts, inputs, outputs, height=1):
    return parse_tx({
        "txid": f"{txid_byte:02x}" * 32,
        "blockHeight": height,
        "timestamp": ts,
        "inputs": inputs,
        "outputs": outputs,
    })


def build_world(seed=0, n_burn=8, n_hidden=4, n_spenders=10, n_random=20):
    """A small ledger world: low-entropy burns, wordy burns above the
    screen, structured spenders, and random traffic."""
    rng = np.random.default_rng(seed)
    # distinct salt per burn; a bare X-run plus X padding would forge every
    # draw onto the same one or two addresses
    salts = [f"{a}{b}" for a in "abcdef" for b in "abcdef"]
    burns = [
        forge_body("X" * int(rng.integers(14, 20)) + salts[i], rng, pad="X")
        for i in range(n_burn)
    ]

    from burnscan.addrcodec import shannon_entropy
    from burnscan.words import base58_word

    word_pool = ["love", "forever", "lucky", "happy", "magic", "dream", "brave", "grand"]
    hidden = []
    while len(hidden) < n_hidden:
        picks = rng.choice(word_pool, size=4, replace=False)
        content = "".join(base58_word(str(w)) for w in picks)[:25]
        addr = forge_body(content, rng, pad="x")
        if shannon_entropy(addr) >= 4.05 and addr not in hidden:
            hidden.append(addr)
    spenders = [low_entropy_spender(rng) for _ in range(n_spenders)]
    randoms = [make_regular_address(rng) for _ in range(n_random)]
    funder = make_regular_address(rng)

    txs = [tx(0, 500, [], [[funder, 10_000_000]])]
    t = 1000
    for i, addr in enumerate(dict.fromkeys(burns + hidden)):
        txs.append(tx(i + 1, t, [[funder, 600]], [[addr, 600]]))
        t += 10
    for i, addr in enumerate(dict.fromkeys(spenders)):
        txs.append(tx(100 + 2 * i, t, [[funder, 900]], [[addr, 900]]))
        txs.append(tx(101 + 2 * i, t + 5, [[addr, 900]], [[funder, 900]]))
        t += 10
    for i, addr in enumerate(dict.fromkeys(randoms)):
        txs.append(tx(200 + i, t, [[funder, 700]], [[addr, 700]]))
        t += 10
    table = ingest_ledger(txs)
    return table, list(dict.fromkeys(burns)), list(dict.fromkeys(hidden)), spenders


TRAIN_KW = {"hidden_units": 16, "max_epochs": 80}


class TestInitialSet:
    def test_threshold_strict_and_sorted(self, tmp_path):
        table, burns, hidden, spenders = build_world()
        cands = build_initial_set(table)
        got = [c.address for c in cands]
        for b in burns:
            assert b in got
        for h in hidden:
            assert h not in got  # wordy bodies sit above the screen
        entropies = [c.entropy for c in cands]
        assert entropies == sorted(entropies)
        assert all(c.entropy < 4.0 for c in cands)

    def test_never_spent_flag(self):
        table, burns, hidden, spenders = build_world()
        flags = {c.address: c.never_spent for c in build_initial_set(table)}
        for b in burns:
            assert flags[b] is True
        for s in spenders:
            if s in flags:
                assert flags[s] is False

    def test_sixteen_distinct_chars_sit_on_the_boundary(self):
        # 16 equally frequent symbols give exactly 4.0 bits; strictly-below
        # means such an address must not enter the initial set
        from burnscan.addrcodec import shannon_entropy
        text = "123456789ABCDEFG"
        assert shannon_entropy(text) == 4.0
        cands = build_initial_set(StatsTableStub([text]))
        assert cands == []


class StatsTableStub:
    """Tiny stand-in with the iteration surface build_initial_set needs."""

    def __init__(self, addresses):
        from burnscan.ingest import AddressStats
        from burnscan.addrcodec import Scheme
        self._rows = [
            AddressStats(a, Scheme.BASE58, 0, 0, 1, 1, 0) for a in addresses
        ]

    def __iter__(self):
        return iter(self._rows)


class TestSession:
    def make_session(self, tmp_path, **kwargs):
        table, burns, hidden, spenders = build_world()
        store = LabelStore(tmp_path / "labels.log")
        session = TriageSession(
            table, store, train_kwargs=TRAIN_KW,
            state_path=tmp_path / "state.json", **kwargs,
        )
        session.load_initial_corpus(build_initial_set(table))
        return session, table, burns, hidden, spenders

    def seed_labels(self, session, burns):
        """Label the initial queue truthfully: burns burn, the rest regular."""
        while len(session.queue):
            item = session.queue.next()
            label = "burn" if item.address in burns else "regular"
            session.submit_label(item.address, label, "seed")

    def test_initial_queue_round_zero(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        item = session.queue.next()
        assert item.round == 0
        assert 0.0 < item.score <= 1.0

    def test_label_source_attribution(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        queued = session.queue.next().address
        rec = session.submit_label(queued, "regular" if queued not in burns else "burn", "a")
        assert rec.source == source_for_round(0) == "initial-entropy-set"
        rec2 = session.submit_label(hidden[0], "burn", "a")
        assert rec2.source == "manual"

    def test_unknown_address(self, tmp_path):
        session, *_ = self.make_session(tmp_path)
        with pytest.raises(UnknownAddress):
            session.submit_label(NAMED_BURNS[0], "burn", "a")

    def test_burn_label_needs_zero_sent(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        with pytest.raises(IllegalBurnLabel):
            session.submit_label(spenders[0], "burn", "a")

    def test_conflict_only_across_annotators(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        addr = burns[0]
        session.submit_label(addr, "burn", "alice", fail_on_conflict=True)
        # same annotator may revise
        session.submit_label(addr, "vanity-suspect", "alice", fail_on_conflict=True)
        with pytest.raises(LabelConflict):
            session.submit_label(addr, "burn", "bob", fail_on_conflict=True)
        # and without the flag the new label simply wins
        rec = session.submit_label(addr, "burn", "bob")
        assert rec.label == "burn"
        assert session.store.active(addr).annotator == "bob"

    def test_labeling_paused_during_round(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        session._round_running = True
        with pytest.raises(RoundActive):
            session.submit_label(burns[0], "burn", "a")
        session._round_running = False

    def test_concurrent_round_rejected(self, tmp_path):
        session, *_ = self.make_session(tmp_path)
        assert session._round_lock.acquire(blocking=False)
        try:
            with pytest.raises(RoundActive):
                session.run_round(seed=1)
        finally:
            session._round_lock.release()

    def test_round_trains_and_reports(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        self.seed_labels(session, set(burns))
        report = session.run_round(seed=3)
        assert report.round == 1
        assert report.predicted == report.pending + report.confirmed + report.rejected
        assert report.new_tp == 0  # nothing confirmed yet
        for item in session.queue.page(0, 50):
            assert item.round == 1
            assert session.stats.get(item.address).total_sent == 0

    def test_new_tp_counts_only_this_round(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        self.seed_labels(session, set(burns))
        report = session.run_round(seed=3)
        found = [i.address for i in session.queue.page(0, 100) if i.round == 1]
        confirmed = 0
        for addr in found:
            if addr in hidden:
                session.submit_label(addr, "burn", "a")
                confirmed += 1
            else:
                session.submit_label(addr, "regular", "a")
        live = session.round_report(1)
        assert live.new_tp == confirmed
        assert live.confirmed == confirmed
        assert live.pending == 0

    def test_empty_pool_raises(self, tmp_path):
        store = LabelStore(tmp_path / "labels.log")
        from burnscan.looper import run_round as plain_round
        with pytest.raises(EmptyPool):
            plain_round(store, {}, seed=0)

    def test_training_sets_regular_frozen(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        self.seed_labels(session, set(burns))
        session.submit_label(hidden[0], "burn", "a")     # manual confirm
        burn_set, regular_set = training_sets(session.store)
        assert hidden[0] in burn_set
        # a regular label outside the initial set must not grow the class
        outsider = next(
            a for a in session.pool
            if session.store.active(a) is None
        )
        session.submit_label(outsider, "regular", "a")
        _, regular_after = training_sets(session.store)
        assert regular_after == regular_set

    def test_state_survives_restart(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        self.seed_labels(session, set(burns))
        session.run_round(seed=3)
        queued_before = session.queue.addresses()
        session.store.close()

        store2 = LabelStore(tmp_path / "labels.log")
        session2 = TriageSession(
            table, store2, train_kwargs=TRAIN_KW, state_path=tmp_path / "state.json"
        )
        assert session2.queue.addresses() == queued_before
        assert session2.current_round == 1
        assert session2.round_report(1).predicted == session.round_report(1).predicted

    def test_run_loop_drains_and_convergence_flag(self, tmp_path):
        session, table, burns, hidden, spenders = self.make_session(tmp_path)
        self.seed_labels(session, set(burns))
        truth = set(burns) | set(hidden)

        def annotator(item):
            return "burn" if item.address in truth else "regular"

        reports = run_loop(session, annotator, seed=11, max_rounds=4)
        assert reports
        assert len(session.queue) == 0
        assert reports[-1].new_tp == 0
        assert session.converged
        confirmed = {
            a for a, r in session.store.active_items() if r.label == "burn"
        }
        assert confirmed <= truth
