"""Ledger ingestion tests against hand-computed aggregates."""

import json

import pytest

from burnscan.addrcodec import Scheme
from burnscan.ingest import (
    STATS_COLUMNS,
    MalformedRecord,
    SchemaMismatch,
    StatsTable,
    candidate_pool,
    ingest_ledger,
    iter_ledger,
    load_stats,
    merge_stats,
    parse_tx,
    save_stats,
)

from .test_addrcodec import BECH32_REAL, NAMED_BURNS

A, B, C = NAMED_BURNS[0], NAMED_BURNS[1], NAMED_BURNS[2]
W = BECH32_REAL[0]


def tx(txid_byte, ts, inputs, outputs, height=100):
    return {
        "txid": f"{txid_byte:02x}" * 32,
        "blockHeight": height,
        "timestamp": ts,
        "inputs": inputs,
        "outputs": outputs,
    }


def write_ledger(path, txs):
    path.write_text("".join(json.dumps(t) + "\n" for t in txs))


FIXTURE = [
    tx(1, 1000, [], [[A, 50], [B, 30]]),          # coinbase-style
    tx(2, 2000, [[A, 20]], [[C, 20]]),
    tx(3, 3000, [[A, 30], [B, 5]], [[W, 35]]),
    tx(4, 4000, [], [[A, 7]]),
]
# hand sums: A received 57 sent 50, 4 txs, first 1000 last 4000
#            B received 30 sent 5, 2 txs; C received 20; W received 35


class TestParse:
    def test_parse_valid(self):
        parsed = parse_tx(FIXTURE[0])
        assert parsed.txid == "01" * 32
        assert parsed.inputs == ()
        assert parsed.outputs == ((A, 50), (B, 30))

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda t: t.pop("txid"),
            lambda t: t.update(txid="short"),
            lambda t: t.update(blockHeight=-1),
            lambda t: t.update(blockHeight="12"),
            lambda t: t.update(timestamp=-5),
            lambda t: t.update(inputs={"a": 1}),
            lambda t: t.update(outputs=[[A]]),
            lambda t: t.update(outputs=[[A, -1]]),
            lambda t: t.update(outputs=[[A, 1.5]]),
        ],
    )
    def test_malformed_rejected(self, mangle):
        bad = {k: (list(v) if isinstance(v, list) else v) for k, v in tx(9, 1, [], []).items()}
        bad["outputs"] = [[A, 5]]
        mangle(bad)
        with pytest.raises(MalformedRecord):
            parse_tx(bad)


class TestIngest:
    def test_hand_summed_fixture(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        table = ingest_ledger(path)
        a = table.get(A)
        assert (a.total_received, a.total_sent, a.tx_count) == (57, 50, 4)
        assert (a.first_apparition, a.last_apparition) == (1000, 4000)
        b = table.get(B)
        assert (b.total_received, b.total_sent, b.tx_count) == (30, 5, 2)
        assert table.get(C).total_received == 20
        assert table.get(W).scheme is Scheme.BECH32
        assert table.summary.txs == 4

    def test_conservation_exact(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        table = ingest_ledger(path)
        table.assert_conservation()
        assert table.total_received() == table.summary.sum_outputs == 142
        assert table.total_sent() == table.summary.sum_inputs == 55

    def test_idempotent(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        t1 = ingest_ledger(path)
        t2 = ingest_ledger(path)
        assert {r.address: vars(r) for r in t1} == {r.address: vars(r) for r in t2}

    def test_accepts_parsed_iterable(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        from_path = ingest_ledger(path)
        from_iter = ingest_ledger([parse_tx(t) for t in FIXTURE])
        assert {r.address for r in from_path} == {r.address for r in from_iter}

    def test_malformed_lines_skipped_and_counted(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        lines = [json.dumps(FIXTURE[0]), "{not json", json.dumps(FIXTURE[1]),
                 json.dumps({"txid": "nope"})]
        path.write_text("\n".join(lines) + "\n")
        table = ingest_ledger(path)
        assert table.summary.txs == 2
        assert table.summary.malformed_records == 2

    def test_strict_reader_raises_with_line_number(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        path.write_text(json.dumps(FIXTURE[0]) + "\n{broken\n")
        with pytest.raises(MalformedRecord, match="line 2"):
            list(iter_ledger(path))

    def test_bad_addresses_skipped_not_fatal(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        txs = [tx(1, 1000, [], [[A, 5], ["1TotallyBogusChecksumAAAAAAAAAAAAA", 9]])]
        write_ledger(path, txs)
        table = ingest_ledger(path)
        assert table.summary.skipped_entries == 1
        assert A in table
        assert len(table) == 1
        # conservation holds over accepted legs only
        table.assert_conservation()

    def test_non_monotone_timestamps_counted(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        txs = [tx(1, 5000, [], [[A, 1]]), tx(2, 1000, [], [[A, 2]]), tx(3, 9000, [], [[A, 3]])]
        write_ledger(path, txs)
        table = ingest_ledger(path)
        assert table.summary.non_monotone_timestamps == 1
        a = table.get(A)
        assert a.first_apparition == 1000
        assert a.last_apparition == 9000

    def test_tx_count_once_per_tx(self, tmp_path):
        # same address on both sides and twice in outputs: one tx, count 1
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, [tx(1, 100, [[A, 10]], [[A, 4], [A, 6]])])
        table = ingest_ledger(path)
        assert table.get(A).tx_count == 1
        assert table.get(A).total_received == 10
        assert table.get(A).total_sent == 10

    def test_context_map(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        table, context = ingest_ledger(path, context_limit=2)
        assert context[A] == ["01" * 32, "02" * 32]
        assert len(context[A]) == 2  # capped

    def test_candidate_pool_is_never_spent_only(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        write_ledger(path, FIXTURE)
        pool = candidate_pool(ingest_ledger(path))
        assert set(pool) == {C, W}


class TestMergeAndCsv:
    def test_merge_equals_single_pass(self, tmp_path):
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_ledger(p1, FIXTURE[:2])
        write_ledger(p2, FIXTURE[2:])
        merged = merge_stats(ingest_ledger(p1), ingest_ledger(p2))
        full = tmp_path / "full.jsonl"
        write_ledger(full, FIXTURE)
        whole = ingest_ledger(full)
        assert {r.address: vars(r) for r in merged} == {r.address: vars(r) for r in whole}
        merged.assert_conservation()

    def test_csv_roundtrip(self, tmp_path):
        full = tmp_path / "full.jsonl"
        write_ledger(full, FIXTURE)
        table = ingest_ledger(full)
        out = tmp_path / "stats.csv"
        save_stats(table, out)
        back = load_stats(out)
        assert {r.address: vars(r) for r in back} == {r.address: vars(r) for r in table}

    def test_csv_header_exact(self, tmp_path):
        out = tmp_path / "stats.csv"
        save_stats(StatsTable(), out)
        header = out.read_text().splitlines()[0]
        assert header.split(",") == list(STATS_COLUMNS)

    def test_schema_mismatch_rejected(self, tmp_path):
        out = tmp_path / "bad.csv"
        out.write_text("address,first apparition,last apparition,txs,total received,total sent\n")
        with pytest.raises(SchemaMismatch, match="txs"):
            load_stats(out)

    def test_bad_row_rejected(self, tmp_path):
        out = tmp_path / "bad.csv"
        out.write_text(
            ",".join(STATS_COLUMNS) + "\n" + f"{A},notanint,2,3,4,5\n"
        )
        with pytest.raises(SchemaMismatch):
            load_stats(out)
