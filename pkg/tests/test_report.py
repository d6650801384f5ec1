"""Economics and usage reporting against hand-built fixtures."""

import json

import numpy as np
import pytest

from burnscan.addrcodec import Scheme
from burnscan.ingest import AddressStats, parse_tx
from burnscan.report import (
    ENTROPY_BIN_EDGES,
    QUANTILE_LEVELS,
    EmptyBurnSet,
    burn_economics,
    economics_csv,
    extract_messages,
    format_text,
    nearest_rank,
    readability_score,
    report_json,
    strip_envelope,
    usage_breakdown,
)
from burnscan.synth import encode_message


class StatsStub:
    def __init__(self, amounts):
        self.rows = {
            addr: AddressStats(addr, Scheme.BASE58, 0, 0, 1, amount, 0)
            for addr, amount in amounts.items()
        }

    def get(self, addr):
        return self.rows.get(addr)


def tx(txid_byte, ts, outputs, inputs=()):
    return parse_tx({
        "txid": f"{txid_byte:02x}" * 32,
        "blockHeight": 1,
        "timestamp": ts,
        "inputs": [list(p) for p in inputs],
        "outputs": [list(p) for p in outputs],
    })


class TestNearestRank:
    def test_small_cases(self):
        assert nearest_rank([7], 0.5) == 7
        assert nearest_rank([1, 2, 3, 4], 0.5) == 2
        assert nearest_rank([1, 2, 3, 4], 0.51) == 3
        assert nearest_rank([1, 2, 3, 4], 0.99) == 4
        assert nearest_rank([1, 2, 3, 4], 0.01) == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            nearest_rank([], 0.5)


# the burn-amount distribution the quantile levels are checked against:
# half dust-threshold burns, a tail of round amounts, one whale
TABLE_AMOUNTS = [330] * 50 + [660] * 25 + [3000] * 15 + [10000] * 5 \
    + [313389] * 4 + [20_000_000]


class TestEconomics:
    def test_quantiles_exact(self):
        amounts = {f"addr{i:03d}": v for i, v in enumerate(TABLE_AMOUNTS)}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        assert econ.quantiles == {
            0.50: 330, 0.75: 660, 0.90: 3000, 0.95: 10000, 0.99: 313389,
        }
        assert econ.n_addresses == 100
        assert econ.total_burned == sum(TABLE_AMOUNTS)

    def test_top3_concentration(self):
        amounts = {"a": 66600, "b": 17600, "c": 15000, "d": 800}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        assert [p[0] for p in econ.per_address] == ["a", "b", "c", "d"]
        assert econ.top_share(3) == pytest.approx(0.992, abs=1e-12)
        assert econ.top_share(3) > 0.99
        assert econ.top_share(4) == pytest.approx(1.0)

    def test_order_ties_break_by_address(self):
        amounts = {"b": 100, "a": 100, "c": 500}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        assert [p[0] for p in econ.per_address] == ["c", "a", "b"]

    def test_btc_and_usd(self):
        amounts = {"a": 100_000}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        assert econ.total_btc == pytest.approx(0.001)
        assert econ.usd_value(50_000.0) == pytest.approx(50.0)

    def test_empty_and_missing(self):
        with pytest.raises(EmptyBurnSet):
            burn_economics([], StatsStub({}))
        with pytest.raises(KeyError, match="missing"):
            burn_economics(["ghost"], StatsStub({"a": 1}))

    def test_csv_order_and_header(self, tmp_path):
        amounts = {"a": 300, "b": 700}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        out = tmp_path / "econ.csv"
        economics_csv(econ, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "address,burned,share"
        assert lines[1].startswith("b,700,0.7")
        assert lines[2].startswith("a,300,0.3")


BURN_A = "1BurnAaaaaaaaaaaaaaaaaaaaaaaaaaaa"
BURN_B = "1BurnBbbbbbbbbbbbbbbbbbbbbbbbbbbb"
BURN_W = "bc1qburnwwwwwwwwwwwwwwwwwwwwwwwww"
REG = "1RegularSpenderAddressXXXXXXXXXXX"
FUNDER = "1FunderFunderFunderFunderFunderXX"

USAGE_TXS = [
    tx(1, 1000, [[BURN_A, 330]], inputs=[[FUNDER, 330]]),
    tx(2, 2000, [[BURN_B, 500], [BURN_W, 500], [REG, 100]], inputs=[[FUNDER, 1100]]),
    tx(3, 3000, [[BURN_A, 200], [BURN_A, 100]], inputs=[[FUNDER, 300]]),
    tx(4, 4000, [[REG, 50]], inputs=[[FUNDER, 50]]),
]


class TestUsage:
    def test_breakdown_fixture(self):
        usage = usage_breakdown([BURN_A, BURN_B, BURN_W], USAGE_TXS)
        assert usage.scheme_counts == {"base58": 2, "bech32": 1}
        # A never shares; B and W share tx 2
        assert usage.solo_fraction == pytest.approx(1 / 3)
        # duplicate outputs of one address count as a single burn in a tx
        assert usage.tx_burn_counts == {1: 2, 2: 1}
        assert usage.population == 5

    def test_ecdf_shape(self):
        usage = usage_breakdown([BURN_A, BURN_B, BURN_W], USAGE_TXS)
        assert usage.ecdf == ((1000, pytest.approx(1 / 3)), (2000, pytest.approx(1.0)))
        fractions = [f for _, f in usage.ecdf]
        assert fractions == sorted(fractions)
        assert fractions[-1] == pytest.approx(1.0)

    def test_entropy_histogram_conserves(self):
        usage = usage_breakdown([BURN_A], USAGE_TXS)
        assert sum(usage.entropy_histogram) == usage.population
        assert len(usage.entropy_histogram) == len(ENTROPY_BIN_EDGES) - 1

    def test_no_burns_seen(self):
        usage = usage_breakdown(["1NotInLedger"], USAGE_TXS)
        assert usage.solo_fraction == 0.0
        assert usage.ecdf == ()
        assert usage.scheme_counts == {}


class TestEnvelope:
    def test_strip_base58(self):
        assert strip_envelope("1abcdefgHIJKLM") == "abcdefg"
        assert strip_envelope("1abcdefgHIJKLM", trailing=0) == "abcdefgHIJKLM"

    def test_strip_bech32(self):
        assert strip_envelope("bc1qabcdefgh012345") == "qabcdefgh"

    def test_readability(self):
        assert readability_score("") == 0.0
        assert readability_score("LoveForever") == pytest.approx(1.0)
        assert readability_score("LoveZZZZ") == pytest.approx(0.5)
        assert readability_score("QQQQQQQQ") == 0.0


class TestMessages:
    def build_message_tx(self, words, txid_byte=9):
        rng = np.random.default_rng(40)
        addrs, camel = encode_message(words, rng)
        assert len(addrs) >= 2, "fixture needs a multi-address message"
        outputs = [[a, 330] for a in addrs]
        return tx(txid_byte, 5000, outputs, inputs=[[FUNDER, 330 * len(addrs)]]), addrs, camel

    def test_multi_address_message_extracted(self):
        message_tx, addrs, camel = self.build_message_tx(
            ["happy", "birthday", "love", "forever", "friend", "smile", "heaven"]
        )
        found = extract_messages([message_tx], addrs)
        assert len(found) == 1
        msg = found[0]
        assert msg.addresses == tuple(addrs)
        # every chunk appears in order inside the stitched payload
        pos = -1
        for addr in addrs:
            frag = strip_envelope(addr).rstrip("x")
            nxt = msg.payload.find(frag, pos + 1)
            assert nxt > pos, (frag, msg.payload)
            pos = nxt
        assert camel.startswith(msg.payload[: len(camel) // 2].rstrip("x")[:4])
        assert msg.readability > 0.6

    def test_single_burn_tx_excluded(self):
        found = extract_messages(USAGE_TXS, [BURN_A])
        assert found == []

    def test_order_preserved(self):
        message_tx, addrs, camel = self.build_message_tx(
            ["happy", "birthday", "love", "forever", "friend", "smile", "heaven"]
        )
        reversed_tx = tx(8, 6000, [[a, 330] for a in reversed(addrs)],
                         inputs=[[FUNDER, 330 * len(addrs)]])
        forward = extract_messages([message_tx], addrs)[0]
        backward = extract_messages([reversed_tx], addrs)[0]
        assert forward.payload != backward.payload
        assert backward.addresses == tuple(reversed(addrs))

    def test_readability_ranks_text_above_noise(self):
        message_tx, addrs, camel = self.build_message_tx(
            ["happy", "birthday", "love", "forever", "friend", "smile", "heaven"]
        )
        noise_tx = tx(7, 7000, [[BURN_A, 1], [BURN_B, 1]], inputs=[[FUNDER, 2]])
        msgs = extract_messages([message_tx, noise_tx], list(addrs) + [BURN_A, BURN_B])
        scored = {m.txid: m.readability for m in msgs}
        assert scored["09" * 32] > scored["07" * 32]


class TestEmitters:
    def test_report_json_shape(self):
        amounts = {"a": 66600, "b": 17600, "c": 15000, "d": 800}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        usage = usage_breakdown([BURN_A], USAGE_TXS)
        doc = json.loads(report_json(econ, usage, messages=[], btc_price=100_000.0))
        assert doc["economics"]["total_burned"] == 100000
        assert doc["economics"]["usd_value"] == pytest.approx(0.001 * 100_000)
        assert doc["economics"]["quantiles"]["0.50"] == 15000
        assert doc["usage"]["population"] == 5
        assert doc["messages"] == []

    def test_format_text_lines(self):
        amounts = {f"a{i}": v for i, v in enumerate(TABLE_AMOUNTS)}
        econ = burn_economics(amounts.keys(), StatsStub(amounts))
        text = format_text(econ, btc_price=60_000.0)
        assert "quantile 0.50       330" in text
        assert "quantile 0.99       313389" in text
        assert "top-3 share" in text
        assert "usd value" in text
