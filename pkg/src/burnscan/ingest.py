"""Stream a normalized transaction ledger into per-address statistics.

Input is line-delimited JSON, one transaction per line, with fields
txid, blockHeight, timestamp, inputs, outputs; inputs and outputs are
[address, satoshi] pairs. Satoshi amounts stay 64-bit integers end to
end; no floating point touches a money path.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Union

from .addrcodec import AddressError, Scheme, validate_address

logger = logging.getLogger(__name__)

STATS_COLUMNS = (
    "address",
    "first apparition",
    "last apparition",
    "number of transactions",
    "total received",
    "total sent",
)


class MalformedRecord(ValueError):
    pass


class SchemaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class LedgerTx:
    txid: str
    block_height: int
    timestamp: int
    inputs: tuple
    outputs: tuple


@dataclass
class AddressStats:
    address: str
    scheme: Scheme
    first_apparition: int
    last_apparition: int
    tx_count: int
    total_received: int
    total_sent: int


@dataclass
class IngestSummary:
    txs: int = 0
    malformed_records: int = 0
    skipped_entries: int = 0  # input/output legs with unparseable addresses
    non_monotone_timestamps: int = 0
    sum_inputs: int = 0  # accepted legs only
    sum_outputs: int = 0


class StatsTable:
    """Per-address aggregates plus the summary of the ingestion that built it."""

    def __init__(self, rows=None, summary=None):
        self.rows: dict = dict(rows or {})
        self.summary: IngestSummary = summary or IngestSummary()

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows.values())

    def __contains__(self, address):
        return address in self.rows

    def get(self, address):
        return self.rows.get(address)

    def total_received(self) -> int:
        return sum(r.total_received for r in self.rows.values())

    def total_sent(self) -> int:
        return sum(r.total_sent for r in self.rows.values())

    def assert_conservation(self) -> None:
        """Row totals must equal the per-transaction sums, satoshi exact."""
        received, sent = self.total_received(), self.total_sent()
        if received != self.summary.sum_outputs or sent != self.summary.sum_inputs:
            raise AssertionError(
                f"conservation violated: received {received} vs outputs "
                f"{self.summary.sum_outputs}, sent {sent} vs inputs {self.summary.sum_inputs}"
            )


def parse_tx(obj: dict) -> LedgerTx:
    """Build a LedgerTx from a decoded JSON object, checking field shape."""
    try:
        txid = obj["txid"]
        height = obj["blockHeight"]
        ts = obj["timestamp"]
        inputs = obj["inputs"]
        outputs = obj["outputs"]
    except (KeyError, TypeError) as exc:
        raise MalformedRecord(f"missing field: {exc}") from None
    if not isinstance(txid, str) or len(txid) != 64:
        raise MalformedRecord(f"txid must be 64 hex chars, got {txid!r}")
    if not isinstance(height, int) or height < 0:
        raise MalformedRecord(f"blockHeight must be a non-negative int: {height!r}")
    if not isinstance(ts, int) or ts < 0:
        raise MalformedRecord(f"timestamp must be non-negative epoch seconds: {ts!r}")

    def legs(entries, kind):
        out = []
        if not isinstance(entries, list):
            raise MalformedRecord(f"{kind} must be a list")
        for leg in entries:
            if (
                not isinstance(leg, (list, tuple))
                or len(leg) != 2
                or not isinstance(leg[0], str)
                or not isinstance(leg[1], int)
                or leg[1] < 0
            ):
                raise MalformedRecord(f"bad {kind} leg: {leg!r}")
            out.append((leg[0], leg[1]))
        return tuple(out)

    return LedgerTx(txid, height, ts, legs(inputs, "inputs"), legs(outputs, "outputs"))


def iter_ledger(path) -> Iterator[LedgerTx]:
    """Yield transactions from a JSONL ledger file; malformed lines raise."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"line {lineno}: {exc}") from None
            try:
                yield parse_tx(obj)
            except MalformedRecord as exc:
                raise MalformedRecord(f"line {lineno}: {exc}") from None


LedgerSource = Union[str, Path, Iterable[LedgerTx]]


def _tx_stream(source: LedgerSource, summary: IngestSummary) -> Iterator[LedgerTx]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield parse_tx(json.loads(line))
                except (json.JSONDecodeError, MalformedRecord) as exc:
                    summary.malformed_records += 1
                    logger.debug("skipping line %d: %s", lineno, exc)
    else:
        for tx in source:
            yield tx


def ingest_ledger(
    source: LedgerSource,
    *,
    context_limit: int = 0,
    validated_cache: dict | None = None,
):
    """Aggregate a ledger into a StatsTable.

    Addresses failing validation are counted and skipped, not fatal.
    Coinbase transactions simply have empty inputs. When context_limit > 0
    a second return value maps each address to up to that many containing
    txids (annotator context); otherwise returns the table alone.
    """
    summary = IngestSummary()
    rows: dict = {}
    context: dict = {}
    scheme_cache: dict = validated_cache if validated_cache is not None else {}
    last_ts = None

    def scheme_of(text):
        got = scheme_cache.get(text)
        if got is None:
            got = validate_address(text).scheme
            scheme_cache[text] = got
        return got

    for tx in _tx_stream(source, summary):
        summary.txs += 1
        if last_ts is not None and tx.timestamp < last_ts:
            summary.non_monotone_timestamps += 1
        last_ts = tx.timestamp
        seen_in_tx = set()
        for legs, is_input in ((tx.inputs, True), (tx.outputs, False)):
            for text, value in legs:
                try:
                    scheme = scheme_of(text)
                except AddressError:
                    summary.skipped_entries += 1
                    continue
                row = rows.get(text)
                if row is None:
                    row = AddressStats(
                        address=text,
                        scheme=scheme,
                        first_apparition=tx.timestamp,
                        last_apparition=tx.timestamp,
                        tx_count=0,
                        total_received=0,
                        total_sent=0,
                    )
                    rows[text] = row
                else:
                    # min/max keeps first <= last even if timestamps misbehave
                    row.first_apparition = min(row.first_apparition, tx.timestamp)
                    row.last_apparition = max(row.last_apparition, tx.timestamp)
                if text not in seen_in_tx:
                    row.tx_count += 1
                    seen_in_tx.add(text)
                    if context_limit and len(context.setdefault(text, [])) < context_limit:
                        context[text].append(tx.txid)
                if is_input:
                    row.total_sent += value
                    summary.sum_inputs += value
                else:
                    row.total_received += value
                    summary.sum_outputs += value

    if summary.non_monotone_timestamps:
        logger.warning(
            "%d transactions had timestamps earlier than their predecessor",
            summary.non_monotone_timestamps,
        )
    table = StatsTable(rows, summary)
    table.assert_conservation()
    if context_limit:
        return table, context
    return table


def candidate_pool(table: StatsTable) -> dict:
    """Addresses that never sent a satoshi, with their stats."""
    return {r.address: r for r in table if r.total_sent == 0}


def merge_stats(a: StatsTable, b: StatsTable) -> StatsTable:
    """Deterministic merge for tables built from disjoint block ranges:
    counters add, apparition times take min/max."""
    rows = {addr: replace(r) for addr, r in a.rows.items()}
    for addr, r in b.rows.items():
        mine = rows.get(addr)
        if mine is None:
            rows[addr] = replace(r)
        else:
            mine.first_apparition = min(mine.first_apparition, r.first_apparition)
            mine.last_apparition = max(mine.last_apparition, r.last_apparition)
            mine.tx_count += r.tx_count
            mine.total_received += r.total_received
            mine.total_sent += r.total_sent
    summary = IngestSummary(
        txs=a.summary.txs + b.summary.txs,
        malformed_records=a.summary.malformed_records + b.summary.malformed_records,
        skipped_entries=a.summary.skipped_entries + b.summary.skipped_entries,
        non_monotone_timestamps=a.summary.non_monotone_timestamps
        + b.summary.non_monotone_timestamps,
        sum_inputs=a.summary.sum_inputs + b.summary.sum_inputs,
        sum_outputs=a.summary.sum_outputs + b.summary.sum_outputs,
    )
    return StatsTable(rows, summary)


def _scheme_from_text(text: str) -> Scheme:
    # Rows only reach a stats file through ingest, which already validated
    # them, so the prefix alone settles the scheme on reload.
    return Scheme.BECH32 if text.startswith("bc1") else Scheme.BASE58


def save_stats(rows, path) -> None:
    """Write stats rows as a 6-column CSV with a mandatory header."""
    if isinstance(rows, StatsTable):
        rows = rows.rows.values()
    elif isinstance(rows, dict):
        rows = rows.values()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_COLUMNS)
        for r in rows:
            writer.writerow(
                (
                    r.address,
                    r.first_apparition,
                    r.last_apparition,
                    r.tx_count,
                    r.total_received,
                    r.total_sent,
                )
            )


def load_stats(path) -> StatsTable:
    """Read a stats CSV back; the column set must match exactly."""
    rows: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None or set(header) != set(STATS_COLUMNS):
            missing = set(STATS_COLUMNS) - set(header or ())
            extra = set(header or ()) - set(STATS_COLUMNS)
            raise SchemaMismatch(
                f"stats columns mismatch (missing {sorted(missing)}, extra {sorted(extra)})"
            )
        for rec in reader:
            try:
                addr = rec["address"]
                rows[addr] = AddressStats(
                    address=addr,
                    scheme=_scheme_from_text(addr),
                    first_apparition=int(rec["first apparition"]),
                    last_apparition=int(rec["last apparition"]),
                    tx_count=int(rec["number of transactions"]),
                    total_received=int(rec["total received"]),
                    total_sent=int(rec["total sent"]),
                )
            except (ValueError, TypeError) as exc:
                raise SchemaMismatch(f"bad stats row {rec!r}: {exc}") from None
    return StatsTable(rows)
