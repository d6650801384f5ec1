"""Burn economics: totals, quantiles, concentration, usage patterns, and
plain-text message reconstruction from multi-address transactions.

Everything here is a pure computation over immutable inputs. "Burned"
means the totalReceived of a burn-labeled address; by store invariant its
totalSent is zero, so received value is stuck value.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .addrcodec import shannon_entropy
from .ingest import IngestSummary, LedgerSource, _tx_stream
from .words import WORD_SET

QUANTILE_LEVELS = (0.50, 0.75, 0.90, 0.95, 0.99)
ENTROPY_BIN_EDGES = tuple(float(x) for x in np.arange(0.0, 6.25, 0.25))
SATOSHI_PER_BTC = 100_000_000


class EmptyBurnSet(ValueError):
    pass


def nearest_rank(sorted_values, q: float):
    """Inclusive nearest-rank quantile: the ceil(q*n)-th smallest value."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("quantile of empty sequence")
    idx = max(math.ceil(q * n), 1) - 1
    return sorted_values[min(idx, n - 1)]


@dataclass(frozen=True)
class BurnEconomics:
    total_burned: int
    per_address: tuple  # (address, burned) sorted by burned desc, address asc
    quantiles: dict  # level -> satoshi
    shares: tuple  # (address, fraction of total) same order as per_address

    @property
    def n_addresses(self) -> int:
        return len(self.per_address)

    @property
    def total_btc(self) -> float:
        return self.total_burned / SATOSHI_PER_BTC

    def top_share(self, k: int) -> float:
        return sum(s for _, s in self.shares[:k])

    def usd_value(self, btc_price: float) -> float:
        return self.total_btc * btc_price

    def to_dict(self) -> dict:
        return {
            "total_burned": self.total_burned,
            "total_btc": self.total_btc,
            "n_addresses": self.n_addresses,
            "quantiles": {f"{q:.2f}": v for q, v in self.quantiles.items()},
            "per_address": [list(p) for p in self.per_address],
            "shares": [[a, s] for a, s in self.shares],
        }


def burn_economics(burn_addresses, stats) -> BurnEconomics:
    addrs = sorted(set(burn_addresses))
    if not addrs:
        raise EmptyBurnSet("no burn addresses to report on")
    burned = []
    for addr in addrs:
        row = stats.get(addr)
        if row is None:
            raise KeyError(f"burn address {addr} missing from stats")
        burned.append((addr, row.total_received))
    burned.sort(key=lambda p: (-p[1], p[0]))
    total = sum(v for _, v in burned)
    amounts = sorted(v for _, v in burned)
    quantiles = {q: nearest_rank(amounts, q) for q in QUANTILE_LEVELS}
    shares = tuple((a, (v / total if total else 0.0)) for a, v in burned)
    return BurnEconomics(
        total_burned=total,
        per_address=tuple(burned),
        quantiles=quantiles,
        shares=shares,
    )


@dataclass(frozen=True)
class UsageBreakdown:
    scheme_counts: dict  # scheme -> burn address count
    solo_fraction: float  # burn addrs never sharing a tx with another burn
    tx_burn_counts: dict  # distinct burns in tx -> number of such txs
    ecdf: tuple  # (timestamp, fraction) over first apparition of burns
    entropy_histogram: tuple  # bin counts over all distinct ledger addresses
    entropy_bin_edges: tuple
    population: int  # distinct addresses in the ledger

    def to_dict(self) -> dict:
        return {
            "scheme_counts": dict(self.scheme_counts),
            "solo_fraction": self.solo_fraction,
            "tx_burn_counts": {str(k): v for k, v in sorted(self.tx_burn_counts.items())},
            "ecdf": [list(p) for p in self.ecdf],
            "entropy_histogram": list(self.entropy_histogram),
            "entropy_bin_edges": list(self.entropy_bin_edges),
            "population": self.population,
        }


def _txs(source: LedgerSource):
    return _tx_stream(source, IngestSummary())


def usage_breakdown(burn_addresses, ledger: LedgerSource) -> UsageBreakdown:
    burn_set = set(burn_addresses)
    first_seen: dict = {}
    shared: set = set()
    tx_burn_counts: dict = {}
    population: set = set()
    for tx in _txs(ledger):
        seen_here = []
        for addr, _ in tx.inputs:
            population.add(addr)
        for addr, _ in tx.outputs:
            population.add(addr)
            if addr in burn_set and addr not in seen_here:
                seen_here.append(addr)
        if not seen_here:
            continue
        tx_burn_counts[len(seen_here)] = tx_burn_counts.get(len(seen_here), 0) + 1
        if len(seen_here) > 1:
            shared.update(seen_here)
        for addr in seen_here:
            if addr not in first_seen:
                first_seen[addr] = tx.timestamp
    n_burn = len(first_seen)
    solo_fraction = (n_burn - len(shared)) / n_burn if n_burn else 0.0
    points = []
    if first_seen:
        stamps = sorted(first_seen.values())
        for i, ts in enumerate(stamps, start=1):
            if points and points[-1][0] == ts:
                points[-1] = (ts, i / n_burn)
            else:
                points.append((ts, i / n_burn))
    scheme_counts: dict = {}
    for addr in first_seen:
        scheme = "bech32" if addr.startswith("bc1") else "base58"
        scheme_counts[scheme] = scheme_counts.get(scheme, 0) + 1
    entropies = [shannon_entropy(a) for a in population]
    hist, _ = np.histogram(entropies, bins=np.asarray(ENTROPY_BIN_EDGES))
    return UsageBreakdown(
        scheme_counts=scheme_counts,
        solo_fraction=solo_fraction,
        tx_burn_counts=tx_burn_counts,
        ecdf=tuple(points),
        entropy_histogram=tuple(int(c) for c in hist),
        entropy_bin_edges=ENTROPY_BIN_EDGES,
        population=len(population),
    )


@dataclass(frozen=True)
class ExtractedMessage:
    txid: str
    addresses: tuple  # burn addresses in output order
    payload: str
    readability: float

    def to_dict(self) -> dict:
        return {
            "txid": self.txid,
            "addresses": list(self.addresses),
            "payload": self.payload,
            "readability": self.readability,
        }


def strip_envelope(address: str, trailing: int = 6) -> str:
    """Drop the version prefix and the checksum-bearing tail, keeping the
    chooseable middle. The 6-char tail is a heuristic: a 4-byte checksum
    occupies about 5.5 characters in Base58."""
    if address.startswith("bc1"):
        return address[3:-trailing] if trailing else address[3:]
    return address[1:-trailing] if trailing else address[1:]


def readability_score(text: str, min_word_len: int = 3) -> float:
    """Fraction of characters covered by dictionary words, greedy longest
    match, case-insensitive."""
    if not text:
        return 0.0
    lower = text.lower()
    covered = 0
    i = 0
    longest = max(len(w) for w in WORD_SET)
    while i < len(lower):
        hit = 0
        for j in range(min(len(lower), i + longest), i + min_word_len - 1, -1):
            if lower[i:j] in WORD_SET:
                hit = j
                break
        if hit:
            covered += hit - i
            i = hit
        else:
            i += 1
    return covered / len(lower)


def extract_messages(
    ledger: LedgerSource,
    burn_addresses,
    *,
    trailing: int = 6,
    min_word_len: int = 3,
) -> list:
    """Reassemble plain text from transactions that pack a message across
    two or more burn addresses, preserving output order."""
    burn_set = set(burn_addresses)
    out = []
    for tx in _txs(ledger):
        ordered = []
        for addr, _ in tx.outputs:
            if addr in burn_set and addr not in ordered:
                ordered.append(addr)
        if len(ordered) < 2:
            continue
        payload = "".join(strip_envelope(a, trailing) for a in ordered)
        out.append(
            ExtractedMessage(
                txid=tx.txid,
                addresses=tuple(ordered),
                payload=payload,
                readability=readability_score(payload, min_word_len),
            )
        )
    return out


# ----- emitters -----


def economics_csv(econ: BurnEconomics, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["address", "burned", "share"])
        for (addr, burned), (_, share) in zip(econ.per_address, econ.shares):
            writer.writerow([addr, burned, f"{share:.12f}"])


def report_json(econ: BurnEconomics, usage=None, messages=None, btc_price=None) -> str:
    doc = {"economics": econ.to_dict()}
    if btc_price is not None:
        doc["economics"]["usd_value"] = econ.usd_value(btc_price)
        doc["economics"]["btc_price"] = btc_price
    if usage is not None:
        doc["usage"] = usage.to_dict()
    if messages is not None:
        doc["messages"] = [m.to_dict() for m in messages]
    return json.dumps(doc, indent=2, sort_keys=True)


def format_text(econ: BurnEconomics, usage=None, btc_price=None) -> str:
    lines = [
        f"burn addresses      {econ.n_addresses}",
        f"total burned        {econ.total_burned} satoshi ({econ.total_btc:.8f} BTC)",
    ]
    if btc_price is not None:
        lines.append(f"usd value           {econ.usd_value(btc_price):,.2f} at {btc_price:,.2f}/BTC")
    for q in QUANTILE_LEVELS:
        lines.append(f"quantile {q:.2f}       {econ.quantiles[q]}")
    lines.append(f"top-3 share         {econ.top_share(3):.4f}")
    if usage is not None:
        lines.append(f"solo fraction       {usage.solo_fraction:.4f}")
        for scheme, count in sorted(usage.scheme_counts.items()):
            lines.append(f"burns ({scheme})      {count}")
    return "\n".join(lines)
