"""Iterative train / sweep / scrutinize / reinforce orchestration.

A round trains on the active burn labels plus the initial regular labels,
sweeps the never-spent candidate pool, and queues predicted burns for
human review, best score first. Confirmed burns feed the next round; the
regular class never grows past initialization. Labels land in an
append-only, checksummed log that is fsynced before any acknowledgment.
"""

from __future__ import annotations

import json
import logging
import math
import os
import re
import threading
import time
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import mlp
from .addrcodec import MAX_ENTROPY
from .features import batch_entropy, encode_batch
from .ingest import AddressStats, StatsTable, candidate_pool
from .words import MAX_WORD_LEN, WORD_SET

logger = logging.getLogger(__name__)

LABELS = ("burn", "regular", "vanity-suspect", "unstructured", "other")
SOURCE_INITIAL = "initial-entropy-set"
SOURCE_MANUAL = "manual"

DEFAULT_ENTROPY_THRESHOLD = 4.0
DEFAULT_MAX_ROUNDS = 5
_SWEEP_CHUNK = 8192
_MIN_HIGHLIGHT_WORD = 4


class UnknownAddress(KeyError):
    pass


class IllegalBurnLabel(ValueError):
    pass


class EmptyPool(ValueError):
    pass


class LabelConflict(RuntimeError):
    pass


class RoundActive(RuntimeError):
    pass


def source_for_round(round_index: int) -> str:
    return SOURCE_INITIAL if round_index == 0 else f"model-round-{round_index}"


@dataclass(frozen=True)
class LabelRecord:
    address: str
    label: str
    source: str
    round: int
    annotator: str
    timestamp: float

    def to_dict(self) -> dict:
        return asdict(self)


class LabelStore:
    """Append-only label log with per-line checksums.

    Line format: 8 hex chars of crc32 over the JSON body, a colon, the
    JSON body. Replay stops at the first bad or torn line and truncates
    the file there, so a crash mid-write never poisons the log. Appends
    return only after fsync.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._records: list = []
        self._active: dict = {}
        self._history: dict = {}
        self._lock = threading.Lock()
        self._fh = None
        self._replay()

    def _index(self, record: LabelRecord) -> None:
        self._records.append(record)
        self._active[record.address] = record
        self._history.setdefault(record.address, []).append(record)

    def _replay(self) -> None:
        good_offset = 0
        if self.path.exists():
            blob = self.path.read_bytes()
            offset = 0
            while offset < len(blob):
                newline = blob.find(b"\n", offset)
                if newline < 0:
                    break  # torn tail, no terminator
                line = blob[offset:newline]
                try:
                    crc_hex, body = line.split(b":", 1)
                    if int(crc_hex, 16) != zlib.crc32(body):
                        raise ValueError("checksum mismatch")
                    record = LabelRecord(**json.loads(body))
                except (ValueError, TypeError, KeyError) as exc:
                    logger.warning(
                        "label log %s: dropping tail at byte %d (%s)",
                        self.path,
                        offset,
                        exc,
                    )
                    break
                self._index(record)
                offset = newline + 1
                good_offset = offset
            if good_offset != len(blob):
                with open(self.path, "r+b") as fh:
                    fh.truncate(good_offset)
                    fh.flush()
                    os.fsync(fh.fileno())
        self._fh = open(self.path, "ab")

    @staticmethod
    def _encode(record: LabelRecord) -> bytes:
        body = json.dumps(record.to_dict(), sort_keys=True).encode()
        return f"{zlib.crc32(body):08x}:".encode() + body + b"\n"

    def append(self, record: LabelRecord) -> LabelRecord:
        if record.label not in LABELS:
            raise ValueError(f"unknown label {record.label!r}")
        with self._lock:
            self._fh.write(self._encode(record))
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._index(record)
        return record

    def active(self, address: str):
        return self._active.get(address)

    def active_items(self):
        return self._active.items()

    def history(self, address: str) -> list:
        return list(self._history.get(address, ()))

    def records(self) -> list:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def compact(self) -> None:
        """Rewrite the log keeping only each address's active record.

        Drops superseded history to reclaim space; call it deliberately,
        nothing triggers it automatically.
        """
        with self._lock:
            tmp = self.path.with_suffix(self.path.suffix + ".compact")
            survivors = list(self._active.values())
            with open(tmp, "wb") as fh:
                for record in survivors:
                    fh.write(self._encode(record))
                fh.flush()
                os.fsync(fh.fileno())
            self._fh.close()
            os.replace(tmp, self.path)
            self._records = list(survivors)
            self._history = {r.address: [r] for r in survivors}
            self._fh = open(self.path, "ab")

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


_RUN_RE = re.compile(r"(.)\1{3,}")


def highlight_spans(text: str) -> list:
    """Annotator aids: repeated-char runs of 4+ and dictionary words of 4+
    letters (case-insensitive, greedy longest match)."""
    spans = [
        {"start": m.start(), "end": m.end(), "kind": "run", "text": m.group(0)}
        for m in _RUN_RE.finditer(text)
    ]
    lower = text.lower()
    i = 0
    while i < len(lower):
        hit = 0
        top = min(len(lower), i + MAX_WORD_LEN)
        for j in range(top, i + _MIN_HIGHLIGHT_WORD - 1, -1):
            if lower[i:j] in WORD_SET:
                hit = j
                break
        if hit:
            spans.append({"start": i, "end": hit, "kind": "word", "text": text[i:hit]})
            i = hit
        else:
            i += 1
    return sorted(spans, key=lambda s: (s["start"], s["end"]))


@dataclass
class TriageItem:
    address: str
    scheme: str
    score: float
    round: int
    stats: AddressStats
    context_txids: list
    highlights: list

    def to_dict(self) -> dict:
        return {
            "address": self.address,
            "scheme": self.scheme,
            "score": self.score,
            "round": self.round,
            "stats": {
                "first_apparition": self.stats.first_apparition,
                "last_apparition": self.stats.last_apparition,
                "tx_count": self.stats.tx_count,
                "total_received": self.stats.total_received,
                "total_sent": self.stats.total_sent,
            },
            "context_txids": list(self.context_txids),
            "highlights": list(self.highlights),
        }


class TriageQueue:
    """Pending items ordered by score descending, address ascending."""

    def __init__(self, items=()):
        self._items: dict = {}
        self._order: list = []
        for item in items:
            self._items[item.address] = item
        self._resort()

    def _resort(self) -> None:
        self._order = sorted(
            self._items, key=lambda a: (-self._items[a].score, a)
        )

    def merge(self, items) -> None:
        for item in items:
            self._items[item.address] = item
        self._resort()

    def remove(self, address: str) -> None:
        if self._items.pop(address, None) is not None:
            self._order.remove(address)

    def next(self):
        return self._items[self._order[0]] if self._order else None

    def page(self, offset: int = 0, limit: int = 20) -> list:
        return [self._items[a] for a in self._order[offset : offset + limit]]

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, address: str) -> bool:
        return address in self._items

    def get(self, address: str):
        return self._items.get(address)

    def addresses(self) -> list:
        return list(self._order)


@dataclass(frozen=True)
class InitialCandidate:
    address: str
    entropy: float
    never_spent: bool
    stats: AddressStats


def build_initial_set(
    stats: StatsTable, entropy_threshold: float = DEFAULT_ENTROPY_THRESHOLD
) -> list:
    """Sub-threshold addresses queued for manual labeling: the never-spent
    ones are burn candidates, the spenders seed the regular class."""
    rows = sorted(stats, key=lambda r: r.address)
    if not rows:
        return []
    entropies = batch_entropy([r.address for r in rows])
    out = [
        InitialCandidate(
            address=row.address,
            entropy=float(h),
            never_spent=row.total_sent == 0,
            stats=row,
        )
        for row, h in zip(rows, entropies)
        if h < entropy_threshold
    ]
    out.sort(key=lambda c: (c.entropy, c.address))
    return out


@dataclass
class RoundReport:
    round: int
    predicted: int
    confirmed: int
    rejected: int
    pending: int
    new_tp: int
    by_scheme: dict
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _scheme_of(address: str) -> str:
    return "bech32" if address.startswith("bc1") else "base58"


def training_sets(store: LabelStore) -> tuple:
    """Burn class: every active burn label. Regular class: only the labels
    from initialization; rounds never grow it."""
    burn = sorted(a for a, r in store.active_items() if r.label == "burn")
    regular = sorted(
        a
        for a, r in store.active_items()
        if r.label == "regular" and r.source == SOURCE_INITIAL
    )
    return burn, regular


def run_round(
    store: LabelStore,
    pool: dict,
    seed: int,
    *,
    round_index: int = 1,
    context: dict | None = None,
    train_kwargs: dict | None = None,
):
    """One reinforcement round over the candidate pool.

    Returns (RoundReport, list of TriageItems, MlpModel). The report is a
    snapshot at creation time, so everything predicted is still pending.
    """
    if not pool:
        raise EmptyPool("candidate pool is empty")
    burn, regular = training_sets(store)
    for addr in burn:
        row = pool.get(addr)
        if row is not None and row.total_sent != 0:
            raise IllegalBurnLabel(f"{addr} has spent; it cannot train as burn")
    X = encode_batch(burn + regular)
    y = np.zeros(len(burn) + len(regular), np.int64)
    y[len(burn) :] = mlp.REGULAR
    model = mlp.train(X, y, seed, **(train_kwargs or {}))

    unlabeled = sorted(a for a in pool if store.active(a) is None)
    items = []
    context = context or {}
    for start in range(0, len(unlabeled), _SWEEP_CHUNK):
        chunk = unlabeled[start : start + _SWEEP_CHUNK]
        pred, score = mlp.predict(model, encode_batch(chunk))
        for addr, cls, sc in zip(chunk, pred, score):
            if cls == mlp.BURN:
                items.append(
                    TriageItem(
                        address=addr,
                        scheme=_scheme_of(addr),
                        score=float(sc),
                        round=round_index,
                        stats=pool[addr],
                        context_txids=list(context.get(addr, ())),
                        highlights=highlight_spans(addr),
                    )
                )
    items.sort(key=lambda it: (-it.score, it.address))
    by_scheme = {}
    for item in items:
        bucket = by_scheme.setdefault(
            item.scheme,
            {"predicted": 0, "confirmed": 0, "rejected": 0, "pending": 0, "new_tp": 0},
        )
        bucket["predicted"] += 1
        bucket["pending"] += 1
    report = RoundReport(
        round=round_index,
        predicted=len(items),
        confirmed=0,
        rejected=0,
        pending=len(items),
        new_tp=0,
        by_scheme=by_scheme,
        seed=int(seed),
    )
    logger.info(
        "round %d: trained on %d burn / %d regular, predicted %d of %d candidates",
        round_index,
        len(burn),
        len(regular),
        len(items),
        len(unlabeled),
    )
    return report, items, model


class TriageSession:
    """Server-side state: stats, pool, label store, queue, and round history.

    Thread safety: label mutations serialize through one lock; running a
    round takes an exclusive flag that rejects concurrent rounds and any
    labeling while the model retrains. Queue reads stay lock-free.
    """

    def __init__(
        self,
        stats: StatsTable,
        store: LabelStore,
        *,
        context: dict | None = None,
        state_path=None,
        train_kwargs: dict | None = None,
    ):
        self.stats = stats
        self.store = store
        self.pool = candidate_pool(stats)
        self.context = context or {}
        self.state_path = Path(state_path) if state_path else None
        self.train_kwargs = train_kwargs or {}
        self.queue = TriageQueue()
        self.predictions: dict = {}  # round index -> {address: score}
        self.round_seeds: dict = {}
        self.model = None
        self._label_lock = threading.Lock()
        self._round_lock = threading.Lock()
        self._round_running = False
        if self.state_path and self.state_path.exists():
            self._load_state()

    # ----- initial corpus -----

    def load_initial_corpus(self, candidates) -> int:
        """Queue sub-threshold addresses as round 0, most structured first."""
        items = []
        for cand in candidates:
            if self.store.active(cand.address) is not None:
                continue
            score = 1.0 - cand.entropy / MAX_ENTROPY
            items.append(
                TriageItem(
                    address=cand.address,
                    scheme=_scheme_of(cand.address),
                    score=float(score),
                    round=0,
                    stats=cand.stats,
                    context_txids=list(self.context.get(cand.address, ())),
                    highlights=highlight_spans(cand.address),
                )
            )
        self.queue.merge(items)
        self.predictions.setdefault(0, {}).update(
            {it.address: it.score for it in items}
        )
        self._save_state()
        return len(items)

    # ----- labeling -----

    def submit_label(
        self, address: str, label: str, annotator: str, *, fail_on_conflict: bool = False
    ) -> LabelRecord:
        if label not in LABELS:
            raise ValueError(f"unknown label {label!r}; expected one of {LABELS}")
        row = self.stats.get(address)
        if row is None:
            raise UnknownAddress(address)
        if label == "burn" and row.total_sent > 0:
            raise IllegalBurnLabel(
                f"{address} sent {row.total_sent} satoshi; burn labels need totalSent = 0"
            )
        if self._round_running:
            raise RoundActive("a round is retraining; labeling is paused")
        with self._label_lock:
            existing = self.store.active(address)
            if fail_on_conflict and existing is not None and existing.annotator != annotator:
                raise LabelConflict(
                    f"{address} already labeled {existing.label!r} by {existing.annotator!r}"
                )
            queued = self.queue.get(address)
            round_index = queued.round if queued is not None else self.current_round
            record = LabelRecord(
                address=address,
                label=label,
                source=source_for_round(round_index) if queued is not None else SOURCE_MANUAL,
                round=round_index,
                annotator=annotator,
                timestamp=time.time(),
            )
            self.store.append(record)
            self.queue.remove(address)
        return record

    # ----- rounds -----

    @property
    def current_round(self) -> int:
        return max(self.predictions, default=0)

    def run_round(self, seed: int) -> RoundReport:
        if not self._round_lock.acquire(blocking=False):
            raise RoundActive("another round is already running")
        try:
            self._round_running = True
            round_index = self.current_round + 1
            report, items, model = run_round(
                self.store,
                self.pool,
                seed,
                round_index=round_index,
                context=self.context,
                train_kwargs=self.train_kwargs,
            )
            self.model = model
            self.predictions[round_index] = {it.address: it.score for it in items}
            self.round_seeds[round_index] = int(seed)
            self.queue.merge(items)
            self._assert_ground_truth_safety()
            self._save_state()
            return self.round_report(round_index)
        finally:
            self._round_running = False
            self._round_lock.release()

    def _assert_ground_truth_safety(self) -> None:
        for addr, rec in self.store.active_items():
            if rec.label != "burn":
                continue
            row = self.stats.get(addr)
            assert row is not None and row.total_sent == 0, (
                f"burn label on a spender leaked into the store: {addr}"
            )

    def round_report(self, round_index: int) -> RoundReport:
        """Live view: counts reflect labels submitted since the round ran."""
        predicted = self.predictions.get(round_index)
        if predicted is None:
            raise KeyError(f"no round {round_index}")
        confirmed = rejected = new_tp = 0
        by_scheme: dict = {}
        for addr in predicted:
            bucket = by_scheme.setdefault(
                _scheme_of(addr),
                {"predicted": 0, "confirmed": 0, "rejected": 0, "pending": 0, "new_tp": 0},
            )
            bucket["predicted"] += 1
            rec = self.store.active(addr)
            if rec is None:
                bucket["pending"] += 1
            elif rec.label == "burn":
                confirmed += 1
                bucket["confirmed"] += 1
                if rec.round == round_index:
                    new_tp += 1
                    bucket["new_tp"] += 1
            else:
                rejected += 1
                bucket["rejected"] += 1
        return RoundReport(
            round=round_index,
            predicted=len(predicted),
            confirmed=confirmed,
            rejected=rejected,
            pending=len(predicted) - confirmed - rejected,
            new_tp=new_tp,
            by_scheme=by_scheme,
            seed=self.round_seeds.get(round_index, 0),
        )

    def round_reports(self) -> list:
        return [self.round_report(k) for k in sorted(self.predictions) if k > 0]

    @property
    def converged(self) -> bool:
        reports = self.round_reports()
        return bool(reports) and reports[-1].pending == 0 and reports[-1].new_tp == 0

    # ----- persistence -----

    def _save_state(self) -> None:
        if self.state_path is None:
            return
        state = {
            "rounds": [
                {
                    "round": k,
                    "seed": self.round_seeds.get(k, 0),
                    "predicted": [[a, s] for a, s in sorted(scores.items())],
                }
                for k, scores in sorted(self.predictions.items())
            ],
            "queue": [
                {"address": a, "score": self.queue.get(a).score, "round": self.queue.get(a).round}
                for a in self.queue.addresses()
            ],
        }
        tmp = self.state_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(state))
        os.replace(tmp, self.state_path)

    def _load_state(self) -> None:
        state = json.loads(self.state_path.read_text())
        for entry in state.get("rounds", ()):
            self.predictions[int(entry["round"])] = {
                a: float(s) for a, s in entry["predicted"]
            }
            self.round_seeds[int(entry["round"])] = int(entry.get("seed", 0))
        items = []
        for q in state.get("queue", ()):
            addr = q["address"]
            if self.store.active(addr) is not None:
                continue
            row = self.stats.get(addr)
            if row is None:
                continue
            items.append(
                TriageItem(
                    address=addr,
                    scheme=_scheme_of(addr),
                    score=float(q["score"]),
                    round=int(q["round"]),
                    stats=row,
                    context_txids=list(self.context.get(addr, ())),
                    highlights=highlight_spans(addr),
                )
            )
        self.queue.merge(items)


def run_loop(
    session: TriageSession,
    annotator,
    *,
    seed: int = 0,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> list:
    """Drive rounds with a callable annotator until new-TP hits 0 or the
    round budget runs out. The annotator sees each TriageItem and returns a
    label string; it is called for every queued item between rounds."""
    reports = []
    for k in range(max_rounds):
        report = session.run_round(seed + k)
        while len(session.queue):
            item = session.queue.next()
            session.submit_label(item.address, annotator(item), f"loop-{k}")
        report = session.round_report(report.round)
        reports.append(report)
        if report.new_tp == 0:
            break
    return reports
