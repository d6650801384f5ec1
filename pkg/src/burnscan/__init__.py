"""Burn-address detection for Bitcoin transaction ledgers.

Pipeline: ingest a JSONL ledger into per-address stats, screen never-spent
addresses by character entropy, hand-label the low-entropy seed set, then
alternate classifier sweeps with human review until no new burns surface.
Reporting quantifies the value destroyed and reconstructs messages spelled
across multi-address transactions.
"""

from .addrcodec import (
    Address,
    AddressError,
    BadChecksum,
    InvalidCharacter,
    OverlongAddress,
    Scheme,
    shannon_entropy,
    validate_address,
    vanity_cost,
)
from .features import FEATURE_WIDTH, encode, encode_batch
from .ingest import StatsTable, ingest_ledger, load_stats, save_stats
from .looper import LabelStore, TriageSession, build_initial_set
from .mlp import predict, stratified_cv, train
from .report import burn_economics, extract_messages, usage_breakdown

__version__ = "0.1.0"

__all__ = [
    "Address",
    "AddressError",
    "BadChecksum",
    "InvalidCharacter",
    "OverlongAddress",
    "Scheme",
    "shannon_entropy",
    "validate_address",
    "vanity_cost",
    "FEATURE_WIDTH",
    "encode",
    "encode_batch",
    "StatsTable",
    "ingest_ledger",
    "load_stats",
    "save_stats",
    "LabelStore",
    "TriageSession",
    "build_initial_set",
    "predict",
    "stratified_cv",
    "train",
    "burn_economics",
    "extract_messages",
    "usage_breakdown",
    "__version__",
]
