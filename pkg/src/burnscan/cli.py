"""Command-line entry point.

One subcommand per pipeline stage: ingest | build-initial | train | cv |
round | serve | report | export. Config precedence is flags over
BURNSCAN_* environment variables over a JSON config file; `export` writes
an invocation record next to its output so results stay reproducible.

Exit codes: 0 success, 2 domain error (one machine-parseable line on
stderr), 1 anything unexpected.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
import time
from pathlib import Path

import click
from filelock import FileLock, Timeout

from . import mlp, report as report_mod
from .addrcodec import AddressError, shannon_entropy
from .ingest import (
    STATS_COLUMNS,
    MalformedRecord,
    SchemaMismatch,
    ingest_ledger,
    load_stats,
    save_stats,
)
from .looper import (
    EmptyPool,
    IllegalBurnLabel,
    LabelConflict,
    LabelStore,
    RoundActive,
    TriageSession,
    UnknownAddress,
    build_initial_set,
    training_sets,
)

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class StoreLocked(RuntimeError):
    pass


DOMAIN_ERRORS = (
    ConfigError,
    StoreLocked,
    AddressError,
    MalformedRecord,
    SchemaMismatch,
    mlp.DegenerateTrainingSet,
    mlp.TooFewSamples,
    mlp.WidthMismatch,
    UnknownAddress,
    IllegalBurnLabel,
    EmptyPool,
    LabelConflict,
    RoundActive,
    report_mod.EmptyBurnSet,
    FileNotFoundError,
)

_SETTINGS = {"auto_envvar_prefix": "BURNSCAN", "help_option_names": ["-h", "--help"]}


def guarded(fn):
    """Map domain errors to exit 2 with one parseable line, everything
    else to exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DOMAIN_ERRORS as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(2)
        except (click.ClickException, click.Abort, SystemExit):
            raise
        except Exception as exc:  # noqa: BLE001 - last-resort CLI boundary
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def store_lock(store_path, *, timeout: float = 2.0) -> FileLock:
    """Advisory per-store lock; `serve` holds it for its lifetime."""
    lock = FileLock(str(store_path) + ".lock")
    try:
        lock.acquire(timeout=timeout)
    except Timeout:
        raise StoreLocked(
            f"label store {store_path} is in use (lock {lock.lock_file})"
        ) from None
    return lock


@click.group(context_settings=_SETTINGS)
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON config file; keys mirror the long flag names of any subcommand.",
)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
@click.pass_context
@guarded
def main(ctx, config, verbose):
    """Detect and quantify Bitcoin burn addresses from a transaction ledger."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if config:
        try:
            values = json.loads(Path(config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError(f"config {config}: expected a JSON object")
        flat = {k.replace("-", "_"): v for k, v in values.items()}
        ctx.default_map = {cmd: flat for cmd in main.commands}


@main.command(context_settings=_SETTINGS)
@click.option("--ledger", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSONL ledger, one transaction per line.")
@click.option("--stats", "stats_path", required=True, type=click.Path(dir_okay=False),
              help="Output per-address stats CSV (6 columns).")
@click.option("--context", "context_path", type=click.Path(dir_okay=False), default=None,
              help="Optional JSON map of address to sample txids.")
@click.option("--context-limit", type=click.IntRange(min=0), default=5, show_default=True,
              help="Txids kept per address in the context map.")
@guarded
def ingest(ledger, stats_path, context_path, context_limit):
    """Stream the ledger into per-address statistics."""
    result = ingest_ledger(ledger, context_limit=context_limit if context_path else 0)
    if context_path:
        table, context = result
        Path(context_path).write_text(
            json.dumps({a: list(t) for a, t in context.items()})
        )
    else:
        table = result
    save_stats(table, stats_path)
    s = table.summary
    click.echo(
        f"ingested {s.txs} txs, {len(table)} addresses "
        f"({s.malformed_records} malformed records skipped, "
        f"{s.skipped_entries} bad address legs, "
        f"{s.non_monotone_timestamps} non-monotone timestamps)"
    )


@main.command("build-initial", context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Per-address stats CSV from `ingest`.")
@click.option("--threshold", type=click.FloatRange(min=0.0), default=4.0, show_default=True,
              help="Entropy cutoff in bits/char; strictly-below qualifies.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Output JSON list of initial candidates.")
@guarded
def build_initial(stats_path, threshold, out_path):
    """Select low-entropy addresses to seed manual labeling."""
    table = load_stats(stats_path)
    candidates = build_initial_set(table, entropy_threshold=threshold)
    doc = [
        {"address": c.address, "entropy": c.entropy, "never_spent": c.never_spent}
        for c in candidates
    ]
    Path(out_path).write_text(json.dumps(doc, indent=1))
    burn_side = sum(1 for c in candidates if c.never_spent)
    click.echo(
        f"{len(candidates)} candidates below {threshold} bits/char "
        f"({burn_side} never spent, {len(candidates) - burn_side} spenders)"
    )


def _open_session(stats_path, store_path, state_path=None, context_path=None):
    table = load_stats(stats_path)
    store = LabelStore(store_path)
    context = None
    if context_path:
        context = json.loads(Path(context_path).read_text())
    return TriageSession(table, store, context=context, state_path=state_path)


@main.command(context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(dir_okay=False),
              help="Append-only label log (crc32-prefixed JSONL).")
@click.option("--model", "model_path", required=True, type=click.Path(dir_okay=False),
              help="Output model file.")
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def train(stats_path, store_path, model_path, seed):
    """Train one classifier on the current labels, no sweep."""
    with store_lock(store_path):
        table = load_stats(stats_path)
        store = LabelStore(store_path)
        burn, regular = training_sets(store)
        from .features import encode_batch
        import numpy as np

        X = encode_batch(burn + regular)
        y = np.zeros(len(burn) + len(regular), np.int64)
        y[len(burn):] = mlp.REGULAR
        model = mlp.train(X, y, seed)
        mlp.save_model(model, model_path)
        click.echo(
            f"trained on {len(burn)} burn / {len(regular)} regular; "
            f"epochs={model.epochs_run} loss={model.final_loss:.6f} "
            f"converged={model.converged} -> {model_path}"
        )


@main.command(context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--folds", type=click.IntRange(min=2), default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def cv(stats_path, store_path, folds, seed):
    """Stratified cross-validation over the labeled corpus; output is
    byte-identical for a fixed seed."""
    with store_lock(store_path):
        store = LabelStore(store_path)
        burn, regular = training_sets(store)
        from .features import encode_batch
        import numpy as np

        X = encode_batch(burn + regular)
        y = np.zeros(len(burn) + len(regular), np.int64)
        y[len(burn):] = mlp.REGULAR
        result = mlp.stratified_cv(X, y, folds=folds, seed=seed)
        click.echo(result.format_table())


@main.command("round", context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(dir_okay=False))
@click.option("--state", "state_path", type=click.Path(dir_okay=False), default=None,
              help="Session state JSON; keeps round numbering across runs.")
@click.option("--model-dir", type=click.Path(file_okay=False), default=None,
              help="Directory receiving round-<k>.model files.")
@click.option("--seed", type=int, default=0, show_default=True)
@guarded
def round_cmd(stats_path, store_path, state_path, model_dir, seed):
    """Run one train-and-sweep reinforcement round headlessly."""
    with store_lock(store_path):
        session = _open_session(stats_path, store_path, state_path)
        rep = session.run_round(seed)
        if model_dir:
            out = Path(model_dir)
            out.mkdir(parents=True, exist_ok=True)
            mlp.save_model(session.model, out / f"round-{rep.round}.model")
        click.echo(json.dumps(rep.to_dict(), sort_keys=True))


@main.command(context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(dir_okay=False))
@click.option("--initial", "initial_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Candidates JSON from `build-initial`; queued on startup.")
@click.option("--context", "context_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--state", "state_path", type=click.Path(dir_okay=False), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=click.IntRange(min=1, max=65535), default=8314, show_default=True)
@guarded
def serve(stats_path, store_path, initial_path, context_path, state_path, host, port):
    """Serve the triage API; holds the store lock until shutdown."""
    import uvicorn

    from .api import create_app

    with store_lock(store_path):
        session = _open_session(stats_path, store_path, state_path, context_path)
        if initial_path:
            entries = json.loads(Path(initial_path).read_text())
            from .looper import InitialCandidate

            candidates = []
            for e in entries:
                row = session.stats.get(e["address"])
                if row is None:
                    continue
                candidates.append(
                    InitialCandidate(
                        address=e["address"],
                        entropy=float(e["entropy"]),
                        never_spent=bool(e["never_spent"]),
                        stats=row,
                    )
                )
            queued = session.load_initial_corpus(candidates)
            click.echo(f"queued {queued} initial candidates", err=True)
        uvicorn.run(create_app(session), host=host, port=port, log_level="warning")


@main.command("report", context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ledger", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Ledger JSONL; enables usage breakdown and messages.")
@click.option("--btc-price", type=click.FloatRange(min=0.0), default=None,
              help="Price constant for USD figures; never fetched.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
@click.option("--messages/--no-messages", default=False, show_default=True,
              help="Reconstruct multi-address messages (needs --ledger).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Also write per-address economics CSV here.")
@guarded
def report_cmd(stats_path, store_path, ledger, btc_price, as_json, messages, out_path):
    """Quantify burned value for the burn-labeled addresses."""
    table = load_stats(stats_path)
    store = LabelStore(store_path)
    burns = sorted(a for a, r in store.active_items() if r.label == "burn")
    econ = report_mod.burn_economics(burns, table)
    usage = msg_list = None
    if ledger:
        usage = report_mod.usage_breakdown(burns, ledger)
        if messages:
            msg_list = report_mod.extract_messages(ledger, burns)
    if out_path:
        report_mod.economics_csv(econ, out_path)
    if as_json:
        click.echo(report_mod.report_json(econ, usage, msg_list, btc_price))
    else:
        click.echo(report_mod.format_text(econ, usage, btc_price))
        if msg_list:
            for m in msg_list:
                click.echo(f"message {m.txid[:12]} ({len(m.addresses)} parts, "
                           f"readability {m.readability:.2f}): {m.payload}")


@main.command(context_settings=_SETTINGS)
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Labeled-address CSV (stats columns + manual classification + entropy).")
@guarded
def export(stats_path, store_path, out_path):
    """Export labeled addresses with their stats, plus an invocation record."""
    import csv

    with store_lock(store_path):
        table = load_stats(stats_path)
        store = LabelStore(store_path)
        rows = sorted(store.active_items())
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(STATS_COLUMNS) + ["manual classification", "entropy"])
            written = 0
            for addr, rec in rows:
                row = table.get(addr)
                if row is None:
                    continue
                writer.writerow([
                    addr,
                    row.first_apparition,
                    row.last_apparition,
                    row.tx_count,
                    row.total_received,
                    row.total_sent,
                    rec.label,
                    f"{shannon_entropy(addr):.6f}",
                ])
                written += 1
        record = {
            "argv": sys.argv,
            "timestamp": time.time(),
            "stats": str(stats_path),
            "store": str(store_path),
            "out": str(out_path),
            "rows": written,
        }
        Path(str(out_path) + ".invocation.json").write_text(json.dumps(record, indent=1))
        click.echo(f"exported {written} labeled addresses -> {out_path}")


if __name__ == "__main__":
    main()
