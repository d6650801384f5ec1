"""Synthetic address corpora and transaction ledgers with ground truth.

Burn addresses are forged the way real ones are: pick the text you want,
decode it as if it were an address, keep the 21-byte versioned payload,
recompute the checksum, re-encode. The visible body survives whenever the
text decodes into the canonical 25 bytes with its top payload byte set,
which the constraints below guarantee:

  - 34-char texts need a first body char of Base58 index <= 21, or the
    decoded value no longer fits 24 bytes;
  - 33-char texts need index >= 6, or the re-encode gains a pad '1';
  - re-checksumming rewrites the last 6 chars and, when the new value
    crosses a 58**6 boundary (about 6% of draws), also the 7th-from-last,
    so every generated body ends with at least one sacrificial pad char.

Bech32 needs no tricks: the data symbols are free and the checksum is
appended, never overlapping the visible part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .addrcodec import (
    BASE58_ALPHABET,
    BECH32_CHARSET,
    base58check_decode,
    base58check_encode,
    bech32_encode,
    validate_address,
    shannon_entropy,
)
from .words import B58_WORDS, base58_word

_B58_INDEX = {c: i for i, c in enumerate(BASE58_ALPHABET)}

GENESIS_TS = 1390000000  # arbitrary fixed epoch start for synthetic blocks
BLOCK_SECONDS = 600

BURN_STYLES = (
    "run",
    "digits",
    "word-run",
    "words",
    "words-subtle",
    "bech32-qrun",
    "bech32-pattern",
    "words-padded",
)

# style weights for the training corpus: word styles oversampled so the
# classifier generalizes to full-phrase addresses ("words" already mixes
# padded and full-body shapes, so the padded-only style stays at zero)
_BURN_MIX = (0.11, 0.06, 0.15, 0.40, 0.10, 0.09, 0.09, 0.0)

# style weights for ledger burn populations: dominated by repetitive pads,
# which is what the observed burn population actually looks like; full-body
# word addresses stay rare because nothing below the entropy threshold can
# seed them at this scale, while the padded-only words style keeps enough
# screenable word mass for the loop to learn the text clusters
_LEDGER_BURN_MIX = (0.18, 0.08, 0.25, 0.02, 0.08, 0.13, 0.14, 0.12)

_MESSAGE_WORDS = tuple(
    w for w in B58_WORDS if "x" not in w and len(w) >= 3
)  # 'x' is the message pad char, so keep it out of the words themselves


def forge_base58_text(text: str) -> str:
    """Re-checksum an arbitrary Base58 text so it validates.

    The input must start with '1' and decode into 25 bytes under the
    canonical leading-one normalization; see the module docstring for the
    constraints that keep the visible body intact.
    """
    if not text or text[0] != "1":
        raise ValueError("forged texts must carry the '1' version prefix")
    num = 0
    for ch in text:
        num = num * 58 + _B58_INDEX[ch]
    pad = len(text) - len(text.lstrip("1"))
    body = num.to_bytes(25 - pad, "big")  # OverflowError when out of range
    payload = b"\x00" * pad + body
    return base58check_encode(payload[:21])


class _RippleCrossed(Exception):
    """Checksum rewrite carried past the final six digits; redraw."""


def forge_full(content: str) -> str:
    """Forge a body with zero pad: content runs straight into the checksum.

    Only the last 6 digits are rewritten, so this works whenever the new
    checksum leaves the quotient digits alone, which is most draws; callers
    retry with fresh content on _RippleCrossed.
    """
    L = len(content) + 7
    idx0 = _B58_INDEX[content[0]]
    ok = (idx0 <= 21) if L == 34 else (idx0 >= 6)
    if L not in (33, 34) or not ok:
        raise ValueError(f"content {content!r} cannot fill a body")
    text = "1" + content + "2" * 6
    forged = forge_base58_text(text)
    keep = L - 6
    if len(forged) != L or forged[:keep] != text[:keep]:
        raise _RippleCrossed(content)
    return forged


def forge_body(content: str, rng, pad: str = "X") -> str:
    """Wrap content into a forged, checksum-valid 33/34-char address.

    content occupies the positions right after the version '1'; the rest is
    pad chars, of which the final 6 become the checksum and the one before
    them absorbs any carry ripple. Pads of digit value 0 ('1') or 57 ('z')
    are rejected: a carry or borrow passes straight through them and can
    travel the whole pad run into the content.
    """
    if pad in ("1", "z"):
        raise ValueError(f"pad {pad!r} cannot absorb checksum ripple")
    idx0 = _B58_INDEX[content[0]]
    lengths = [
        L
        for L in (33, 34)
        if (idx0 <= 21 if L == 34 else idx0 >= 6) and len(content) <= L - 8
    ]
    if not lengths:
        raise ValueError(f"content {content!r} fits neither body length")
    length = int(lengths[0] if len(lengths) == 1 else rng.choice(lengths))
    text = "1" + content + pad * (length - 1 - len(content))
    forged = forge_base58_text(text)
    keep = length - 7
    assert len(forged) == length and forged[:keep] == text[:keep], (
        f"body not preserved: {text!r} -> {forged!r}"
    )
    return forged


def _txid(rng) -> str:
    return bytes(rng.integers(0, 256, 32, dtype=np.uint8)).hex()


def make_p2pkh(rng) -> str:
    return base58check_encode(b"\x00" + bytes(rng.integers(0, 256, 20, dtype=np.uint8)))


def make_p2sh(rng) -> str:
    return base58check_encode(b"\x05" + bytes(rng.integers(0, 256, 20, dtype=np.uint8)))


def make_bech32_random(rng, total_len: int = 42) -> str:
    # version symbol 'q' then free data; 6 checksum symbols are appended
    n_data = total_len - 3 - 6 - 1
    data = [0] + list(rng.integers(0, 32, n_data))
    return bech32_encode(data)


def make_regular_address(rng) -> str:
    roll = rng.random()
    if roll < 0.62:
        return make_p2pkh(rng)
    if roll < 0.82:
        return make_p2sh(rng)
    if roll < 0.97:
        return make_bech32_random(rng, 42)
    return make_bech32_random(rng, 62)


_RUN_CHARS_33 = [c for c in BASE58_ALPHABET if 6 <= _B58_INDEX[c] <= 56]
_RUN_CHARS_34 = [c for c in BASE58_ALPHABET if 1 <= _B58_INDEX[c] <= 21]
_WORDS_34 = tuple(
    w for w in B58_WORDS if _B58_INDEX[base58_word(w)[0]] <= 21
)


# the run chars people actually pick, by a wide margin, plus a second
# shelf of occasional ones; hand-made runs cluster hard on a few symbols
_COMMON_RUN = "XxoyVW"
_RARE_RUN = "BHKNbkmpsuvw2"


def _burn_run(rng) -> str:
    # one dominant repeated char plus a few salt chars; without the salt
    # the pad fill would collapse every (char, length) pair onto a single
    # address and the corpus dedup loop could never finish
    roll = rng.random()
    if roll < 0.20:
        # all-ones body: zero payload bytes render as a leading '1' run
        z = int(rng.integers(14, 21))
        tail = bytes(rng.integers(0, 256, 21 - z, dtype=np.uint8))
        return base58check_encode(b"\x00" * z + tail)
    if roll < 0.85:
        c = str(rng.choice(list(_COMMON_RUN)))
    else:
        c = str(rng.choice(list(_RARE_RUN)))
    budget = 25
    salt_pool = [x for x in _RUN_CHARS_33 if x != c]
    salt = "".join(str(s) for s in rng.choice(salt_pool, int(rng.integers(3, 7))))
    k = int(rng.integers(11, budget - len(salt) + 1))
    return forge_body(c * k + salt, rng, pad=c)


def _burn_digits(rng) -> str:
    digits = "123456789"
    n = int(rng.integers(24, 27))
    content = str(rng.choice(list("23456789"))) + "".join(
        str(rng.choice(list(digits))) for _ in range(n - 1)
    )
    return forge_body(content, rng, pad=str(rng.choice(list("23456789"))))


def _burn_word_run(rng) -> str:
    word = base58_word(str(rng.choice(_WORDS_34)))
    if rng.random() < 0.25:
        # a two-char motif repeated instead of a flat run, the HaHaHa look;
        # mostly keep the motif's capital as the pad so the motif runs
        # right up to the checksum. Few motif symbols: each (cap, vowel)
        # pair needs enough corpus mass to register at all
        motif = str(rng.choice(list("HLNST"))) + str(rng.choice(list("ao")))
        content = (word + motif * int(rng.integers(5, 10)))[:26]
        pad = motif[0] if rng.random() < 0.6 else str(rng.choice(list("Xx")))
        return forge_body(content, rng, pad=pad)
    pad = str(rng.choice(list("Xx")))
    run = pad * int(rng.integers(8, 15))
    content = word + run
    if len(content) > 26:
        content = content[:26]
    return forge_body(content, rng, pad=pad)


def _pick_words(rng, budget: int, pool) -> str:
    out = []
    used = 0
    for _ in range(6):
        w = base58_word(str(rng.choice(pool)))
        if used + len(w) > budget:
            break
        out.append(w)
        used += len(w)
    if not out:
        out = [base58_word(str(rng.choice(pool)))[:budget]]
    return "".join(out)


_WORDS_CAPS = tuple(w for w in _WORDS_34 if "i" not in w and "o" not in w)


def _fake_name(rng) -> str:
    # capitalized consonant-vowel syllables; memorial addresses are full
    # of personal names no dictionary covers
    name = str(rng.choice(list("BDFGHJKLMNPRSTVWY")))
    name += str(rng.choice(list("aeiouy")))
    for _ in range(int(rng.integers(1, 3))):
        if rng.random() < 0.7:
            name += str(rng.choice(list("bcdfghjkmnprstvw")))
        name += str(rng.choice(list("aeiouy")))
    return name


def _fill_words(rng, budget: int) -> str:
    # pack words until the body is essentially full; memorial and message
    # addresses tend to spend every char on text, sometimes after a date
    out = []
    used = 0
    if rng.random() < 0.1:
        # a leading '1' would fold into the version prefix and cut the
        # payload budget, so the date digits start at '2'
        lead = str(rng.choice(list("23456789")))
        if rng.random() < 0.5:
            lead += str(rng.choice(list("123456789")))
        out.append(lead)
        used = len(lead)
    names = 0
    for _ in range(12):
        if used >= budget - 2:
            break
        # names only after the first slot: their onsets run past the
        # first-char index cap for 34-char bodies. At most two per text;
        # real addresses mix names into words, not name after name
        if out and names < 2 and rng.random() < 0.3:
            w = _fake_name(rng)
            names += 1
        else:
            w = base58_word(str(rng.choice(_WORDS_34)))
        if used + len(w) > budget:
            continue
        out.append(w)
        used += len(w)
    return "".join(out)


def _word_text(rng, budget: int, allow_caps: bool = True) -> str:
    # camel case by default; sometimes ALL-CAPS words joined by '1', or an
    # l -> '1' swap, both common hand-forging conventions
    if allow_caps and rng.random() < 0.35:
        out, used = [], 0
        for _ in range(12):
            if used >= budget - 2:
                break
            w = base58_word(str(rng.choice(_WORDS_CAPS))).upper()
            join = 1 if out else 0
            if used + len(w) + join > budget:
                continue
            out.append(w)
            used += len(w) + join
        return "1".join(out)
    text = _fill_words(rng, budget)
    if "L" in text[1:] and rng.random() < 0.25:
        i = text.index("L", 1)
        text = text[:i] + "1" + text[i + 1:]
    return text


def _burn_words_padded(rng) -> str:
    # the screenable words shape on its own: a few words then a pad run
    # long enough that the entropy screen usually catches it
    pad = str(rng.choice(list("Xx")))
    content = _word_text(rng, int(rng.integers(17, 20)))
    return forge_body(content + pad * int(rng.integers(4, 8)), rng, pad=pad)


def _burn_words(rng) -> str:
    # two shapes: a few words with a visible pad run, or words filling the
    # body end to end with at most a char or two of pad before the checksum
    pad = str(rng.choice(list("Xx")))
    roll = rng.random()
    if roll < 0.35:
        content = _word_text(rng, int(rng.integers(17, 20)))
        return forge_body(content + pad * int(rng.integers(4, 8)), rng, pad=pad)
    if roll < 0.55:
        return forge_body(_word_text(rng, 26, allow_caps=False), rng, pad=pad)
    # zero pad: the text occupies every char up to the checksum itself
    for _ in range(12):
        content = _word_text(rng, 27, allow_caps=False)
        short = 27 - len(content)
        if short > 2:
            continue
        if short:
            content += "".join(
                str(rng.choice(list("129xX"))) for _ in range(short)
            )
        try:
            return forge_full(content)
        except _RippleCrossed:
            continue
    return forge_body(_word_text(rng, 26, allow_caps=False), rng, pad=pad)


def _burn_words_subtle(rng) -> str:
    # wordier and lightly padded; entropy usually lands above the screen.
    # budget 21 keeps at least 4 pad chars visible after the checksum,
    # which is what separates these from arbitrary text
    content = _pick_words(rng, 21, _WORDS_34)
    pad = str(rng.choice(list("XxyV2")))
    return forge_body(content, rng, pad=pad)


def _burn_bech32_qrun(rng) -> str:
    total = 42 if rng.random() < 0.55 else 62
    n_data = total - 9
    # mostly long runs; keep a solid minority near the 13-char vanity
    # floor, where the look is closest to a regular address
    if rng.random() < 0.4:
        k = int(rng.integers(13, 16))
    else:
        k = int(rng.integers(16, max(17, n_data - 4)))
    data = [0] * k + list(rng.integers(0, 32, n_data - k))
    return bech32_encode(data)


# the canonical eye-catching motifs; vanity patterns cluster on a few
# symbol pairs the way base58 runs cluster on a few characters
_BECH32_MOTIFS = tuple(
    [BECH32_CHARSET.index(c) for c in m]
    for m in ("x8", "z0", "2a", "0s", "8x8", "z2z")
)


def _burn_bech32_pattern(rng) -> str:
    total = 42 if rng.random() < 0.85 else 62
    n_data = total - 9
    motif = list(_BECH32_MOTIFS[int(rng.integers(0, len(_BECH32_MOTIFS)))])
    # motif prefix of varying reach, then the random data a matching key
    # would force; a fully patterned body is the rare jackpot
    if rng.random() < 0.25:
        j = n_data
    else:
        j = int(rng.integers(13, n_data - 2))
    data = (motif * (j // len(motif) + 1))[:j]
    data += list(rng.integers(0, 32, n_data - j))
    return bech32_encode(data)


_STYLE_MAKERS = {
    "run": _burn_run,
    "digits": _burn_digits,
    "word-run": _burn_word_run,
    "words": _burn_words,
    "words-subtle": _burn_words_subtle,
    "bech32-qrun": _burn_bech32_qrun,
    "bech32-pattern": _burn_bech32_pattern,
    "words-padded": _burn_words_padded,
}


def make_burn_address(rng, style: str) -> str:
    return _STYLE_MAKERS[style](rng)


def low_entropy_spender(rng, threshold: float = 4.0) -> str:
    """A checksum-valid address drawn from few symbols: entropy below the
    screen, but no long runs, no words. These model structured-but-spending
    addresses, the bulk of any sub-threshold population."""
    for _ in range(64):
        k = int(rng.integers(5, 9))
        symbols = rng.choice(list(_RUN_CHARS_33), size=k, replace=False)
        n = int(rng.integers(30, 33))
        content = "".join(str(s) for s in rng.choice(symbols, size=n))
        # avoid run-style artifacts; 5+ repeats start looking hand-made
        if _longest_run(content) >= 5:
            continue
        addr = forge_body(content[: 33 - 8], rng, pad=str(content[0]))
        if shannon_entropy(addr) < threshold - 0.05:
            return addr
    raise RuntimeError("could not draw a low-entropy spender; widen the retry budget")


def _longest_run(text: str) -> int:
    best = run = 1
    for a, b in zip(text, text[1:]):
        run = run + 1 if a == b else 1
        best = max(best, run)
    return best


@dataclass
class Corpus:
    addresses: list
    labels: np.ndarray  # 0 burn, 1 regular
    styles: list

    @property
    def burn_addresses(self):
        return [a for a, y in zip(self.addresses, self.labels) if y == 0]


def make_corpus(seed: int, n_regular: int = 50000, n_burn: int = 600) -> Corpus:
    """Random valid regulars plus forged burns in the documented style mix."""
    rng = np.random.default_rng(seed)
    addresses = []
    styles = []
    seen = set()

    style_counts = _apportion(n_burn, _BURN_MIX)
    for style, count in zip(BURN_STYLES, style_counts):
        made = 0
        while made < count:
            addr = make_burn_address(rng, style)
            if addr in seen:
                continue
            seen.add(addr)
            addresses.append(addr)
            styles.append(style)
            made += 1
    n_burn_actual = len(addresses)

    while len(addresses) < n_burn_actual + n_regular:
        addr = make_regular_address(rng)
        if addr in seen:
            continue
        seen.add(addr)
        addresses.append(addr)
        styles.append("regular")

    labels = np.ones(len(addresses), np.int64)
    labels[:n_burn_actual] = 0
    return Corpus(addresses=addresses, labels=labels, styles=styles)


def _apportion(total: int, weights) -> list:
    counts = [int(total * w) for w in weights]
    counts[0] += total - sum(counts)
    return counts


def encode_message(sentence_words, rng) -> tuple:
    """Pack camel-cased words into forged addresses, whole words per chunk.

    Returns (addresses, expected_payload) where expected_payload is the
    concatenated camel text; strip the pad char from an extracted payload
    before comparing against it.
    """
    parts = [base58_word(w) for w in sentence_words]
    if any(p is None for p in parts):
        raise ValueError("sentence contains words that cannot be base58-cased")
    chunks = []
    current = ""
    for part in parts:
        if len(current) + len(part) > 25 and current:
            chunks.append(current)
            current = part
        else:
            current += part
    if current:
        chunks.append(current)
    addresses = [forge_body(chunk, rng, pad="x") for chunk in chunks]
    return addresses, "".join(parts)


@dataclass
class LedgerTruth:
    """Everything the generator knows, for oracle-style assertions."""

    path: str
    n_txs: int = 0
    distinct_addresses: int = 0
    sum_inputs: int = 0
    sum_outputs: int = 0
    burn_addresses: set = field(default_factory=set)
    burn_styles: dict = field(default_factory=dict)
    never_spent: set = field(default_factory=set)
    spenders: set = field(default_factory=set)
    low_entropy_spenders: set = field(default_factory=set)
    message_txs: list = field(default_factory=list)  # (txid, addresses, camel_text)
    multi_burn_txs: list = field(default_factory=list)  # (txid, addresses)
    solo_burn_addresses: set = field(default_factory=set)


def make_ledger(
    path,
    seed: int,
    *,
    n_burn: int = 600,
    n_never_spent: int = 4000,
    n_spenders: int = 9000,
    n_low_entropy_spenders: int = 2500,
    n_messages: int = 12,
    n_funders: int = 24,
    extra_churn_txs: int = 0,
) -> LedgerTruth:
    """Write a block-ordered JSONL ledger and return its ground truth.

    Burn addresses only ever receive; spenders receive then spend; the low
    entropy spender population is what an entropy screen later mistakes
    for structure. extra_churn_txs adds funder-to-funder noise to scale the
    transaction count without new addresses.
    """
    rng = np.random.default_rng(seed)
    truth = LedgerTruth(path=str(path))

    style_counts = _apportion(n_burn, _LEDGER_BURN_MIX)
    burn_list = []
    seen = set()
    for style, count in zip(BURN_STYLES, style_counts):
        made = 0
        while made < count:
            addr = make_burn_address(rng, style)
            if addr in seen:
                continue
            seen.add(addr)
            burn_list.append((addr, style))
            made += 1

    message_specs = []
    for _ in range(n_messages):
        n_words = int(rng.integers(6, 12))
        sentence = [str(w) for w in rng.choice(_MESSAGE_WORDS, size=n_words)]
        while True:
            try:
                addrs, camel_text = encode_message(sentence, rng)
            except ValueError:
                sentence = sentence[1:]
                continue
            break
        if len(addrs) < 2 or any(a in seen for a in addrs):
            continue
        seen.update(addrs)
        message_specs.append((addrs, camel_text))
        for a in addrs:
            burn_list.append((a, "message"))

    def fresh(maker):
        while True:
            addr = maker(rng)
            if addr not in seen:
                seen.add(addr)
                return addr

    never_spent = [fresh(make_regular_address) for _ in range(n_never_spent)]
    spenders = [fresh(make_regular_address) for _ in range(n_spenders)]
    low_entropy = [fresh(low_entropy_spender) for _ in range(n_low_entropy_spenders)]
    funders = [fresh(make_p2pkh) for _ in range(n_funders)]

    truth.burn_addresses = {a for a, _ in burn_list}
    truth.burn_styles = dict(burn_list)
    truth.spenders = set(spenders) | set(low_entropy) | set(funders)
    truth.low_entropy_spenders = set(low_entropy)

    # event list: (kind, payload); spend events are scheduled after funding
    events = []
    for addr, _style in burn_list:
        if truth.burn_styles[addr] != "message":
            events.append(("burn", addr))
    for spec in message_specs:
        events.append(("message", spec))
    for addr in never_spent:
        events.append(("receive", addr))
        if rng.random() < 0.4:
            events.append(("receive", addr))
    pending_spends = []
    for addr in spenders + low_entropy:
        events.append(("fund", addr))
        pending_spends.append(addr)
    for _ in range(extra_churn_txs):
        events.append(("churn", None))
    rng.shuffle(events)

    # group some independent burns into shared transactions
    burn_queue = [a for a, s in burn_list if s != "message"]
    rng.shuffle(burn_queue)

    def burn_amount():
        roll = rng.random()
        if roll < 0.55:
            return int(rng.choice([330, 546, 660, 1000]))
        if roll < 0.85:
            return int(rng.choice([2000, 3000, 5430, 10000]))
        return int(rng.integers(10_001, 400_000))

    multi_burn_members = set()
    height = 0
    block_room = 0
    last_funder = 0
    lines = []
    spend_backlog = []

    def next_block():
        nonlocal height, block_room
        height += 1
        block_room = int(rng.integers(3, 9))

    next_block()

    def emit(inputs, outputs):
        nonlocal block_room
        if block_room == 0:
            next_block()
        block_room -= 1
        txid = _txid(rng)
        ts = GENESIS_TS + height * BLOCK_SECONDS
        lines.append(
            json.dumps(
                {
                    "txid": txid,
                    "blockHeight": height,
                    "timestamp": ts,
                    "inputs": [[a, v] for a, v in inputs],
                    "outputs": [[a, v] for a, v in outputs],
                }
            )
        )
        for _a, v in inputs:
            truth.sum_inputs += v
        for _a, v in outputs:
            truth.sum_outputs += v
        return txid

    def funder_input(total):
        nonlocal last_funder
        last_funder = (last_funder + 1) % len(funders)
        return funders[last_funder], total

    # seed the funders with coinbase-style rows (no inputs)
    for f in funders:
        emit([], [(f, 50_000_000_000)])

    for kind, payload in events:
        if kind == "burn":
            batch = [payload]
            # sometimes a second or third unrelated burn shares the tx
            while burn_queue and rng.random() < 0.18 and len(batch) < 4:
                cand = burn_queue.pop()
                if cand != payload and cand not in multi_burn_members and cand not in batch:
                    batch.append(cand)
            outputs = [(a, burn_amount()) for a in batch]
            total = sum(v for _a, v in outputs)
            txid = emit([funder_input(total)], outputs)
            if len(batch) > 1:
                truth.multi_burn_txs.append((txid, tuple(batch)))
                multi_burn_members.update(batch)
        elif kind == "message":
            addrs, camel_text = payload
            outputs = [(a, int(rng.choice([330, 546, 660]))) for a in addrs]
            total = sum(v for _a, v in outputs)
            txid = emit([funder_input(total)], outputs)
            truth.message_txs.append((txid, tuple(addrs), camel_text))
            multi_burn_members.update(addrs)
        elif kind == "receive":
            amount = int(rng.integers(5_000, 5_000_000))
            emit([funder_input(amount)], [(payload, amount)])
        elif kind == "fund":
            amount = int(rng.integers(10_000, 10_000_000))
            emit([funder_input(amount)], [(payload, amount)])
            spend_backlog.append((payload, amount))
            # spends trail fundings by a few blocks
            if len(spend_backlog) > 40:
                addr, amt = spend_backlog.pop(0)
                sink, _ = funder_input(amt)
                emit([(addr, amt)], [(sink, amt)])
        elif kind == "churn":
            amount = int(rng.integers(1_000, 100_000))
            src, _ = funder_input(amount)
            dst, _ = funder_input(amount)
            emit([(src, amount)], [(dst, amount)])

    while spend_backlog:
        addr, amt = spend_backlog.pop(0)
        sink, _ = funder_input(amt)
        emit([(addr, amt)], [(sink, amt)])

    truth.n_txs = len(lines)
    truth.never_spent = truth.burn_addresses | set(never_spent)
    for addr, style in burn_list:
        if addr not in multi_burn_members:
            truth.solo_burn_addresses.add(addr)
    all_addrs = truth.burn_addresses | set(never_spent) | truth.spenders
    truth.distinct_addresses = len(all_addrs)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return truth
