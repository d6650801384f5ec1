"""Small embedded dictionary of common English words.

Used three ways: the synthetic generator embeds words into forged address
bodies, the triage API highlights dictionary hits for annotators, and the
message reports score readability as dictionary coverage. Nothing here is
a tuned vocabulary; it is an ordinary frequency-style word list.
"""

WORDS = (
    "the and for you are not but all can had her was one our out day get has him "
    "his how man new now old see two way who boy did its let put say she too use "
    "dad mom god joy sky sun sea eye car war law pay buy own run top end big red "
    "hot yes men key cut lot far off ask bad bed box act add age ago aid aim air "
    "art bag ban bar bit cat cow cup die dig dog dry ear eat egg era fan fat few "
    "fit fly fun gap gas gun guy hit ice job kid lab lay leg lie lip low map mix "
    "net nor oil pan pen pet pig pop pot raw rid row sad set sit six son tax tea "
    "ten tie tip toe ton toy try van war web wet win yet zoo "
    "love life time year work back call come down even find give good have here "
    "home hope keep kind know last late left line live long look lost made make "
    "many mind miss more most move much must name need never next nice night "
    "only open over part play real rest rich ride rise road rock room rule safe "
    "same save seen self sell send show side sign site size slow small smile "
    "some soon sort soul star stay step stop such sure take talk tell than that "
    "them then they this thus together told took tree true turn upon very view "
    "wait walk want warm wash wave wear week well went were what when whom wide "
    "wife wild will wind wish with wood word wore your zero "
    "about above after again alive alone along always among anger angel apple "
    "beach begin being below birth bless blood board brave bread break bring "
    "brown build burn carry catch chain chance change charge check child claim "
    "class clean clear climb close cloud coast could count cover crack crash "
    "crazy cross crowd dance death dream drink drive early earth eight empty "
    "enjoy enter event every faith fall family famous fast father feel fight "
    "final fire first flame floor focus follow force forever forget form found "
    "free fresh friend front future game gave girl glad glass goes gold gone "
    "grace grand great green group grow happy hand hard heart heaven hello "
    "hero high hold holy honey hour house human hurt idea image join jump just "
    "king kiss lady land laugh learn leave less letter light like little local "
    "lord loss loud luck lucky magic major march market master match maybe "
    "mean meet memory mercy message metal might mine money month moon morning "
    "mother mount mouth music near negative number ocean offer once order other "
    "paid pain paper parent park party pass past peace people perfect phone "
    "piece place plain plan plane planet plant please point power press price "
    "pride prime print prize proof proud prove pure push queen quick quiet "
    "quite race rain raise reach read ready reason remember return right ring "
    "river rose round royal sand scale school score sense seven shall shape "
    "share sharp shine ship shirt shoe shop short shot sight silver since sing "
    "sister skin sleep smart smoke snow solid song sorry sound south space "
    "speak speed spend spent spirit sport spring stage stand start state steel "
    "still stone store storm story street strong study stuff sugar sweet swim "
    "table taken teach team tears thank there these thing think third those "
    "three threw throw thumb tiger today tomorrow tonight total touch tough "
    "tower town track trade train travel treat trust truth twice under union "
    "unite until upper urban usual value video visit voice vote wages watch "
    "water weary wedding welcome west where which while white whole whose "
    "woman women world worth would write wrong yellow young "
    "always america beautiful believe between birthday bitcoin brother country "
    "courage crypto darkness daughter diamond dignity eternal everyone family "
    "farewell forever freedom friends genesis goodbye grateful happiness "
    "history justice kingdom liberty lightning meaning memories midnight "
    "miracle mystery nothing passion patience promise rainbow respect "
    "satoshi service silence special station stellar success sunrise sunset "
    "thunder treasure victory village vision welfare winter wisdom wonder"
).split()
# a few words repeat across the tiers above; keep first occurrence only
WORDS = tuple(dict.fromkeys(WORDS))

_B58_BANNED = set("0OIl")


def camel(word: str) -> str:
    return word[0].upper() + word[1:]


def base58_word(word: str):
    """Camel-case a word into Base58-legal characters, or None if impossible.

    Lower-case 'l' is not Base58; it is swapped for upper-case 'L', a trick
    seen in real hand-made addresses. Words starting with i or o cannot be
    capitalized into the alphabet and are rejected.
    """
    text = camel(word).replace("l", "L")
    if any(c in _B58_BANNED for c in text):
        return None
    return text


B58_WORDS = tuple(w for w in WORDS if base58_word(w) is not None)

# bech32 data chars exclude b, i, and o entirely and have no upper case
BECH32_WORDS = tuple(w for w in WORDS if not set(w) & set("bio"))

WORD_SET = frozenset(WORDS)
MAX_WORD_LEN = max(len(w) for w in WORDS)
