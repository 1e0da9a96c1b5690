"""Deterministic COGS-layout corpus generator.

Produces train/dev/test/gen splits in the official 3-column format with the
same structural conventions: token-position variable indices, spaced logical
forms, definite-description prefixes, ``primitive`` rows, and a set of 21
lexical items that each occur in exactly one training row and reappear in
the generalization split in a withheld context. Three structural categories
(``pp_recursion``, ``cp_recursion``, ``obj_pp_to_subj_pp``) hold sentence
shapes absent from training.

The generator exists so the full pipeline can be exercised end to end at
realistic scale on machines without the official distribution; it is a
stand-in with the same shape, not a reproduction of the official rows.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cogs import Atom, Example, LogicalForm, ProperName, SplitFile, Variable, print_lf, save_split
from .errors import LexControlError

__all__ = ["CorpusSpec", "SMALL_SPEC", "FULL_SPEC", "CONTROLLED_LEMMAS", "build_corpus", "write_corpus"]


# ---------------------------------------------------------------------------
# Vocabulary

NOUNS = [
    "cake", "dog", "cat", "girl", "boy", "rose", "table", "chair", "donut", "cookie",
    "teacher", "doctor", "baby", "bird", "horse", "bear", "lion", "garden", "house", "box",
    "book", "ball", "melon", "pencil", "cup", "plate", "spoon", "fork", "towel", "pillow",
    "mirror", "shoe", "hat", "coat", "drum", "flute", "wagon", "truck", "boat", "plane",
    "kite", "puzzle", "crayon", "ladder", "bucket", "broom", "basket", "bottle", "candle", "jar",
    "lamp", "couch", "bed", "desk", "door", "window", "fence", "pond", "tree", "ring",
]

NAMES = [
    "Emma", "Liam", "Olivia", "Noah", "Ava", "Ethan", "Mia", "Lucas", "Sophia", "Mason",
    "Isabella", "Logan", "Charlotte", "James", "Amelia", "Benjamin", "Harper", "Elijah", "Evelyn", "Henry",
    "Abigail", "Jackson", "Emily", "Aiden", "Ella", "Samuel", "Scarlett", "David", "Grace", "Joseph",
    "Chloe", "Carter", "Lily", "Owen", "Hannah", "Wyatt", "Zoe", "Jack", "Nora", "Luke",
]

# (lemma, past, participle)
TRANS_VERBS = [
    ("like", "liked", "liked"), ("see", "saw", "seen"), ("eat", "ate", "eaten"),
    ("help", "helped", "helped"), ("find", "found", "found"), ("touch", "touched", "touched"),
    ("hold", "held", "held"), ("carry", "carried", "carried"), ("push", "pushed", "pushed"),
    ("pull", "pulled", "pulled"), ("wash", "washed", "washed"), ("kick", "kicked", "kicked"),
    ("hug", "hugged", "hugged"), ("paint", "painted", "painted"), ("draw", "drew", "drawn"),
    ("throw", "threw", "thrown"), ("catch", "caught", "caught"), ("clean", "cleaned", "cleaned"),
]

# (lemma, past, base)
UNERG_VERBS = [
    ("smile", "smiled", "smile"), ("sleep", "slept", "sleep"), ("laugh", "laughed", "laugh"),
    ("dance", "danced", "dance"), ("jump", "jumped", "jump"), ("run", "ran", "run"),
    ("sneeze", "sneezed", "sneeze"), ("nap", "napped", "nap"),
]

UNACC_VERBS = [
    ("roll", "rolled"), ("freeze", "froze"), ("shatter", "shattered"),
    ("bounce", "bounced"), ("melt", "melted"), ("float", "floated"),
]

DATIVE_VERBS = [
    ("give", "gave", "given"), ("send", "sent", "sent"), ("hand", "handed", "handed"),
    ("offer", "offered", "offered"), ("mail", "mailed", "mailed"), ("toss", "tossed", "tossed"),
]

CP_VERBS = [("say", "said"), ("notice", "noticed"), ("believe", "believed"),
            ("declare", "declared"), ("hope", "hoped")]

INF_VERBS = [("want", "wanted"), ("try", "tried"), ("plan", "planned"), ("long", "longed")]

PREPS = ["on", "in", "beside"]

# 21 one-shot items: lemma -> (kind, sentence surface, gen category)
CONTROLLED = {
    "hedgehog": ("common", "hedgehog", "subj_to_obj_common"),
    "cockroach": ("common", "cockroach", "obj_to_subj_common"),
    "pangolin": ("common", "pangolin", "pp_obj_to_subj_common"),
    "wombat": ("common", "wombat", "unacc_subj_to_obj_common"),
    "muskrat": ("common", "muskrat", "recipient_to_subj_common"),
    "stingray": ("common", "stingray", "dative_theme_to_subj_common"),
    "sloth": ("common", "sloth", "unerg_subj_to_obj_common"),
    "gopher": ("common", "gopher", "passive_subj_to_obj_common"),
    "ocelot": ("common", "ocelot", "do_theme_to_subj_common"),
    "Lina": ("proper", "Lina", "subj_to_obj_proper"),
    "Charlie": ("proper", "Charlie", "obj_to_subj_proper"),
    "Paula": ("proper", "Paula", "recipient_to_subj_proper"),
    "Zadie": ("proper", "Zadie", "pp_obj_to_subj_proper"),
    "Kiran": ("proper", "Kiran", "unerg_subj_to_obj_proper"),
    "juggle": ("verb", "juggled", "active_to_passive"),
    "sculpt": ("verb", "sculpted", "passive_to_active"),
    "tattoo": ("verb", "tattooed", "agented_passive_to_active"),
    "grill": ("verb", "grilled", "objomit_to_trans"),
    "crumble": ("verb", "crumbled", "unacc_to_trans"),
    "lob": ("verb", "lobbed", "do_dative_to_pp_dative"),
    "ship": ("verb", "shipped", "pp_dative_to_do_dative"),
}

CONTROLLED_LEMMAS = tuple(sorted(CONTROLLED))

STRUCTURAL_CATEGORIES = ("pp_recursion", "cp_recursion", "obj_pp_to_subj_pp")

PRIMITIVE_NOUNS = ["cake", "dog", "cat"]
PRIMITIVE_VERBS = ["touch", "help"]
PRIMITIVE_NAMES = ["Emma", "Liam"]


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 20240601
    train_rows: int = 24000
    gen_per_category: int = 875
    dev_rows: int = 3000
    test_rows: int = 3000
    vocab_scale: float = 1.0


FULL_SPEC = CorpusSpec()
SMALL_SPEC = CorpusSpec(train_rows=600, gen_per_category=6, dev_rows=60, test_rows=60,
                        vocab_scale=0.25)


def _scaled(seq, scale, floor=4):
    if scale >= 1.0:
        return list(seq)
    return list(seq)[: max(floor, int(len(seq) * scale))]


class _Vocab:
    def __init__(self, scale: float):
        self.nouns = _scaled(NOUNS, scale, floor=12)
        self.names = _scaled(NAMES, scale, floor=8)
        self.trans = _scaled(TRANS_VERBS, scale)
        self.unerg = _scaled(UNERG_VERBS, scale)
        self.unacc = _scaled(UNACC_VERBS, scale)
        self.dative = _scaled(DATIVE_VERBS, scale)
        self.cp = _scaled(CP_VERBS, scale, floor=3)
        self.inf = _scaled(INF_VERBS, scale, floor=2)


def _pick(rng: np.random.Generator, seq):
    return seq[int(rng.integers(len(seq)))]


def _weighted(rng: np.random.Generator, table: list[tuple[str, float]]) -> str:
    roll = rng.random()
    acc = 0.0
    for name, w in table:
        acc += w
        if roll < acc:
            return name
    return table[-1][0]


# ---------------------------------------------------------------------------
# Row builder


class _Row:
    def __init__(self):
        self.tokens: list[str] = []
        self.definites: list[tuple[str, Variable]] = []
        self.emissions: list[tuple[int, Atom]] = []

    def word(self, w: str) -> int:
        self.tokens.append(w)
        return len(self.tokens) - 1

    def np(self, rng, vocab: _Vocab, kind: str, word: str | None = None):
        """Add an NP; returns (term, head_position, head_lemma)."""
        initial = not self.tokens
        if kind == "proper":
            name = word or _pick(rng, vocab.names)
            pos = self.word(name)
            return ProperName(name), pos, None
        noun = word or _pick(rng, vocab.nouns)
        if kind == "def":
            self.word("The" if initial else "the")
            pos = self.word(noun)
            self.definites.append((noun, Variable(pos)))
        else:
            self.word("A" if initial else "a")
            pos = self.word(noun)
            self.emissions.append((pos, Atom(noun, (), (Variable(pos),))))
        return Variable(pos), pos, noun

    def verb(self, surface: str, lemma: str, roles: list[tuple[str, object]]) -> int:
        pos = self.word(surface)
        event = Variable(pos)
        for role, term in roles:
            self.emissions.append((pos, Atom(lemma, (role,), (event, term))))
        return pos

    def pp_chain(self, rng, vocab: _Vocab, head_lemma: str, head_term, links):
        """Attach a chain of PPs; links is a list of (prep, kind, word|None)."""
        for prep, kind, word in links:
            prep_pos = self.word(prep)
            term, pos, lemma = self.np(rng, vocab, kind, word)
            self.emissions.append(
                (prep_pos, Atom(head_lemma, ("nmod", prep), (head_term, term)))
            )
            if lemma is None:
                break  # proper PP objects end the chain
            head_lemma, head_term = lemma, term

    def finish(self, category: str) -> Example:
        self.word(".")
        atoms = tuple(atom for _, atom in sorted(self.emissions, key=lambda e: e[0]))
        lf = LogicalForm(definites=tuple(self.definites), atoms=atoms)
        return Example(
            source=" ".join(self.tokens),
            target=print_lf(lf, "spaced"),
            category=category,
        )


# ---------------------------------------------------------------------------
# Frame builders; every argument defaults to a random filler draw.

_SUBJ_KIND = [("def", 0.35), ("indef", 0.25), ("proper", 0.40)]
_OBJ_KIND = [("def", 0.35), ("indef", 0.30), ("proper", 0.35)]
_PPOBJ_KIND = [("def", 0.35), ("indef", 0.30), ("proper", 0.35)]
_RECIP_KIND = [("def", 0.40), ("indef", 0.20), ("proper", 0.40)]
_DTHEME_KIND = [("def", 0.30), ("indef", 0.40), ("proper", 0.30)]
_PSUBJ_KIND = [("def", 0.50), ("indef", 0.30), ("proper", 0.20)]
_BYAGENT_KIND = [("def", 0.30), ("indef", 0.20), ("proper", 0.50)]
_PREP_W = [("on", 0.50), ("in", 0.25), ("beside", 0.25)]


def _np_spec(rng, spec, weights):
    if spec is not None:
        return spec
    return (_weighted(rng, weights), None)


def _clause_trans(row, rng, vocab, *, subj=None, verb=None, obj=None, pp_links=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past, _ = verb or _pick(rng, vocab.trans)
    if pp_links is None:
        kind, word = _np_spec(rng, obj, _OBJ_KIND)
    else:
        kind, word = _np_spec(rng, obj, [("def", 0.55), ("indef", 0.45)])
    v = row.word(past)
    row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
    o_term, _, o_lemma = row.np(rng, vocab, kind, word)
    row.emissions.append((v, Atom(lemma, ("theme",), (Variable(v), o_term))))
    if pp_links:
        row.pp_chain(rng, vocab, o_lemma, o_term, pp_links)


def _clause_unerg(row, rng, vocab, *, subj=None, verb=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past, _ = verb or _pick(rng, vocab.unerg)
    row.verb(past, lemma, [("agent", s_term)])


def _clause_objomit(row, rng, vocab, *, subj=None, verb=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past = verb or _pick(rng, vocab.trans)[:2]
    row.verb(past, lemma, [("agent", s_term)])


def _clause_unacc(row, rng, vocab, *, subj=None, verb=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past = verb or _pick(rng, vocab.unacc)
    row.verb(past, lemma, [("theme", s_term)])


def _clause_passive(row, rng, vocab, *, subj=None, verb=None, agented=None, by=None):
    kind, word = _np_spec(rng, subj, _PSUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    if verb is None:
        trans = _pick(rng, vocab.trans)
        lemma, part = trans[0], trans[2]
    else:
        lemma, part = verb
    row.word("was")
    if agented is None:
        agented = rng.random() < 0.5
    if agented:
        v = row.word(part)
        row.emissions.append((v, Atom(lemma, ("theme",), (Variable(v), s_term))))
        row.word("by")
        kind, word = _np_spec(rng, by, _BYAGENT_KIND)
        a_term, _, _ = row.np(rng, vocab, kind, word)
        row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), a_term))))
    else:
        row.verb(part, lemma, [("theme", s_term)])


def _clause_do_dative(row, rng, vocab, *, subj=None, verb=None, recipient=None, theme=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past, _ = verb or _pick(rng, vocab.dative)
    v = row.word(past)
    row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
    kind, word = _np_spec(rng, recipient, _RECIP_KIND)
    r_term, _, _ = row.np(rng, vocab, kind, word)
    row.emissions.append((v, Atom(lemma, ("recipient",), (Variable(v), r_term))))
    kind, word = _np_spec(rng, theme, _DTHEME_KIND)
    t_term, _, _ = row.np(rng, vocab, kind, word)
    row.emissions.append((v, Atom(lemma, ("theme",), (Variable(v), t_term))))


def _clause_pp_dative(row, rng, vocab, *, subj=None, verb=None, theme=None, recipient=None):
    kind, word = _np_spec(rng, subj, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past, _ = verb or _pick(rng, vocab.dative)
    v = row.word(past)
    row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
    kind, word = _np_spec(rng, theme, _DTHEME_KIND)
    t_term, _, _ = row.np(rng, vocab, kind, word)
    row.emissions.append((v, Atom(lemma, ("theme",), (Variable(v), t_term))))
    row.word("to")
    kind, word = _np_spec(rng, recipient, _RECIP_KIND)
    r_term, _, _ = row.np(rng, vocab, kind, word)
    row.emissions.append((v, Atom(lemma, ("recipient",), (Variable(v), r_term))))


_EMBED_W = [("trans", 0.25), ("unerg", 0.25), ("objomit", 0.10), ("unacc", 0.20), ("passive", 0.20)]

_EMBED_BUILDERS = {
    "trans": _clause_trans,
    "unerg": _clause_unerg,
    "objomit": _clause_objomit,
    "unacc": _clause_unacc,
    "passive": _clause_passive,
}


def _clause_cp(row, rng, vocab, depth: int):
    kind, word = _np_spec(rng, None, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past = _pick(rng, vocab.cp)
    v = row.word(past)
    row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
    row.word("that")
    if depth > 1:
        embedded_v = _clause_cp(row, rng, vocab, depth - 1)
    else:
        frame = _weighted(rng, _EMBED_W)
        mark = len(row.tokens)
        _EMBED_BUILDERS[frame](row, rng, vocab)
        embedded_v = None
        for pos, atom in row.emissions:
            if pos >= mark and atom.role_path and atom.role_path[0] != "nmod":
                embedded_v = pos
                break
        assert embedded_v is not None
    row.emissions.append((v, Atom(lemma, ("ccomp",), (Variable(v), Variable(embedded_v)))))
    return v


def _clause_inf(row, rng, vocab):
    kind, word = _np_spec(rng, None, _SUBJ_KIND)
    s_term, _, _ = row.np(rng, vocab, kind, word)
    lemma, past = _pick(rng, vocab.inf)
    v = row.word(past)
    row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
    row.word("to")
    b_lemma, _, base = _pick(rng, vocab.unerg)
    b = row.word(base)
    row.emissions.append((v, Atom(lemma, ("xcomp",), (Variable(v), Variable(b)))))
    row.emissions.append((b, Atom(b_lemma, ("agent",), (Variable(b), s_term))))


def _random_pp_links(rng, vocab, depth: int):
    links = []
    for i in range(depth):
        prep = _weighted(rng, _PREP_W)
        if i < depth - 1:
            kind = _weighted(rng, [("def", 0.55), ("indef", 0.45)])
        else:
            kind = _weighted(rng, _PPOBJ_KIND)
        links.append((prep, kind, None))
    return links


_FRAME_W = [
    ("trans", 0.25), ("trans_pp", 0.20), ("unerg", 0.07), ("unacc", 0.07),
    ("objomit", 0.05), ("passive", 0.10), ("do_dative", 0.08), ("pp_dative", 0.08),
    ("cp", 0.09), ("inf", 0.01),
]


def _filler_row(rng, vocab: _Vocab, category: str) -> Example:
    row = _Row()
    frame = _weighted(rng, _FRAME_W)
    if frame == "trans":
        _clause_trans(row, rng, vocab)
    elif frame == "trans_pp":
        depth = 2 if rng.random() < 0.2 else 1
        _clause_trans(row, rng, vocab, pp_links=_random_pp_links(rng, vocab, depth))
    elif frame == "unerg":
        _clause_unerg(row, rng, vocab)
    elif frame == "unacc":
        _clause_unacc(row, rng, vocab)
    elif frame == "objomit":
        _clause_objomit(row, rng, vocab)
    elif frame == "passive":
        _clause_passive(row, rng, vocab)
    elif frame == "do_dative":
        _clause_do_dative(row, rng, vocab)
    elif frame == "pp_dative":
        _clause_pp_dative(row, rng, vocab)
    elif frame == "cp":
        depth = 2 if rng.random() < 0.1 else 1
        _clause_cp(row, rng, vocab, depth)
    else:
        _clause_inf(row, rng, vocab)
    return row.finish(category)


# ---------------------------------------------------------------------------
# Exposure rows (one per controlled item, fixed wording)


def _exposure_rows(vocab: _Vocab) -> list[Example]:
    rng = np.random.default_rng(0)  # builders only draw when a part is unspecified

    def build(fn, **kw) -> Example:
        row = _Row()
        fn(row, rng, vocab, **kw)
        return row.finish("in_distribution")

    return [
        build(_clause_trans, subj=("def", "hedgehog"), verb=("touch", "touched", "touched"),
              obj=("def", "bottle")),
        build(_clause_trans, subj=("proper", "Emma"), verb=("carry", "carried", "carried"),
              obj=("def", "cockroach")),
        build(_clause_trans, subj=("def", "boy"), verb=("wash", "washed", "washed"),
              obj=("def", "cup"), pp_links=[("on", "def", "pangolin")]),
        build(_clause_unacc, subj=("indef", "wombat"), verb=("freeze", "froze")),
        build(_clause_do_dative, subj=("proper", "Liam"), verb=("give", "gave", "given"),
              recipient=("def", "muskrat"), theme=("def", "box")),
        build(_clause_pp_dative, subj=("proper", "Emma"), verb=("mail", "mailed", "mailed"),
              theme=("indef", "stingray"), recipient=("proper", "Noah")),
        build(_clause_unerg, subj=("indef", "sloth"), verb=("dance", "danced", "dance")),
        build(_clause_passive, subj=("def", "gopher"), verb=("carry", "carried"), agented=False),
        build(_clause_do_dative, subj=("proper", "Ava"), verb=("hand", "handed", "handed"),
              recipient=("def", "boy"), theme=("def", "ocelot")),
        build(_clause_trans, subj=("proper", "Lina"), verb=("kick", "kicked", "kicked"),
              obj=("def", "ball")),
        build(_clause_trans, subj=("def", "teacher"), verb=("see", "saw", "seen"),
              obj=("proper", "Charlie")),
        build(_clause_do_dative, subj=("proper", "Mia"), verb=("send", "sent", "sent"),
              recipient=("proper", "Paula"), theme=("def", "book")),
        build(_clause_trans, subj=("def", "boy"), verb=("clean", "cleaned", "cleaned"),
              obj=("def", "plate"), pp_links=[("on", "proper", "Zadie")]),
        build(_clause_unerg, subj=("proper", "Kiran"), verb=("laugh", "laughed", "laugh")),
        build(_clause_trans, subj=("def", "girl"), verb=("juggle", "juggled", "juggled"),
              obj=("def", "melon")),
        build(_clause_passive, subj=("def", "donut"), verb=("sculpt", "sculpted"), agented=False),
        build(_clause_passive, subj=("def", "boy"), verb=("tattoo", "tattooed"), agented=True,
              by=("proper", "Emma")),
        build(_clause_objomit, subj=("proper", "Noah"), verb=("grill", "grilled")),
        build(_clause_unacc, subj=("indef", "cookie"), verb=("crumble", "crumbled")),
        build(_clause_do_dative, subj=("proper", "Emma"), verb=("lob", "lobbed", "lobbed"),
              recipient=("def", "girl"), theme=("def", "kite")),
        build(_clause_pp_dative, subj=("proper", "Liam"), verb=("ship", "shipped", "shipped"),
              theme=("def", "box"), recipient=("proper", "Emma")),
    ]


def _primitive_rows(vocab: _Vocab) -> list[Example]:
    rows = []
    for noun in PRIMITIVE_NOUNS:
        if noun in vocab.nouns:
            rows.append(Example(noun, f"LAMBDA a . {noun} ( a )", "primitive"))
    for lemma in PRIMITIVE_VERBS:
        if any(v[0] == lemma for v in vocab.trans):
            target = (
                f"LAMBDA a . LAMBDA b . LAMBDA e . {lemma} . agent ( e , b ) "
                f"AND {lemma} . theme ( e , a )"
            )
            rows.append(Example(lemma, target, "primitive"))
    for name in PRIMITIVE_NAMES:
        if name in vocab.names:
            rows.append(Example(name, name, "primitive"))
    return rows


# ---------------------------------------------------------------------------
# Generalization rows: each lexical category reuses its item in a new context.


def _gen_row(rng, vocab: _Vocab, lemma: str, category: str) -> Example:
    kind, surface, _ = CONTROLLED[lemma]
    row = _Row()
    if lemma == "hedgehog":
        _clause_trans(row, rng, vocab, obj=("def", "hedgehog"))
    elif lemma == "cockroach":
        _clause_trans(row, rng, vocab, subj=("def", "cockroach"))
    elif lemma == "pangolin":
        _clause_trans(row, rng, vocab, subj=("def", "pangolin"))
    elif lemma == "wombat":
        _clause_trans(row, rng, vocab, obj=("indef", "wombat"))
    elif lemma == "muskrat":
        _clause_trans(row, rng, vocab, subj=("def", "muskrat"))
    elif lemma == "stingray":
        _clause_trans(row, rng, vocab, subj=("indef", "stingray"))
    elif lemma == "sloth":
        _clause_trans(row, rng, vocab, obj=("indef", "sloth"))
    elif lemma == "gopher":
        _clause_trans(row, rng, vocab, obj=("def", "gopher"))
    elif lemma == "ocelot":
        _clause_trans(row, rng, vocab, subj=("def", "ocelot"))
    elif lemma in ("Lina", "Kiran"):
        _clause_trans(row, rng, vocab, obj=("proper", lemma))
    elif lemma in ("Charlie", "Paula", "Zadie"):
        _clause_trans(row, rng, vocab, subj=("proper", lemma))
    elif lemma == "juggle":
        _clause_passive(row, rng, vocab, verb=("juggle", "juggled"))
    elif lemma == "sculpt":
        _clause_trans(row, rng, vocab, verb=("sculpt", "sculpted", "sculpted"))
    elif lemma == "tattoo":
        _clause_trans(row, rng, vocab, verb=("tattoo", "tattooed", "tattooed"))
    elif lemma == "grill":
        _clause_trans(row, rng, vocab, verb=("grill", "grilled", "grilled"))
    elif lemma == "crumble":
        _clause_trans(row, rng, vocab, verb=("crumble", "crumbled", "crumbled"))
    elif lemma == "lob":
        _clause_pp_dative(row, rng, vocab, verb=("lob", "lobbed", "lobbed"))
    elif lemma == "ship":
        _clause_do_dative(row, rng, vocab, verb=("ship", "shipped", "shipped"))
    else:  # pragma: no cover
        raise LexControlError(f"no generalization builder for {lemma}")
    return row.finish(category)


def _structural_row(rng, vocab: _Vocab, category: str) -> Example:
    row = _Row()
    if category == "pp_recursion":
        depth = int(rng.integers(3, 6))
        _clause_trans(row, rng, vocab, pp_links=_random_pp_links(rng, vocab, depth))
    elif category == "cp_recursion":
        depth = int(rng.integers(3, 6))
        _clause_cp(row, rng, vocab, depth)
    else:  # obj_pp_to_subj_pp: a PP attached to the subject, unseen in training
        kind = _weighted(rng, [("def", 0.55), ("indef", 0.45)])
        s_term, _, s_lemma = row.np(rng, vocab, kind)
        row.pp_chain(rng, vocab, s_lemma, s_term, _random_pp_links(rng, vocab, 1))
        lemma, past, _ = _pick(rng, vocab.trans)
        v = row.word(past)
        row.emissions.append((v, Atom(lemma, ("agent",), (Variable(v), s_term))))
        o_kind, o_word = _np_spec(rng, None, _OBJ_KIND)
        o_term, _, _ = row.np(rng, vocab, o_kind, o_word)
        row.emissions.append((v, Atom(lemma, ("theme",), (Variable(v), o_term))))
    return row.finish(category)


# ---------------------------------------------------------------------------
# Split assembly


def _fill_distinct(count: int, seen: set[str], make, what: str, max_tries_factor: int = 60):
    rows: list[Example] = []
    tries = 0
    limit = count * max_tries_factor + 1000
    while len(rows) < count:
        tries += 1
        if tries > limit:
            raise LexControlError(f"could not generate {count} distinct rows for {what}")
        ex = make()
        if ex.source in seen:
            continue
        seen.add(ex.source)
        rows.append(ex)
    return rows


def build_corpus(spec: CorpusSpec = FULL_SPEC) -> dict[str, SplitFile]:
    """Generate train/dev/test/gen splits; deterministic in ``spec.seed``."""
    vocab = _Vocab(spec.vocab_scale)
    master = np.random.default_rng(spec.seed)
    seeds = master.integers(0, 2**63 - 1, size=8)

    exposures = _exposure_rows(vocab)
    primitives = _primitive_rows(vocab)
    n_filler = spec.train_rows - len(exposures) - len(primitives)
    if n_filler < 0:
        raise LexControlError("train_rows too small for the exposure and primitive rows")

    train_seen = {ex.source for ex in exposures}
    rng = np.random.default_rng(seeds[0])
    filler = _fill_distinct(
        n_filler, train_seen, lambda: _filler_row(rng, vocab, "in_distribution"), "train"
    )
    train_rows = exposures + primitives + filler
    order = np.random.default_rng(seeds[1]).permutation(len(train_rows))
    train_rows = [train_rows[i] for i in order]

    rng_dev = np.random.default_rng(seeds[2])
    dev_seen = set(train_seen)
    dev_rows = _fill_distinct(
        spec.dev_rows, dev_seen, lambda: _filler_row(rng_dev, vocab, "in_distribution"), "dev"
    )
    rng_test = np.random.default_rng(seeds[3])
    test_seen = set(train_seen)
    test_rows = _fill_distinct(
        spec.test_rows, test_seen, lambda: _filler_row(rng_test, vocab, "in_distribution"), "test"
    )

    gen_rows: list[Example] = []
    rng_gen = np.random.default_rng(seeds[4])
    for lemma in CONTROLLED_LEMMAS:
        category = CONTROLLED[lemma][2]
        cat_seen: set[str] = set()
        gen_rows.extend(
            _fill_distinct(
                spec.gen_per_category,
                cat_seen,
                lambda: _gen_row(rng_gen, vocab, lemma, category),
                category,
            )
        )
    for category in STRUCTURAL_CATEGORIES:
        cat_seen = set()
        gen_rows.extend(
            _fill_distinct(
                spec.gen_per_category,
                cat_seen,
                lambda: _structural_row(rng_gen, vocab, category),
                category,
            )
        )

    return {
        "train": SplitFile(train_rows, "train"),
        "dev": SplitFile(dev_rows, "dev"),
        "test": SplitFile(test_rows, "test"),
        "gen": SplitFile(gen_rows, "gen"),
    }


def write_corpus(corpus: dict[str, SplitFile], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, split in corpus.items():
        save_split(split, out / f"{name}.tsv")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Generate a COGS-layout corpus.")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=FULL_SPEC.seed)
    parser.add_argument("--scale", choices=["small", "full"], default="full")
    args = parser.parse_args(argv)
    base = SMALL_SPEC if args.scale == "small" else FULL_SPEC
    spec = CorpusSpec(
        seed=args.seed,
        train_rows=base.train_rows,
        gen_per_category=base.gen_per_category,
        dev_rows=base.dev_rows,
        test_rows=base.test_rows,
        vocab_scale=base.vocab_scale,
    )
    write_corpus(build_corpus(spec), args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
