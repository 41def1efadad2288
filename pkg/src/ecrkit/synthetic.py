"""Deterministic synthetic corpora for property tests and scaling runs.

Generated mentions carry randomized annotations from small vocabularies:
multi-valued arguments, nested ARG-1 chains up to a configurable depth, and
two annotators whose annotations agree most but not all of the time.
"""

from __future__ import annotations

import random

from .corpus import Corpus, Lexicons, Mention, resolve_nested_links

ANNOTATORS = ("A1", "A2")

_ROLESETS = [
    "acquire.01", "purchase.01", "announce.01", "sign.02", "state.01",
    "agree.01", "fire.01", "resign.01", "win.01", "open.02",
]
_VN_CLASSES = {
    "acquire.01": "13.5.1", "purchase.01": "13.5.1",
    "announce.01": "37.7", "state.01": "37.7",
    "sign.02": "25.1", "agree.01": "36.1",
    "fire.01": "10.10", "resign.01": "10.11",
    # win.01 and open.02 deliberately unmapped
}
_ENTITIES = ["HP", "EYP", "EDS", "Apple", "the board", "Jim O'Brien",
             "the Sixers", "Queens", "Microsoft"]
_LOCATIONS = ["Palo Alto", "New York", "/wiki/Queens", "Columbus"]
_TIMES = ["11-12-2007", "03-01-2008", "12-29-2008", "05-17-2009"]


def synthetic_lexicons(rng: random.Random | None = None) -> Lexicons:
    lex = Lexicons()
    for roleset, class_id in _VN_CLASSES.items():
        lex.vn_classes.setdefault(roleset, set()).add(class_id)
    lex.aliases.update({
        "hewlett-packard": "HP", "hp": "HP", "eyp": "EYP",
        "electronic data systems": "EDS", "eds": "EDS",
    })
    return lex


def _random_surface(rng: random.Random, vocab: list[str]) -> str:
    if rng.random() < 0.2:
        return "/".join(rng.sample(vocab, 2))
    return rng.choice(vocab)


def _random_annotation(rng: random.Random, nested_target: str | None) -> dict:
    # Keep a mention's own roleset distinct from its nested target so that a
    # link never matches its own duplicates (duplication must preserve
    # identifier sets exactly).
    roleset = rng.choice(_ROLESETS)
    while nested_target is not None and roleset == nested_target:
        roleset = rng.choice(_ROLESETS)
    ann: dict = {"roleset": roleset}
    if rng.random() < 0.85:
        ann["arg0"] = _random_surface(rng, _ENTITIES)
    if nested_target is not None and rng.random() < 0.5:
        ann["arg1"] = {"kind": "event", "roleset": nested_target}
    elif rng.random() < 0.8:
        ann["arg1"] = {"kind": "entity", "text": _random_surface(rng, _ENTITIES)}
    if rng.random() < 0.7:
        ann["arg_loc"] = rng.choice(_LOCATIONS)
    if rng.random() < 0.7:
        ann["arg_time"] = rng.choice(_TIMES)
    return ann


def random_corpus(n_mentions: int, seed: int = 0, max_nesting: int = 3,
                  split: str = "dev") -> Corpus:
    """A randomized corpus with resolved nested links and gold labels derived
    from a hidden cluster assignment."""
    from .corpus import _parse_annotation  # reuse the strict record parser

    rng = random.Random(seed)
    n_docs = max(1, n_mentions // 8)
    mentions: list[Mention] = []
    doc_rolesets: dict[str, list[str]] = {}
    for i in range(n_mentions):
        doc = f"doc_{rng.randrange(n_docs)}"
        topic = f"topic_{int(doc.split('_')[1]) % max(1, n_docs // 3 or 1)}"
        # Nested chains stay within a document; cap the chain depth by only
        # targeting rolesets already seen in the doc.
        seen = doc_rolesets.setdefault(doc, [])
        nested_target = rng.choice(seen) if seen and rng.random() < 0.4 else None
        annotations = {}
        for annotator in ANNOTATORS:
            if rng.random() < 0.95:
                record = _random_annotation(rng, nested_target)
                annotations[annotator] = _parse_annotation(record, line=0)
        if len(seen) < max_nesting and annotations:
            seen.append(next(iter(annotations.values())).roleset)
        trigger = rng.choice(["acquired", "announced", "signed", "fired", "won"])
        sentence = f"Entity {trigger} something in document {doc}."
        start = sentence.index(trigger)
        mentions.append(Mention(
            mention_id=f"m{i}",
            topic_id=topic,
            doc_id=doc,
            sentence_id=rng.randrange(12),
            sentence=sentence,
            trigger_text=trigger,
            trigger_span=(start, start + len(trigger)),
            lemma=trigger.rstrip("d").rstrip("e"),
            gold_cluster=f"c{rng.randrange(max(1, n_mentions // 3))}",
            split=split,
            annotations=annotations,
        ))
    corpus = Corpus(mentions)
    resolve_nested_links(corpus)
    return corpus
