"""Canonical event identifiers.

An identifier is an ordered tuple of canonical tokens built from a mention's
roleset and arguments. Two mentions corefer when any of their identifiers
match, so everything here must be deterministic and purely value-based.

Three identifier families:

* ``eid0``   - <ARG-0, roleset, ARG-1> for standard events.
* ``eid_n``  - nested events flattened along the ARG-1 event-link chain:
  every root-to-cut prefix of <ARG-0, roleset> pairs followed by the
  terminal event's full eid0.
* ``eid_lt`` - <ARG-0, roleset, ARG-Loc, ARG-Time>; ARG-1 is excluded.

Multi-valued arguments (``a/b`` surfaces) and multi-class rolesets expand by
Cartesian product, so each function returns a *set* of identifiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .corpus import ArgValue, EventAnnotation, Lexicons, Mention

KEY_SEP = "\x1f"
EMPTY_SLOT = "∅"  # placeholder token when allow_empty_slots is on

VERBATIM = "verbatim"
VN_CLASS = "vn_class"


class MissingAnnotationError(KeyError):
    def __init__(self, mention_id: str, annotator: str):
        super().__init__(f"mention {mention_id!r} has no annotation by {annotator!r}")
        self.mention_id = mention_id
        self.annotator = annotator


@dataclass(frozen=True)
class EventIdentifier:
    tokens: tuple[str, ...]
    kind: str  # "eid0" | "eidN" | "eidLT"

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("identifier must have at least one token")


@dataclass(frozen=True)
class EidConfig:
    roleset_mode: str = VERBATIM
    max_depth: int = 3
    allow_empty_slots: bool = False
    multi_value_expansion: bool = True
    include_connecting_roleset: bool = False

    def __post_init__(self):
        if not 0 <= self.max_depth <= 8:
            raise ValueError("max_depth must be in [0, 8]")
        if self.roleset_mode not in (VERBATIM, VN_CLASS):
            raise ValueError(f"unknown roleset_mode {self.roleset_mode!r}")


def normalize_surface(surface: str) -> str:
    """Case-fold, trim, and collapse internal whitespace; strip the key
    separator byte so tokens are always safe to serialize."""
    cleaned = surface.replace(KEY_SEP, " ")
    return " ".join(cleaned.casefold().split())


def canonicalize_argument(value: ArgValue, lexicons: Lexicons,
                          cfg: Optional[EidConfig] = None) -> list[str]:
    """Map an argument surface to canonical tokens via the alias map.

    Each ``/``-separated alternative is normalized then alias-looked-up;
    unknown surfaces fall back to their normalized form. Duplicates are
    dropped, input order kept.
    """
    expand = cfg.multi_value_expansion if cfg is not None else True
    surfaces = value.alternatives() if expand else [value.surface]
    out: list[str] = []
    for surface in surfaces:
        norm = normalize_surface(surface)
        if not norm:
            continue
        token = lexicons.aliases.get(norm, norm)
        if token not in out:
            out.append(token)
    return out


def canonicalize_roleset(roleset: str, mode: str, lexicons: Lexicons) -> list[str]:
    """Verbatim mode keeps the roleset; vn_class mode maps to its VerbNet
    classes (sorted), falling back to the roleset itself when unmapped."""
    if mode == VERBATIM:
        return [roleset]
    if mode == VN_CLASS:
        classes = lexicons.vn_classes.get(roleset)
        return sorted(classes) if classes else [roleset]
    raise ValueError(f"unknown roleset mode {mode!r}")


def _slot_tokens(value: Optional[ArgValue], lexicons: Lexicons,
                 cfg: EidConfig) -> list[str]:
    if value is not None:
        tokens = canonicalize_argument(value, lexicons, cfg)
        if tokens:
            return tokens
    return [EMPTY_SLOT] if cfg.allow_empty_slots else []


def _annotation(mention: Mention, annotator: str) -> EventAnnotation:
    ann = mention.annotations.get(annotator)
    if ann is None:
        raise MissingAnnotationError(mention.mention_id, annotator)
    return ann


def _arg1_terminal_tokens(ann: EventAnnotation, lexicons: Lexicons,
                          cfg: EidConfig) -> list[str]:
    """Tokens for the ARG-1 slot of a chain-terminal event. An eventive ARG-1
    that could not (or may not) be followed any further contributes its
    linked roleset as the terminal token."""
    if ann.arg1 is not None and ann.arg1.kind == "event":
        return canonicalize_roleset(ann.arg1.linked_roleset,
                                    cfg.roleset_mode, lexicons)
    entity = ann.arg1.entity if ann.arg1 is not None else None
    return _slot_tokens(entity, lexicons, cfg)


def _eid0_token_lists(ann: EventAnnotation, lexicons: Lexicons,
                      cfg: EidConfig) -> list[list[str]]:
    return [
        _slot_tokens(ann.arg0, lexicons, cfg),
        canonicalize_roleset(ann.roleset, cfg.roleset_mode, lexicons),
        _arg1_terminal_tokens(ann, lexicons, cfg),
    ]


def _expand(token_lists: list[list[str]], kind: str) -> set[EventIdentifier]:
    if any(not alts for alts in token_lists):
        return set()
    return {EventIdentifier(tokens=combo, kind=kind)
            for combo in product(*token_lists)}


def eid0(mention: Mention, annotator: str, cfg: EidConfig,
         lexicons: Lexicons) -> set[EventIdentifier]:
    """Identifiers <ARG-0, roleset, ARG-1> for a standard event. Under the
    strict-slot policy an absent ARG-0 or ARG-1 yields the empty set."""
    ann = _annotation(mention, annotator)
    if ann.arg1 is not None and ann.arg1.kind == "event":
        raise ValueError(
            f"mention {mention.mention_id!r} has an eventive ARG-1; use eid_n"
        )
    return _expand(_eid0_token_lists(ann, lexicons, cfg), "eid0")


def _event_chain(mention: Mention, annotator: str,
                 max_depth: int) -> list[EventAnnotation]:
    """Follow resolved ARG-1 event links from the mention, stopping at the
    first standard event, an unresolved link, or the depth cap. Resolution
    guarantees acyclicity, so this terminates."""
    chain = [_annotation(mention, annotator)]
    current = chain[-1]
    while (
        len(chain) - 1 < max_depth
        and current.arg1 is not None
        and current.arg1.kind == "event"
        and current.arg1.linked_ref is not None
        and annotator in current.arg1.linked_ref.annotations
    ):
        current = current.arg1.linked_ref.annotations[annotator]
        chain.append(current)
    return chain


def eid_n(mention: Mention, annotator: str, cfg: EidConfig,
          lexicons: Lexicons) -> set[EventIdentifier]:
    """Nested-event identifiers up to ``cfg.max_depth`` link hops.

    With event chain e0 -> ... -> eT, every cut j in [0, T) contributes
    the prefix <ARG-0(e0), RS(e0), ..., ARG-0(ej), RS(ej)> followed by the
    terminal event's full eid0 tokens. A standard mention (T = 0) degenerates
    to plain eid0.
    """
    chain = _event_chain(mention, annotator, cfg.max_depth)
    terminal_lists = _eid0_token_lists(chain[-1], lexicons, cfg)
    if len(chain) == 1:
        return _expand(terminal_lists, "eidN")
    identifiers: set[EventIdentifier] = set()
    prefix_lists: list[list[str]] = []
    for link in chain[:-1]:
        prefix_lists.append(_slot_tokens(link.arg0, lexicons, cfg))
        prefix_lists.append(
            canonicalize_roleset(link.roleset, cfg.roleset_mode, lexicons)
        )
        if cfg.include_connecting_roleset and link.arg1 is not None:
            prefix_lists.append(
                canonicalize_roleset(link.arg1.linked_roleset,
                                     cfg.roleset_mode, lexicons)
            )
        identifiers |= _expand(prefix_lists + terminal_lists, "eidN")
    return identifiers


def eid_lt(mention: Mention, annotator: str, cfg: EidConfig,
           lexicons: Lexicons) -> set[EventIdentifier]:
    """Identifiers <ARG-0, roleset, ARG-Loc, ARG-Time>; ARG-1 plays no part."""
    ann = _annotation(mention, annotator)
    token_lists = [
        _slot_tokens(ann.arg0, lexicons, cfg),
        canonicalize_roleset(ann.roleset, cfg.roleset_mode, lexicons),
        _slot_tokens(ann.arg_loc, lexicons, cfg),
        _slot_tokens(ann.arg_time, lexicons, cfg),
    ]
    return _expand(token_lists, "eidLT")


def identifier_key(identifier: EventIdentifier) -> str:
    """Injective serialization: kind prefix plus separator-joined tokens."""
    for token in identifier.tokens:
        if KEY_SEP in token:
            raise ValueError(f"token contains the separator byte: {token!r}")
    return KEY_SEP.join((identifier.kind,) + identifier.tokens)
