"""Bucket-based clustering of mentions plus the quadratic pairwise oracle.

Mentions sharing any bucket key land in the same connected component. For
the component computation, each bucket only needs to connect its members in
a star, which keeps the pipeline linear even when buckets grow large; the
full within-bucket pair set (``edges_from_buckets``) is still available for
the oracle, diagnostics, and pair-mass reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import eid as eid_mod
from .corpus import Corpus, Lexicons
from .eid import EidConfig, MissingAnnotationError, identifier_key, normalize_surface
from .kernels import component_labels
from .partition import Partition

BASES = ("lem", "pb", "pb_vn", "eid_n", "eid_lt", "eid_n_vn", "eid_lt_vn")

ORACLE_GUARD = 20_000

_TAG_SEP = "\x1e"


@dataclass(frozen=True)
class MethodSpec:
    """One clustering method: a base key family, an optional and/or-combined
    second family, and a single/and/or annotator selection."""

    base: str
    combiner: str = "single"  # single | and | or
    second: Optional[str] = None
    annotator: Optional[str] = None
    annotator_mode: str = "single"  # single | and | or
    second_annotator: Optional[str] = None
    eid_cfg: EidConfig = field(default_factory=EidConfig)
    label: Optional[str] = None

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown base {self.base!r}")
        if self.combiner not in ("single", "and", "or"):
            raise ValueError(f"unknown combiner {self.combiner!r}")
        if self.combiner == "single" and self.second is not None:
            raise ValueError("second base given without and/or combiner")
        if self.combiner != "single":
            if self.second is None:
                raise ValueError(f"combiner {self.combiner!r} needs a second base")
            if self.second not in BASES:
                raise ValueError(f"unknown base {self.second!r}")
        if self.annotator_mode not in ("single", "and", "or"):
            raise ValueError(f"unknown annotator_mode {self.annotator_mode!r}")
        if self.annotator_mode != "single" and self.second_annotator is None:
            raise ValueError("annotator and/or needs a second annotator")
        needs_annotator = self.base != "lem" or self.second not in (None, "lem")
        if needs_annotator and self.annotator is None:
            raise ValueError(f"base {self.base!r} needs an annotator")

    def name(self) -> str:
        if self.label:
            return self.label
        parts = [self.base]
        if self.combiner != "single":
            parts = [self.base, self.combiner, self.second]
        name = "_".join(parts)
        if self.annotator:
            ann = self.annotator
            if self.annotator_mode != "single":
                ann = f"{self.annotator}_{self.annotator_mode}_{self.second_annotator}"
            name = f"{ann}:{name}"
        return name


@dataclass
class EdgeSet:
    """Unordered mention-id pairs, stored in canonical (sorted) order."""

    edges: set[tuple[str, str]] = field(default_factory=set)

    def add(self, a: str, b: str) -> None:
        if a == b:
            return
        self.edges.add((a, b) if a < b else (b, a))

    def __len__(self) -> int:
        return len(self.edges)

    def union(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.edges | other.edges)

    def intersection(self, other: "EdgeSet") -> "EdgeSet":
        return EdgeSet(self.edges & other.edges)


def _base_cfg(base: str, cfg: EidConfig) -> EidConfig:
    mode = eid_mod.VN_CLASS if base.endswith("_vn") else eid_mod.VERBATIM
    return replace(cfg, roleset_mode=mode)


def _base_keys(mention, base: str, annotator: Optional[str],
               cfg: EidConfig, lexicons: Lexicons) -> set[str]:
    """Bucket keys for one mention under one base family. A mention lacking
    the needed annotation simply contributes no keys."""
    if base == "lem":
        return {normalize_surface(mention.lemma)}
    try:
        bcfg = _base_cfg(base, cfg)
        if base in ("pb", "pb_vn"):
            ann = mention.annotations[annotator]
            tokens = eid_mod.canonicalize_roleset(
                ann.roleset, bcfg.roleset_mode, lexicons
            )
            return set(tokens)
        if base in ("eid_n", "eid_n_vn"):
            ids = eid_mod.eid_n(mention, annotator, bcfg, lexicons)
        else:  # eid_lt, eid_lt_vn
            ids = eid_mod.eid_lt(mention, annotator, bcfg, lexicons)
        return {identifier_key(i) for i in ids}
    except (KeyError, MissingAnnotationError):
        return set()


def _combined_keys(mention, spec: MethodSpec, annotator: Optional[str],
                   lexicons: Lexicons) -> set[str]:
    keys = _base_keys(mention, spec.base, annotator, spec.eid_cfg, lexicons)
    if spec.combiner == "single":
        return keys
    keys2 = _base_keys(mention, spec.second, annotator, spec.eid_cfg, lexicons)
    if spec.combiner == "and":
        # Composite keys: a pair matches iff it matches on both families.
        return {k1 + _TAG_SEP + k2 for k1 in keys for k2 in keys2}
    # "or": side-tagged union; an edge then exists iff either family matches.
    return ({"1" + _TAG_SEP + k for k in keys}
            | {"2" + _TAG_SEP + k for k in keys2})


def bucket_keys(corpus: Corpus, spec: MethodSpec,
                lexicons: Lexicons) -> dict[str, set[str]]:
    """Per-mention bucket key sets for the method. Annotator-or tags each
    annotator's keys so the union of edge sets falls out of shared buckets;
    annotator-and is handled in ``cluster`` by edge intersection."""
    if spec.annotator_mode == "and":
        raise ValueError(
            "annotator-and has no bucket-key form; cluster() intersects edges"
        )
    out: dict[str, set[str]] = {}
    annotators = [spec.annotator]
    if spec.annotator_mode == "or":
        annotators.append(spec.second_annotator)
    for m in corpus.mentions:
        keys: set[str] = set()
        for ann_id in annotators:
            got = _combined_keys(m, spec, ann_id, lexicons)
            if spec.annotator_mode == "or":
                got = {str(ann_id) + _TAG_SEP + k for k in got}
            keys |= got
        out[m.mention_id] = keys
    return out


def _invert(keys: dict[str, set[str]]) -> dict[str, list[str]]:
    buckets: dict[str, list[str]] = {}
    for mid, key_set in keys.items():
        for key in key_set:
            buckets.setdefault(key, []).append(mid)
    return buckets


def pair_mass(keys: dict[str, set[str]]) -> int:
    """Total within-bucket pair count, sum of b*(b-1)/2 over buckets."""
    return sum(
        len(members) * (len(members) - 1) // 2
        for members in _invert(keys).values()
    )


def edges_from_buckets(keys: dict[str, set[str]]) -> EdgeSet:
    """All unordered pairs co-occurring in some bucket. Quadratic in bucket
    size; use the star path inside ``cluster`` for large corpora."""
    edges = EdgeSet()
    for members in _invert(keys).values():
        uniq = sorted(set(members))
        for i in range(len(uniq)):
            for j in range(i + 1, len(uniq)):
                edges.add(uniq[i], uniq[j])
    return edges


def connected_components(mention_ids: list[str], edges: EdgeSet,
                         kernel: str = "auto") -> Partition:
    """Union-find partition; mentions without edges stay singletons."""
    index = {mid: i for i, mid in enumerate(mention_ids)}
    us = np.empty(len(edges.edges), dtype=np.int64)
    vs = np.empty(len(edges.edges), dtype=np.int64)
    for i, (a, b) in enumerate(edges.edges):
        if a not in index or b not in index:
            missing = a if a not in index else b
            raise ValueError(f"edge endpoint {missing!r} not in mention list")
        us[i] = index[a]
        vs[i] = index[b]
    labels = component_labels(len(mention_ids), us, vs, kernel=kernel)
    return _labels_to_partition(mention_ids, labels)


def _labels_to_partition(mention_ids: list[str], labels: np.ndarray) -> Partition:
    groups: dict[int, list[str]] = {}
    for mid, root in zip(mention_ids, labels.tolist()):
        groups.setdefault(root, []).append(mid)
    return Partition(groups.values())


def components_from_keys(mention_ids: list[str], keys: dict[str, set[str]],
                         kernel: str = "auto") -> Partition:
    """Connected components over bucket co-membership using star edges
    (first member to each other member), linear in total bucket size."""
    index = {mid: i for i, mid in enumerate(mention_ids)}
    us: list[int] = []
    vs: list[int] = []
    for members in _invert(keys).values():
        if len(members) < 2:
            continue
        head = index[members[0]]
        for other in members[1:]:
            us.append(head)
            vs.append(index[other])
    labels = component_labels(
        len(mention_ids),
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        kernel=kernel,
    )
    return _labels_to_partition(mention_ids, labels)


def cluster(corpus: Corpus, spec: MethodSpec, lexicons: Lexicons,
            kernel: str = "auto") -> Partition:
    """bucket_keys -> components, or edge-set intersection for annotator-and."""
    mention_ids = corpus.mention_ids()
    if spec.annotator_mode == "and":
        first = replace(spec, annotator_mode="single", second_annotator=None)
        second = replace(spec, annotator=spec.second_annotator,
                         annotator_mode="single", second_annotator=None)
        edges = edges_from_buckets(bucket_keys(corpus, first, lexicons)).intersection(
            edges_from_buckets(bucket_keys(corpus, second, lexicons))
        )
        return connected_components(mention_ids, edges, kernel=kernel)
    keys = bucket_keys(corpus, spec, lexicons)
    return components_from_keys(mention_ids, keys, kernel=kernel)


def _pair_match(keys_a: set[str], keys_b: set[str]) -> bool:
    return not keys_a.isdisjoint(keys_b)


def pairwise_oracle(corpus: Corpus, spec: MethodSpec,
                    lexicons: Lexicons) -> Partition:
    """Quadratic reference: evaluate the identifier-match relation for every
    mention pair, then take the transitive closure. Must always agree with
    ``cluster``; guarded to small corpora."""
    n = len(corpus)
    if n > ORACLE_GUARD:
        raise ValueError(
            f"pairwise oracle is quadratic; {n} mentions exceeds the "
            f"{ORACLE_GUARD} guard, use cluster() instead"
        )
    mention_ids = corpus.mention_ids()

    def per_annotator_sides(annotator):
        sides = []
        for base in (spec.base, spec.second):
            if base is None:
                continue
            sides.append({
                m.mention_id: _base_keys(m, base, annotator, spec.eid_cfg, lexicons)
                for m in corpus.mentions
            })
        return sides

    def method_match(sides, a, b):
        matches = [_pair_match(side[a], side[b]) for side in sides]
        if spec.combiner == "and":
            return all(matches)
        if spec.combiner == "or":
            return any(matches)
        return matches[0]

    annotators = [spec.annotator]
    if spec.annotator_mode != "single":
        annotators.append(spec.second_annotator)
    per_ann = [per_annotator_sides(a) for a in annotators]

    def linked(a, b):
        results = [method_match(sides, a, b) for sides in per_ann]
        if spec.annotator_mode == "and":
            return all(results)
        return any(results)

    # Transitive closure by repeated merging of small adjacency sets.
    parent = {mid: mid for mid in mention_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            a, b = mention_ids[i], mention_ids[j]
            if linked(a, b):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for mid in mention_ids:
        groups.setdefault(find(mid), []).append(mid)
    return Partition(groups.values())
