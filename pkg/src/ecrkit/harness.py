"""Scaling benchmark and clustering diagnostics.

The benchmark duplicates a seed corpus to each target size and times the
clustering core (identifier generation, bucketing, union-find; file I/O and
expansion excluded), reporting a least-squares linear fit over the sizes.
"""

from __future__ import annotations

import csv
import gc
import io
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cluster import MethodSpec, bucket_keys, components_from_keys, pair_mass
from .corpus import Corpus, Lexicons, copy_mention, resolve_nested_links
from .eid import MissingAnnotationError, eid_lt, eid_n, identifier_key
from .partition import Partition

EXPAND_GUARD = 5_000_000


def synth_expand(corpus: Corpus, target_n: int) -> Corpus:
    """Duplicate mentions round-robin up to ``target_n``, with fresh ids.

    Duplicates keep their source's annotations and gold cluster label, so a
    duplicate always clusters with its source under any identifier method.
    """
    if target_n < len(corpus):
        raise ValueError(
            f"target {target_n} is smaller than the corpus ({len(corpus)})"
        )
    if target_n > EXPAND_GUARD:
        raise ValueError(f"target {target_n} exceeds the {EXPAND_GUARD} guard")
    if target_n == len(corpus):
        return corpus
    mentions = [copy_mention(m) for m in corpus.mentions]
    n_src = len(corpus.mentions)
    for k in range(target_n - n_src):
        src = corpus.mentions[k % n_src]
        mentions.append(
            copy_mention(src, mention_id=f"{src.mention_id}_dup{k // n_src}")
        )
    expanded = Corpus(mentions)
    resolve_nested_links(expanded)
    return expanded


@dataclass
class BenchResult:
    sizes: list[int]
    wall_times_s: list[float]
    cpu_times_s: list[float]
    slope: float
    intercept: float
    r_squared: float
    pair_mass: list[int]
    kernel: str
    repeats: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["size", "wall_time_s", "cpu_time_s", "pair_mass",
                         "kernel"])
        for size, wt, ct, mass in zip(self.sizes, self.wall_times_s,
                                      self.cpu_times_s, self.pair_mass):
            writer.writerow([size, f"{wt:.6f}", f"{ct:.6f}", mass, self.kernel])
        writer.writerow([])
        writer.writerow(["slope_s_per_mention", f"{self.slope:.3e}"])
        writer.writerow(["intercept_s", f"{self.intercept:.6f}"])
        writer.writerow(["r_squared", f"{self.r_squared:.6f}"])
        return buf.getvalue()


def _linear_fit(sizes, times) -> tuple[float, float, float]:
    x = np.asarray(sizes, dtype=np.float64)
    y = np.asarray(times, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r_squared


def run_bench(corpus: Corpus, sizes: list[int], spec: MethodSpec,
              lexicons: Lexicons, repeats: int = 3,
              kernel: str = "auto") -> BenchResult:
    """Time the clustering core at each size, taking the minimum of
    ``repeats`` interleaved rounds.

    Timing protocol, chosen for noisy shared machines:

    - Repeats are interleaved round-robin across sizes (round 1 times every
      size, then round 2, ...) so a transient slowdown episode cannot poison
      every repeat of one size.
    - The per-size minimum is kept (as in ``timeit``): timing noise is
      strictly additive, so the fastest run best estimates true cost.
    - GC is collected then disabled around each timed run.
    - Both wall and process CPU time are recorded; the linear fit uses CPU
      time. Expansion and I/O stay outside the timed region.
    """
    if sorted(sizes) != list(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly increasing")
    best_wall = {size: float("inf") for size in sizes}
    best_cpu = {size: float("inf") for size in sizes}
    masses: dict[int, int] = {}
    for rnd in range(repeats):
        for size in sizes:
            expanded = synth_expand(corpus, size)
            mention_ids = expanded.mention_ids()

            def core() -> int:
                keys = bucket_keys(expanded, spec, lexicons)
                components_from_keys(mention_ids, keys, kernel=kernel)
                return pair_mass(keys)

            if rnd == 0:
                masses[size] = core()  # warm-up, also compiles the kernel
            gc.collect()
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                w0 = time.perf_counter()
                c0 = time.process_time()
                core()
                cpu = time.process_time() - c0
                wall = time.perf_counter() - w0
            finally:
                if gc_was_enabled:
                    gc.enable()
            best_wall[size] = min(best_wall[size], wall)
            best_cpu[size] = min(best_cpu[size], cpu)
    wall_times = [best_wall[size] for size in sizes]
    cpu_times = [best_cpu[size] for size in sizes]
    slope, intercept, r_squared = _linear_fit(sizes, cpu_times)
    return BenchResult(
        sizes=list(sizes), wall_times_s=wall_times, cpu_times_s=cpu_times,
        slope=slope, intercept=intercept, r_squared=r_squared,
        pair_mass=[masses[size] for size in sizes], kernel=kernel,
        repeats=repeats,
    )


@dataclass
class MismatchEntry:
    kind: str  # "split" (gold pair separated) | "merged" (non-gold pair joined)
    mention_a: str
    mention_b: str
    keys_a: list[str]
    keys_b: list[str]
    categories: list[str]


@dataclass
class DiagnosticsReport:
    assignments: dict[str, tuple[int, int]] = field(default_factory=dict)
    mismatches: list[MismatchEntry] = field(default_factory=list)

    def to_tsv(self) -> str:
        lines = ["kind\tmention_a\tmention_b\tcategories\tkeys_a\tkeys_b"]
        for e in self.mismatches:
            lines.append("\t".join([
                e.kind, e.mention_a, e.mention_b, ",".join(e.categories),
                "|".join(e.keys_a), "|".join(e.keys_b),
            ]))
        return "\n".join(lines) + "\n"


def _mention_keys(corpus, mid, spec, lexicons) -> list[str]:
    m = corpus.by_id[mid]
    annotator = spec.annotator
    try:
        ids = (eid_n(m, annotator, spec.eid_cfg, lexicons)
               | eid_lt(m, annotator, spec.eid_cfg, lexicons))
        return sorted(identifier_key(i) for i in ids)
    except MissingAnnotationError:
        return []


def _categorize(corpus, a, b, keys_a, keys_b, spec, lexicons) -> list[str]:
    cats = []
    for mid in (a, b):
        ann = corpus.by_id[mid].annotations.get(spec.annotator)
        if ann is not None and ann.roleset not in lexicons.vn_classes:
            cats.append("no VN class")
            break
    if not keys_a or not keys_b:
        cats.append("missing slot")
    if _alias_miss(corpus, a, b, spec, lexicons):
        cats.append("alias miss")
    if not cats:
        cats.append("other")
    return cats


def _alias_miss(corpus, a, b, spec, lexicons) -> bool:
    """Near-identical argument surfaces that canonicalize apart, e.g. one
    location token contained in the other."""
    from .eid import canonicalize_argument

    def arg_tokens(mid):
        ann = corpus.by_id[mid].annotations.get(spec.annotator)
        if ann is None:
            return set()
        tokens = set()
        values = [ann.arg0, ann.arg_loc, ann.arg_time]
        if ann.arg1 is not None and ann.arg1.kind == "entity":
            values.append(ann.arg1.entity)
        for value in values:
            if value is not None:
                tokens.update(canonicalize_argument(value, lexicons, spec.eid_cfg))
        return tokens

    tokens_a, tokens_b = arg_tokens(a), arg_tokens(b)
    for ta in tokens_a:
        for tb in tokens_b:
            if ta != tb and (ta in tb or tb in ta):
                return True
    return False


def diagnose(corpus: Corpus, pred: Partition, spec: MethodSpec,
             lexicons: Lexicons, max_entries: int = 1000) -> DiagnosticsReport:
    """Mismatch pairs between gold and predicted clusterings, with mechanical
    category hints. One representative pair per (gold piece, pred piece)."""
    gold = corpus.gold
    report = DiagnosticsReport()
    for mid in corpus.mention_ids():
        report.assignments[mid] = (gold.index[mid], pred.index[mid])

    key_cache: dict[str, list[str]] = {}

    def keys_of(mid):
        if mid not in key_cache:
            key_cache[mid] = _mention_keys(corpus, mid, spec, lexicons)
        return key_cache[mid]

    def add(kind, a, b):
        if len(report.mismatches) >= max_entries:
            return
        ka, kb = keys_of(a), keys_of(b)
        report.mismatches.append(MismatchEntry(
            kind=kind, mention_a=a, mention_b=b, keys_a=ka, keys_b=kb,
            categories=_categorize(corpus, a, b, ka, kb, spec, lexicons),
        ))

    for cluster_members in gold.clusters:
        pieces: dict[int, str] = {}
        for mid in cluster_members:
            pieces.setdefault(pred.index[mid], mid)
        reps = [pieces[k] for k in sorted(pieces)]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                add("split", reps[i], reps[j])
    for cluster_members in pred.clusters:
        pieces = {}
        for mid in cluster_members:
            pieces.setdefault(gold.index[mid], mid)
        reps = [pieces[k] for k in sorted(pieces)]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                add("merged", reps[i], reps[j])
    return report
