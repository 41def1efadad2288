"""Hard clusterings of mention ids, shared by the corpus, clustering and scoring code."""

from __future__ import annotations

from typing import Iterable, Mapping


class Partition:
    """A disjoint, exhaustive clustering of mention ids.

    Clusters are kept in a canonical order (by smallest member id) so that
    equal partitions serialize byte-identically.
    """

    def __init__(self, clusters: Iterable[Iterable[str]]):
        seen: dict[str, int] = {}
        canon: list[tuple[str, ...]] = []
        for cluster in clusters:
            members = tuple(sorted(set(cluster)))
            if not members:
                continue
            canon.append(members)
        canon.sort(key=lambda c: c[0])
        for ordinal, members in enumerate(canon):
            for m in members:
                if m in seen:
                    raise ValueError(f"mention {m!r} appears in more than one cluster")
                seen[m] = ordinal
        self.clusters: list[tuple[str, ...]] = canon
        self.index: dict[str, int] = seen

    @classmethod
    def from_labels(cls, labels: Mapping[str, str]) -> "Partition":
        """Group mention ids by a shared (gold) label."""
        by_label: dict[str, list[str]] = {}
        for mid, label in labels.items():
            by_label.setdefault(label, []).append(mid)
        return cls(by_label.values())

    def mention_ids(self) -> set[str]:
        return set(self.index)

    def cluster_of(self, mention_id: str) -> tuple[str, ...]:
        return self.clusters[self.index[mention_id]]

    def restrict(self, keep: Iterable[str]) -> "Partition":
        """Intersect every cluster with ``keep``, dropping emptied clusters."""
        keep = set(keep)
        return Partition(
            [m for m in cluster if m in keep] for cluster in self.clusters
        )

    def as_sets(self) -> set[frozenset[str]]:
        return {frozenset(c) for c in self.clusters}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.clusters == other.clusters

    def __hash__(self) -> int:
        return hash(tuple(self.clusters))

    def __len__(self) -> int:
        return len(self.clusters)

    def __repr__(self) -> str:
        return f"Partition({len(self.clusters)} clusters, {len(self.index)} mentions)"

    def dump(self) -> str:
        """One line per cluster: ``cluster_id TAB comma-joined mention_ids``."""
        lines = []
        for ordinal, members in enumerate(self.clusters):
            lines.append(f"{ordinal}\t{','.join(members)}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text: str) -> "Partition":
        clusters = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            _, _, members = line.partition("\t")
            clusters.append(members.split(","))
        return cls(clusters)
