"""Hasse diagram of itemset inclusion over mined patterns."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass


def _itemset(p) -> frozenset:
    if hasattr(p, "itemset"):
        return frozenset(p.itemset)
    return frozenset(p)


@dataclass(frozen=True)
class Lattice:
    """Vertices are the input patterns (by position); ``edges`` holds cover
    pairs ``(i, j)`` meaning ``vertices[j]`` is a minimal strict superset of
    ``vertices[i]`` among the vertices."""

    vertices: tuple
    edges: tuple[tuple[int, int], ...]

    def children(self, i: int) -> list[int]:
        """Patterns reached by adding dimensions/communities to ``i``."""
        return [j for a, j in self.edges if a == i]

    def parents(self, j: int) -> list[int]:
        return [i for i, b in self.edges if b == j]

    def roots(self) -> list[int]:
        covered = {j for _, j in self.edges}
        return [i for i in range(len(self.vertices)) if i not in covered]


def build_lattice(patterns: Sequence) -> Lattice:
    """Cover relation of strict itemset inclusion among ``patterns``.

    ``patterns`` may be :class:`ClosedPattern`, community records or plain
    item collections.  Duplicated itemsets are rejected.
    """
    sets = [_itemset(p) for p in patterns]
    if len(set(sets)) != len(sets):
        raise ValueError("duplicate itemsets in lattice input")
    containing: dict = defaultdict(list)
    for idx, s in enumerate(sets):
        for x in s:
            containing[x].append(idx)

    edges = []
    for j, big in enumerate(sets):
        # strict subsets of `big`: vertices whose every item lies in `big`
        hits: dict[int, int] = defaultdict(int)
        for x in big:
            for i in containing[x]:
                hits[i] += 1
        subs = [i for i, c in hits.items() if c == len(sets[i]) and i != j]
        subs.sort(key=lambda i: len(sets[i]), reverse=True)
        maximal: list[int] = []
        for i in subs:
            if not any(sets[i] < sets[k] for k in maximal):
                maximal.append(i)
        edges.extend((i, j) for i in maximal)
    edges.sort()
    return Lattice(tuple(patterns), tuple(edges))


def format_lattice(lattice: Lattice, labels: Iterable[str] | None = None) -> Iterable[str]:
    """``vertex TAB id TAB label`` lines followed by ``edge TAB from TAB to`` lines."""
    if labels is None:
        labels = (" ".join(map(str, sorted(_itemset(v)))) for v in lattice.vertices)
    for i, label in enumerate(labels):
        yield f"vertex\t{i}\t{label}\n"
    for i, j in lattice.edges:
        yield f"edge\t{i}\t{j}\n"
