"""Membership transactions: one transaction per node, one item per
``(dimension, community)`` pair the node belongs to."""

from __future__ import annotations

import os
from collections.abc import Iterable, Sequence

from .detect import CommunityAssignment


class DuplicateDimensionError(ValueError):
    pass


class ItemCatalog:
    """Bijection between ``(dimension id, community label)`` pairs and item codes.

    Codes are assigned by ascending dimension id, then ascending label.
    """

    def __init__(self, pairs: Iterable[tuple[int, int]] = (), dimension_names: Sequence[str] | None = None):
        self._pairs: list[tuple[int, int]] = []
        self._codes: dict[tuple[int, int], int] = {}
        for pair in pairs:
            pair = (int(pair[0]), int(pair[1]))
            if pair in self._codes:
                raise ValueError(f"duplicate catalog entry {pair}")
            self._codes[pair] = len(self._pairs)
            self._pairs.append(pair)
        self.dimension_names = tuple(dimension_names) if dimension_names is not None else None

    def __len__(self) -> int:
        return len(self._pairs)

    def encode(self, dimension: int, label: int) -> int:
        try:
            return self._codes[(dimension, label)]
        except KeyError:
            raise KeyError(f"no item for dimension {dimension}, community {label}") from None

    def pair(self, code: int) -> tuple[int, int]:
        if not 0 <= code < len(self._pairs):
            raise KeyError(f"unknown item code {code}")
        return self._pairs[code]

    def dimension_name(self, dimension: int) -> str:
        if self.dimension_names is None:
            return str(dimension)
        return self.dimension_names[dimension]

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(self._pairs)


def decode(catalog: ItemCatalog, itemset: Iterable[int]) -> set[tuple[str, int]]:
    """Translate item codes to ``(dimension name, community label)`` pairs."""
    out = set()
    for code in itemset:
        d, label = catalog.pair(int(code))
        out.add((catalog.dimension_name(d), label))
    return out


class TransactionDB:
    """Node-indexed transactions plus the vertical (item -> tidset) view.

    Parameters
    ----------
    transactions : sequence of iterables of int
        Transaction ``t`` is the item set of node ``t``.
    n_items : int, optional
        Size of the item universe; defaults to ``max item + 1``.
    """

    def __init__(self, transactions: Iterable[Iterable[int]], n_items: int | None = None):
        txs = []
        for tx in transactions:
            items = tuple(sorted(set(int(x) for x in tx)))
            if items and items[0] < 0:
                raise ValueError("item codes must be non-negative")
            txs.append(items)
        top = max((tx[-1] for tx in txs if tx), default=-1) + 1
        if n_items is None:
            n_items = top
        elif n_items < top:
            raise ValueError(f"n_items={n_items} but item {top - 1} occurs")
        tidsets: list[list[int]] = [[] for _ in range(n_items)]
        for t, tx in enumerate(txs):
            for x in tx:
                tidsets[x].append(t)
        self.transactions: tuple[tuple[int, ...], ...] = tuple(txs)
        self.tidsets: tuple[tuple[int, ...], ...] = tuple(tuple(ts) for ts in tidsets)

    @property
    def n_transactions(self) -> int:
        return len(self.transactions)

    @property
    def n_items(self) -> int:
        return len(self.tidsets)

    def support(self, item: int) -> int:
        return len(self.tidsets[item])

    def tidset_of(self, itemset: Iterable[int]) -> tuple[int, ...]:
        """Transactions containing every item of ``itemset`` (by tidset intersection)."""
        items = sorted(set(itemset), key=lambda x: len(self.tidsets[x]))
        if not items:
            return tuple(range(self.n_transactions))
        acc = set(self.tidsets[items[0]])
        for x in items[1:]:
            acc.intersection_update(self.tidsets[x])
            if not acc:
                break
        return tuple(sorted(acc))

    def __len__(self) -> int:
        return len(self.transactions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransactionDB):
            return NotImplemented
        return self.transactions == other.transactions and self.n_items == other.n_items

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"TransactionDB(n_transactions={self.n_transactions}, n_items={self.n_items})"


def build_memberships(
    assignments: Iterable[CommunityAssignment],
    n_nodes: int | None = None,
    dimension_names: Sequence[str] | None = None,
) -> tuple[TransactionDB, ItemCatalog]:
    """Turn per-dimension community assignments into membership transactions.

    Nodes that appear in no assignment get an empty transaction, so the
    database always addresses ``0..n_nodes-1``.
    """
    assignments = sorted(assignments, key=lambda a: a.dimension)
    seen = set()
    for a in assignments:
        if a.dimension in seen:
            raise DuplicateDimensionError(f"two assignments for dimension {a.dimension}")
        seen.add(a.dimension)
    pairs = [(a.dimension, label) for a in assignments for label in range(a.n_communities)]
    catalog = ItemCatalog(pairs, dimension_names)
    if n_nodes is None:
        n_nodes = max((int(a.nodes.max()) + 1 for a in assignments if a.nodes.size), default=0)
    txs: list[list[int]] = [[] for _ in range(n_nodes)]
    offset = 0
    for a in assignments:
        for n, label in zip(a.nodes.tolist(), a.labels.tolist()):
            txs[n].append(offset + label)
        offset += a.n_communities
    return TransactionDB(txs, n_items=len(catalog)), catalog


# -- transaction file format ------------------------------------------------

def format_transactions(db: TransactionDB) -> Iterable[str]:
    for tx in db.transactions:
        yield (" ".join(map(str, tx)) if tx else "-") + "\n"


def write_transactions(db: TransactionDB, path: str | os.PathLike) -> None:
    """One line per node: space-separated item codes, ``-`` when empty."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(format_transactions(db))


def read_transactions(path: str | os.PathLike) -> TransactionDB:
    txs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if fields == ["-"] or not fields:
                txs.append(())
                continue
            try:
                txs.append(tuple(int(f) for f in fields))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-integer item code") from None
    return TransactionDB(txs)
