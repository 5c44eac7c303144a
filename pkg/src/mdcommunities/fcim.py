"""Frequent closed itemset mining with tidset reporting.

:func:`mine_closed` is a depth-first closure-extension search.  Starting
from each frequent item, the current closed set ``Q`` with tidset ``T`` is
extended by every item that co-occurs in ``T``: a single pass over the
transactions of ``T`` delivers the tidsets ``T & tidset(x)`` of all
candidate items at once.  The closure of an extension is the intersection
of the transactions in its tidset.  Closed sets are registered by their
exact tidset, so a set reached along several paths is expanded only once
and the output never holds two patterns with the same tidset.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from sklearn.base import BaseEstimator

from .membership import TransactionDB
from .validation import check_min_support, check_transactions

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_ITEMS = 20


class TooManyItemsError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ClosedPattern:
    """A frequent closed itemset and the transactions supporting it."""

    itemset: tuple[int, ...]
    tidset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "itemset", tuple(self.itemset))
        object.__setattr__(self, "tidset", tuple(self.tidset))
        if not self.itemset:
            raise ValueError("empty itemset")
        for seq in (self.itemset, self.tidset):
            if any(a >= b for a, b in zip(seq, seq[1:])):
                raise ValueError("itemset and tidset must be strictly ascending")

    @property
    def support(self) -> int:
        return len(self.tidset)


def _sort_key(p: ClosedPattern):
    return (-p.support, len(p.itemset), p.itemset)


def mine_closed(db: TransactionDB, sigma: int = 2) -> list[ClosedPattern]:
    """All closed itemsets with support >= ``sigma``, with their tidsets.

    Returns a list sorted by decreasing support, then itemset length, then
    itemset.  The empty itemset is never reported.
    """
    check_transactions(db)
    sigma = check_min_support(sigma)
    transactions = db.transactions
    item_tids = db.tidsets

    frequent = [x for x in range(db.n_items) if len(item_tids[x]) >= sigma]
    frequent.sort(key=lambda x: (len(item_tids[x]), x))

    registry: dict[tuple[int, ...], tuple[int, ...]] = {}
    # LIFO stack; pushing the ascending-support order reversed keeps the
    # smallest tidsets first
    stack: list[tuple[int, ...]] = [item_tids[x] for x in reversed(frequent)]
    while stack:
        tids = stack.pop()
        if tids in registry:
            continue
        closure = set(transactions[tids[0]])
        for t in tids[1:]:
            closure.intersection_update(transactions[t])
        registry[tids] = tuple(sorted(closure))

        occ: dict[int, list[int]] = {}
        for t in tids:
            for x in transactions[t]:
                if x not in closure:
                    bucket = occ.get(x)
                    if bucket is None:
                        occ[x] = [t]
                    else:
                        bucket.append(t)
        ext = [(len(b), x) for x, b in occ.items() if len(b) >= sigma]
        ext.sort(reverse=True)
        for _, x in ext:
            child = tuple(occ[x])
            if child not in registry:
                stack.append(child)

    patterns = [ClosedPattern(items, tids) for tids, items in registry.items()]
    patterns.sort(key=_sort_key)
    logger.info("mined %d closed patterns at sigma=%d", len(patterns), sigma)
    return patterns


def brute_force_closed(db: TransactionDB, sigma: int = 2) -> list[ClosedPattern]:
    """Reference miner: enumerate every non-empty itemset over the items in ``db``.

    Refuses databases with more than 20 distinct items.
    """
    check_transactions(db)
    sigma = check_min_support(sigma)
    items = sorted({x for tx in db.transactions for x in tx})
    k = len(items)
    if k > BRUTE_FORCE_MAX_ITEMS:
        raise TooManyItemsError(f"{k} items exceed the brute-force limit of {BRUTE_FORCE_MAX_ITEMS}")
    if k == 0 or db.n_transactions == 0:
        return []
    bit = {x: 1 << i for i, x in enumerate(items)}
    tx_masks = np.array([sum(bit[x] for x in tx) for tx in db.transactions], dtype=np.int64)
    masks = np.arange(1, 1 << k, dtype=np.int64)
    contains = (tx_masks[None, :] & masks[:, None]) == masks[:, None]
    support = contains.sum(axis=1)

    keep = support >= sigma
    freq_masks, freq_support, freq_contains = masks[keep], support[keep], contains[keep]
    out = []
    for m, s, row in zip(freq_masks.tolist(), freq_support.tolist(), freq_contains):
        same = freq_masks[freq_support == s]
        if np.any(((same & m) == m) & (same != m)):
            continue
        itemset = tuple(x for x in items if bit[x] & m)
        out.append(ClosedPattern(itemset, tuple(np.flatnonzero(row).tolist())))
    out.sort(key=_sort_key)
    return out


def is_closed(db: TransactionDB, p: ClosedPattern) -> bool:
    """True iff adding any single item to ``p.itemset`` strictly shrinks its tidset."""
    for x in p.itemset:
        if not 0 <= x < db.n_items:
            raise KeyError(f"unknown item {x}")
    tids = db.tidset_of(p.itemset)
    if not tids:
        return True
    members = set(p.itemset)
    common = set(db.transactions[tids[0]])
    for t in tids[1:]:
        common.intersection_update(db.transactions[t])
    return common <= members


def subsets_support_ok(db: TransactionDB, p: ClosedPattern) -> bool:
    """Anti-monotonicity check: every non-empty subset is at least as frequent."""
    for r in range(1, len(p.itemset)):
        for sub in combinations(p.itemset, r):
            if len(db.tidset_of(sub)) < p.support:
                return False
    return True


class ClosedItemsetMiner(BaseEstimator):
    """Estimator wrapper around :func:`mine_closed`.

    Parameters
    ----------
    min_support : int, default=2

    Attributes
    ----------
    patterns_ : list of ClosedPattern
    """

    def __init__(self, min_support: int = 2):
        self.min_support = min_support

    def fit(self, db: TransactionDB, y=None):
        self.patterns_ = mine_closed(db, self.min_support)
        return self


# -- pattern file format ------------------------------------------------

def format_patterns(patterns: Iterable[ClosedPattern]) -> Iterable[str]:
    for p in patterns:
        yield f"{' '.join(map(str, p.itemset))}\t{p.support}\t{' '.join(map(str, p.tidset))}\n"


def write_patterns(patterns: Iterable[ClosedPattern], path: str | os.PathLike) -> None:
    """``items TAB support TAB tids`` per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(format_patterns(patterns))


def read_patterns(path: str | os.PathLike) -> list[ClosedPattern]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 tab-separated fields")
            items = tuple(int(x) for x in parts[0].split())
            tids = tuple(int(x) for x in parts[2].split())
            if int(parts[1]) != len(tids):
                raise ValueError(f"{path}: line {lineno}: support does not match tidset")
            out.append(ClosedPattern(items, tids))
    return out
