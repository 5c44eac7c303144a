"""Multidimensional community discovery: per-dimension communities are
mapped to membership transactions, and the frequent closed itemsets over
them are the communities.

The entry point is :class:`MultidimCommunityMiner`; :func:`run` is the
functional form driven by a :class:`RunConfig`.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from .detect import (
    CommunityDiscoverer,
    ConnectedComponents,
    FixedAssignment,
    LabelPropagation,
)
from .fcim import ClosedPattern, mine_closed
from .lattice import Lattice, build_lattice
from .membership import build_memberships
from .network import MultidimNetwork, collapse, induced_edges, split
from .validation import check_bounds, check_min_support, check_network

logger = logging.getLogger(__name__)

N_JOBS_ENV = "MDCOMMUNITIES_N_JOBS"


class UndefinedDensityError(ValueError):
    pass


@dataclass(frozen=True)
class MultidimCommunity:
    """A group of nodes sharing the same set of per-dimension memberships.

    ``memberships`` are ``(dimension, community label)`` pairs and ``nodes``
    the member node ids; both sorted.  ``mcd`` is NaN for single-node
    communities.  Communities read back from a file carry names instead of
    ids.
    """

    memberships: tuple
    nodes: tuple
    mcd: float = field(default=math.nan, compare=False)
    components: int = field(default=1, compare=False)
    itemset: tuple = field(default=(), compare=False)

    @property
    def support(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> int:
        return len({d for d, _ in self.memberships})

    @property
    def dimensions(self) -> tuple:
        return tuple(sorted({d for d, _ in self.memberships}))

    @property
    def is_connected(self) -> bool:
        return self.components == 1


def _dims_of(c) -> list:
    return sorted({d for d, _ in c.memberships})


def compute_mcd(net: MultidimNetwork, c: MultidimCommunity) -> float:
    """Edges among the members, over the community's own dimensions, divided
    by ``size * n * (n - 1) / 2``."""
    n = len(set(c.nodes))
    if n < 2:
        raise UndefinedDensityError(f"density needs at least 2 nodes, got {n}")
    dims = _dims_of(c)
    if not dims:
        raise UndefinedDensityError("community has no dimensions")
    count = sum(1 for _ in induced_edges(net, c.nodes, dims))
    return count / (len(dims) * n * (n - 1) / 2)


def count_components(net: MultidimNetwork, c: MultidimCommunity) -> int:
    """Connected components of the members over edges in the community's dimensions."""
    nodes = sorted(set(c.nodes))
    if not nodes:
        raise ValueError("community has no nodes")
    parent = {u: u for u in nodes}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    k = len(nodes)
    for u, v, _ in induced_edges(net, nodes, _dims_of(c)):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            k -= 1
    return k


def _default_n_jobs():
    value = os.environ.get(N_JOBS_ENV)
    return int(value) if value else 1


class MultidimCommunityMiner(TransformerMixin, BaseEstimator):
    """Find multidimensional communities in a :class:`MultidimNetwork`.

    The network is split into one slice per dimension, ``discoverer`` runs
    on every slice, each node becomes a transaction of its
    ``(dimension, community)`` memberships, and every closed itemset with
    at least ``min_support`` supporting nodes becomes a community.

    Parameters
    ----------
    min_support : int, default=2
        Minimum number of member nodes.
    discoverer : CommunityDiscoverer, optional
        Per-dimension community detector.  Defaults to
        ``LabelPropagation(seed=42, max_iter=100)``.
    n_jobs : int, optional
        Parallel slices in the detection stage.  Defaults to the
        ``MDCOMMUNITIES_N_JOBS`` environment variable, else 1.

    Attributes
    ----------
    assignments_ : list of CommunityAssignment
        One per non-empty dimension, ordered by dimension id.
    transactions_ : TransactionDB
    catalog_ : ItemCatalog
    patterns_ : list of ClosedPattern
    communities_ : list of MultidimCommunity
        Aligned with ``patterns_``.
    """

    def __init__(self, min_support: int = 2, discoverer: CommunityDiscoverer | None = None, n_jobs: int | None = None):
        self.min_support = min_support
        self.discoverer = discoverer
        self.n_jobs = n_jobs

    def _detect_all(self, slices):
        cd = self.discoverer_
        n_jobs = self.n_jobs if self.n_jobs is not None else _default_n_jobs()
        if n_jobs == 1 or len(slices) < 2:
            return [clone(cd).detect(g) for g in slices]
        return Parallel(n_jobs=n_jobs)(delayed(clone(cd).detect)(g) for g in slices)

    def fit(self, net: MultidimNetwork, y=None):
        check_network(net)
        sigma = check_min_support(self.min_support)
        self.discoverer_ = (
            clone(self.discoverer) if self.discoverer is not None else LabelPropagation()
        )
        slices = split(net)
        logger.info("detecting communities in %d dimensions", len(slices))
        self.assignments_ = sorted(self._detect_all(slices), key=lambda a: a.dimension)
        self.transactions_, self.catalog_ = build_memberships(
            self.assignments_, n_nodes=net.n_nodes, dimension_names=net.dimensions.names
        )
        self.patterns_ = mine_closed(self.transactions_, sigma)
        self.communities_ = [self._assemble(net, p) for p in self.patterns_]
        self.n_nodes_in_ = net.n_nodes
        return self

    def _assemble(self, net, p: ClosedPattern) -> MultidimCommunity:
        memberships = tuple(sorted(self.catalog_.pair(x) for x in p.itemset))
        c = MultidimCommunity(memberships, p.tidset, itemset=p.itemset)
        mcd = compute_mcd(net, c) if c.support >= 2 else math.nan
        return MultidimCommunity(memberships, p.tidset, mcd, count_components(net, c), p.itemset)

    def transform(self, net: MultidimNetwork) -> csr_matrix:
        """Sparse ``(n_nodes, n_communities)`` membership indicator."""
        check_is_fitted(self, "communities_")
        check_network(net)
        if net.n_nodes != self.n_nodes_in_:
            raise ValueError(f"network has {net.n_nodes} nodes, fitted on {self.n_nodes_in_}")
        rows = [n for c in self.communities_ for n in c.nodes]
        cols = [j for j, c in enumerate(self.communities_) for _ in c.nodes]
        data = np.ones(len(rows), dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(net.n_nodes, len(self.communities_)))

    def lattice(self) -> Lattice:
        """Cover lattice over ``communities_`` (vertex ids = list positions)."""
        check_is_fitted(self, "communities_")
        return build_lattice(self.patterns_)


@dataclass
class RunConfig:
    """Inputs of one end-to-end run."""

    sigma: int = 2
    cd: str = "labelprop"
    seed: int = 42
    max_iters: int = 100
    table: dict | None = None
    n_jobs: int | None = None
    input_path: str | None = None
    out_path: str | None = None
    lattice_path: str | None = None

    def __post_init__(self):
        check_min_support(self.sigma)
        if self.cd not in ("labelprop", "components", "fixed"):
            raise ValueError(f"unknown community discoverer {self.cd!r}")
        if self.cd == "fixed" and self.table is None:
            raise ValueError("cd='fixed' needs an assignment table")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def make_discoverer(self) -> CommunityDiscoverer:
        if self.cd == "labelprop":
            return LabelPropagation(seed=self.seed, max_iter=self.max_iters)
        if self.cd == "components":
            return ConnectedComponents()
        per_dim = bool(self.table) and all(isinstance(v, dict) for v in self.table.values())
        return FixedAssignment(self.table, per_dimension=per_dim)


def run(net: MultidimNetwork, cfg: RunConfig | None = None) -> list[MultidimCommunity]:
    cfg = cfg or RunConfig()
    miner = MultidimCommunityMiner(cfg.sigma, cfg.make_discoverer(), cfg.n_jobs)
    return miner.fit(net).communities_


def filter_communities(
    communities: Iterable[MultidimCommunity],
    min_support: int | None = None,
    min_size: int | None = None,
    max_size: int | None = None,
    min_mcd: float | None = None,
    max_mcd: float | None = None,
    *,
    max_support: int | None = None,
    exclusive_max_mcd: bool = False,
) -> list[MultidimCommunity]:
    """Keep communities inside every given bound, preserving order.

    Bounds are inclusive except ``max_mcd`` when ``exclusive_max_mcd`` is
    set.  Communities with undefined MCD fail any MCD bound.
    """
    check_bounds("support", min_support, max_support)
    check_bounds("size", min_size, max_size)
    check_bounds("mcd", min_mcd, max_mcd)
    out = []
    for c in communities:
        if min_support is not None and c.support < min_support:
            continue
        if max_support is not None and c.support > max_support:
            continue
        if min_size is not None and c.size < min_size:
            continue
        if max_size is not None and c.size > max_size:
            continue
        if min_mcd is not None or max_mcd is not None:
            if math.isnan(c.mcd):
                continue
            if min_mcd is not None and c.mcd < min_mcd:
                continue
            if max_mcd is not None and (c.mcd >= max_mcd if exclusive_max_mcd else c.mcd > max_mcd):
                continue
        out.append(c)
    return out


class Overlap(NamedTuple):
    both: float
    only_a: float
    only_b: float


def _node_sets(groups) -> set[tuple]:
    out = set()
    for g in groups:
        nodes = g.nodes if hasattr(g, "nodes") else g
        out.add(tuple(sorted(nodes)))
    return out


def compare_node_sets(a: Iterable, b: Iterable) -> Overlap:
    """Exact-match overlap of two community collections, as fractions of their union.

    Dimension information is ignored: only member node sets are compared.
    """
    sa, sb = _node_sets(a), _node_sets(b)
    union = len(sa | sb)
    if union == 0:
        raise ValueError("both community collections are empty")
    return Overlap(len(sa & sb) / union, len(sa - sb) / union, len(sb - sa) / union)


def collapse_baseline(net: MultidimNetwork, cd: CommunityDiscoverer | None = None) -> list[frozenset]:
    """Communities of the single network obtained by summing parallel edge weights."""
    check_network(net)
    g = collapse(net)
    if g.n_nodes == 0:
        return []
    cd = clone(cd) if cd is not None else LabelPropagation()
    return [frozenset(c.tolist()) for c in cd.detect(g).communities()]


def stats(communities: Sequence[MultidimCommunity]) -> dict[str, list[tuple[float, float]]]:
    """Cumulative distributions of support, size and MCD.

    For each measure, ``(threshold, fraction)`` pairs over the distinct
    observed values, where ``fraction`` is the share of communities whose
    value is >= threshold.  MCD fractions are over communities with a
    defined MCD.
    """
    out = {}
    for name, values in (
        ("support", [c.support for c in communities]),
        ("size", [c.size for c in communities]),
        ("mcd", [c.mcd for c in communities if not math.isnan(c.mcd)]),
    ):
        arr = np.sort(np.asarray(values, dtype=np.float64))
        thresholds = np.unique(arr)
        at_least = arr.size - np.searchsorted(arr, thresholds, side="left")
        out[name] = [(float(t), float(k) / arr.size) for t, k in zip(thresholds, at_least)]
    return out


def format_stats(dists: dict[str, list[tuple[float, float]]]) -> Iterable[str]:
    yield "measure,threshold,fraction_at_least\n"
    for name, rows in dists.items():
        for t, f in rows:
            yield f"{name},{t!r},{f!r}\n"


# -- community records -----------------------------------------------------

HEADER = "id\tmemberships\tsupport\tsize\tmcd\tcomponents\tnodes\n"


def format_communities(communities: Iterable[MultidimCommunity], net: MultidimNetwork | None = None) -> Iterable[str]:
    """Tab-separated records; memberships as ``dimension:community`` tokens.

    With ``net``, node and dimension ids are written as their names.
    """
    yield HEADER
    for i, c in enumerate(communities):
        if net is not None:
            mem = " ".join(f"{net.dimensions.name(d)}:{lab}" for d, lab in c.memberships)
            nodes = " ".join(net.nodes.name(n) for n in c.nodes)
        else:
            mem = " ".join(f"{d}:{lab}" for d, lab in c.memberships)
            nodes = " ".join(map(str, c.nodes))
        yield f"{i}\t{mem}\t{c.support}\t{c.size}\t{c.mcd!r}\t{c.components}\t{nodes}\n"


def write_communities(communities, path, net: MultidimNetwork | None = None) -> None:
    with open(path, "w", encoding="utf-8", errors="surrogateescape") as fh:
        fh.writelines(format_communities(communities, net))


def read_communities(path) -> list[MultidimCommunity]:
    """Parse community records back; members and dimensions stay as names."""
    out = []
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line + "\n" == HEADER:
                continue
            parts = line.split("\t")
            if len(parts) != 7:
                raise ValueError(f"{path}: line {lineno}: expected 7 tab-separated fields")
            _, mem, support, _size, mcd, comps, nodes = parts
            memberships = []
            for tok in mem.split():
                d, _, lab = tok.rpartition(":")
                memberships.append((d, int(lab)))
            node_names = tuple(nodes.split())
            if int(support) != len(node_names):
                raise ValueError(f"{path}: line {lineno}: support does not match node list")
            out.append(MultidimCommunity(tuple(memberships), node_names, float(mcd), int(comps)))
    return out


def read_node_sets(path) -> list[tuple[str, ...]]:
    """Node sets from a community record file or from a plain one-set-per-line file."""
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        first = fh.readline()
    if first == HEADER:
        return [c.nodes for c in read_communities(path)]
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        return [tuple(line.split()) for line in fh if line.split()]
