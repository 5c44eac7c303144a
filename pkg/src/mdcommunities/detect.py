"""Monodimensional community discovery.

Discoverers are scikit-learn style estimators: ``fit(g)`` on a
:class:`~mdcommunities.network.MonoNetwork` stores ``assignment_``.
:meth:`CommunityDiscoverer.detect` is the one-call form used by the
pipeline.
"""

from __future__ import annotations

import os
from collections import defaultdict
from collections.abc import Iterable, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc
from sklearn.base import BaseEstimator

from .network import MonoNetwork


class CoverageError(ValueError):
    """A fixed assignment table does not cover every node of a slice."""


class CommunityAssignment:
    """Memberships of the nodes of one dimension.

    Stored as parallel arrays of ``(node, label)`` pairs sorted by node then
    label, so overlapping memberships are allowed.  Labels must be dense
    (``0..k-1``) and every listed node has at least one label.

    Parameters
    ----------
    dimension : int
        Dimension id the assignment belongs to.
    nodes, labels : array-like of int
        One entry per membership.
    """

    def __init__(self, dimension: int, nodes, labels):
        nodes = np.asarray(nodes, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if nodes.shape != labels.shape or nodes.ndim != 1:
            raise ValueError("nodes and labels must be 1-d arrays of equal length")
        if labels.size:
            uniq = np.unique(labels)
            if uniq[0] != 0 or uniq[-1] != uniq.size - 1:
                raise ValueError("community labels must be contiguous 0..k-1")
        pairs = np.unique(np.stack([nodes, labels], axis=1), axis=0) if nodes.size else np.empty((0, 2), np.int64)
        self.dimension = int(dimension)
        self.nodes = pairs[:, 0].copy()
        self.labels = pairs[:, 1].copy()
        self.nodes.setflags(write=False)
        self.labels.setflags(write=False)

    @classmethod
    def from_mapping(cls, dimension: int, mapping: Mapping[int, Iterable[int]]) -> "CommunityAssignment":
        nodes, labels = [], []
        for n, ls in mapping.items():
            for label in ls:
                nodes.append(n)
                labels.append(label)
        return cls(dimension, nodes, labels)

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def is_overlapping(self) -> bool:
        return bool(np.any(self.nodes[1:] == self.nodes[:-1]))

    def member_nodes(self) -> np.ndarray:
        return np.unique(self.nodes)

    def communities(self) -> list[np.ndarray]:
        """Sorted member node ids of each community, indexed by label."""
        order = np.lexsort((self.nodes, self.labels))
        counts = np.bincount(self.labels, minlength=self.n_communities)
        return np.split(self.nodes[order], np.cumsum(counts)[:-1]) if counts.size else []

    def to_mapping(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = defaultdict(set)
        for n, label in zip(self.nodes.tolist(), self.labels.tolist()):
            out[n].add(label)
        return {n: frozenset(ls) for n, ls in out.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CommunityAssignment):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"CommunityAssignment(dimension={self.dimension}, "
            f"n_nodes={self.member_nodes().size}, n_communities={self.n_communities})"
        )


def densify(labels: np.ndarray) -> np.ndarray:
    """Renumber labels to ``0..k-1`` in order of first occurrence."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inverse]


class CommunityDiscoverer(BaseEstimator):
    """Base class: subclasses implement ``fit(g)`` and set ``assignment_``."""

    def fit(self, g: MonoNetwork, y=None):
        raise NotImplementedError

    def detect(self, g: MonoNetwork) -> CommunityAssignment:
        return self.fit(g).assignment_

    def fit_predict(self, g: MonoNetwork, y=None) -> np.ndarray:
        """Fit and return the label of each node of ``g`` (non-overlapping only)."""
        assignment = self.fit(g).assignment_
        if assignment.is_overlapping:
            raise ValueError("fit_predict needs a non-overlapping assignment")
        return assignment.labels.copy()


def _lpa_kernel(indptr, indices, weights, rng, max_iter):
    """Asynchronous weighted label propagation over local node ids.

    Returns ``(labels, n_iter, converged)``.
    """
    n = len(indptr) - 1
    labels = list(range(n))
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    for it in range(1, max_iter + 1):
        changed = False
        for u in rng.permutation(n).tolist():
            lo, hi = indptr[u], indptr[u + 1]
            if hi - lo == 1:
                best_label = labels[indices[lo]]
                if best_label != labels[u]:
                    labels[u] = best_label
                    changed = True
                continue
            acc: dict[int, float] = {}
            for k in range(lo, hi):
                lab = labels[indices[k]]
                acc[lab] = acc.get(lab, 0.0) + weights[k]
            best = max(acc.values())
            current = labels[u]
            # keeping a maximal current label is what lets the sweep terminate
            if acc.get(current) == best:
                continue
            cands = [lab for lab, w in acc.items() if w == best]
            if len(cands) == 1:
                labels[u] = cands[0]
            else:
                cands.sort()
                labels[u] = cands[int(rng.integers(len(cands)))]
            changed = True
        if not changed:
            return labels, it, True
    return labels, max_iter, False


class LabelPropagation(CommunityDiscoverer):
    """Weighted asynchronous label propagation.

    Every node starts in its own community.  Each sweep visits the nodes in
    a fresh seeded random order; a node adopts the label carrying the
    largest total edge weight among its neighbours.  A node whose current
    label is already maximal keeps it; other ties are broken by a seeded
    uniform draw.  The run stops after a sweep with no change or after
    ``max_iter`` sweeps.

    Parameters
    ----------
    seed : int, default=42
        Seed of the sweep-order and tie-breaking generator.
    max_iter : int, default=100
        Sweep cap.

    Attributes
    ----------
    assignment_ : CommunityAssignment
    n_iter_ : int
        Number of sweeps performed.
    converged_ : bool
        False when the sweep cap was reached.
    """

    def __init__(self, seed: int = 42, max_iter: int = 100):
        self.seed = seed
        self.max_iter = max_iter

    def fit(self, g: MonoNetwork, y=None):
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if g.n_nodes == 0:
            raise ValueError("label propagation needs a non-empty network")
        adj = g.adjacency()
        # per-dimension stream so results do not depend on processing order
        rng = np.random.default_rng([int(self.seed), g.dimension + 1])
        labels, self.n_iter_, self.converged_ = _lpa_kernel(
            adj.indptr, adj.indices, adj.weights, rng, int(self.max_iter)
        )
        self.assignment_ = CommunityAssignment(g.dimension, g.nodes, densify(np.asarray(labels)))
        return self


class ConnectedComponents(CommunityDiscoverer):
    """One community per connected component of the slice."""

    def fit(self, g: MonoNetwork, y=None):
        n = g.n_nodes
        ls, ld = g.local_edges()
        graph = coo_matrix((np.ones(ls.size), (ls, ld)), shape=(n, n))
        _, labels = _cc(graph, directed=False)
        self.assignment_ = CommunityAssignment(g.dimension, g.nodes, densify(labels))
        return self


class FixedAssignment(CommunityDiscoverer):
    """Return externally supplied memberships.

    Parameters
    ----------
    table : mapping
        Either ``{node_id: labels}`` applied to every slice, or
        ``{dimension_id: {node_id: labels}}`` when ``per_dimension`` is true.
        Labels are any sortable tokens; they are renumbered densely in
        sorted order within each dimension.
    per_dimension : bool, default=False
    """

    def __init__(self, table=None, per_dimension: bool = False):
        self.table = table
        self.per_dimension = per_dimension

    def fit(self, g: MonoNetwork, y=None):
        table = self.table or {}
        if self.per_dimension:
            table = table.get(g.dimension, {})
        missing = [int(n) for n in g.nodes.tolist() if not table.get(n)]
        if missing:
            raise CoverageError(
                f"assignment table misses {len(missing)} node(s) of dimension "
                f"{g.dimension}, e.g. {missing[:5]}"
            )
        raw = sorted({lab for n in g.nodes.tolist() for lab in table[n]}, key=_label_key)
        code = {lab: i for i, lab in enumerate(raw)}
        nodes, labels = [], []
        for n in g.nodes.tolist():
            for lab in table[n]:
                nodes.append(n)
                labels.append(code[lab])
        self.assignment_ = CommunityAssignment(g.dimension, nodes, labels)
        return self


def _label_key(label):
    try:
        return (0, int(label), "")
    except (TypeError, ValueError):
        return (1, 0, str(label))


def label_propagation(g: MonoNetwork, seed: int = 42, max_iters: int = 100) -> CommunityAssignment:
    return LabelPropagation(seed=seed, max_iter=max_iters).detect(g)


def connected_components(g: MonoNetwork) -> CommunityAssignment:
    return ConnectedComponents().detect(g)


def fixed_assignment(g: MonoNetwork, table: Mapping) -> CommunityAssignment:
    return FixedAssignment(table).detect(g)


def read_assignment_table(path: str | os.PathLike, nodes=None, dimensions=None) -> dict:
    """Read a membership table.

    Lines are ``node community`` (one dimension) or ``dimension node
    community``; one line per membership, repeats allowed for overlaps.
    ``#`` starts a comment.  When the registries ``nodes`` / ``dimensions``
    are given, names are translated to ids.

    Returns
    -------
    dict
        ``{node: [labels]}`` for two-column files, or
        ``{dimension: {node: [labels]}}`` for three-column files.
    """
    flat: dict = defaultdict(list)
    nested: dict = defaultdict(lambda: defaultdict(list))
    width = None
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        for lineno, raw in enumerate(fh, start=1):
            fields = raw.split("#", 1)[0].split()
            if not fields:
                continue
            if len(fields) not in (2, 3) or (width is not None and len(fields) != width):
                raise ValueError(f"{path}: line {lineno}: expected a consistent 2 or 3 fields")
            width = len(fields)
            if width == 2:
                node, label = fields
                node = nodes.id(node) if nodes is not None else node
                if label not in flat[node]:
                    flat[node].append(label)
            else:
                dim, node, label = fields
                dim = dimensions.id(dim) if dimensions is not None else dim
                node = nodes.id(node) if nodes is not None else node
                if label not in nested[dim][node]:
                    nested[dim][node].append(label)
    if width == 3:
        return {d: dict(m) for d, m in nested.items()}
    return dict(flat)
