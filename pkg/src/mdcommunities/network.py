"""Edge-labeled undirected multigraphs and their per-dimension slices.

A :class:`MultidimNetwork` holds a node registry, a dimension registry and,
for every dimension, a canonical edge array ``(src, dst, weight)`` with
``src < dst``.  Networks are immutable once built.
"""

from __future__ import annotations

import logging
import os
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    """Malformed line in an edge-list file."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class NetworkValidationError(ValueError):
    """Edge violates the network model (self-loop, non-positive weight...)."""


class Registry:
    """Bijection between opaque string names and dense integer ids."""

    __slots__ = ("_names", "_index")

    def __init__(self, names: Iterable[str] = ()):
        self._names: list[str] = []
        self._index: dict[str, int] = {}
        for name in names:
            self.add(name)

    def add(self, name: str) -> int:
        idx = self._index.get(name)
        if idx is None:
            idx = len(self._names)
            self._index[name] = idx
            self._names.append(name)
        return idx

    def id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown name {name!r}") from None

    def name(self, idx: int) -> str:
        if not 0 <= idx < len(self._names):
            raise KeyError(f"unknown id {idx}")
        return self._names[idx]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Registry) and self._names == other._names

    def __repr__(self) -> str:
        return f"Registry({len(self)} names)"


def _canonical_edges(src, dst, weight, n_nodes):
    """Sort, orient ``src < dst`` and merge duplicate pairs by summing weights."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    weight = np.asarray(weight, dtype=np.float64)
    if not (src.shape == dst.shape == weight.shape) or src.ndim != 1:
        raise ValueError("src, dst and weight must be 1-d arrays of equal length")
    if src.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), np.empty(0, dtype=np.float64)
    if np.any(src == dst):
        bad = int(src[np.argmax(src == dst)])
        raise NetworkValidationError(f"self-loop on node {bad}")
    if not np.all(weight > 0) or not np.all(np.isfinite(weight)):
        raise NetworkValidationError("edge weights must be finite and > 0")
    if src.min() < 0 or max(src.max(), dst.max()) >= n_nodes or dst.min() < 0:
        raise NetworkValidationError("edge endpoint outside the node registry")
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    key = lo * np.int64(n_nodes) + hi
    uniq, inverse = np.unique(key, return_inverse=True)
    merged = np.zeros(uniq.size, dtype=np.float64)
    np.add.at(merged, inverse, weight)
    return uniq // n_nodes, uniq % n_nodes, merged


@dataclass(frozen=True)
class _Adjacency:
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray


def _csr(src, dst, weight, n):
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    both_w = np.concatenate([weight, weight])
    order = np.lexsort((both_dst, both_src))
    counts = np.bincount(both_src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return _Adjacency(indptr, both_dst[order], both_w[order])


class MultidimNetwork:
    """Edge-labeled undirected weighted multigraph ``(V, E, L)``.

    At most one edge exists per ``(u, v, d)`` triple.  Edges of dimension
    ``d`` are stored once, oriented ``u < v``, sorted lexicographically.

    Use :meth:`from_edges` or :meth:`from_arrays` rather than the
    constructor, which trusts its input.
    """

    def __init__(self, nodes: Registry, dimensions: Registry, edges: list[tuple]):
        if len(edges) != len(dimensions):
            raise ValueError("one edge triple (src, dst, weight) per dimension required")
        self._nodes = nodes
        self._dims = dimensions
        self._edges = []
        for s, d, w in edges:
            for arr in (s, d, w):
                arr.setflags(write=False)
            self._edges.append((s, d, w))
        self._adj: dict[int, _Adjacency] = {}

    # -- construction -------------------------------------------------
    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple],
        nodes: Iterable[str] = (),
        dimensions: Iterable[str] = (),
    ) -> "MultidimNetwork":
        """Build from ``(u, v, d)`` or ``(u, v, d, w)`` name tuples.

        Registries follow first-appearance order; ``nodes`` and
        ``dimensions`` may pre-register names (isolated nodes, empty
        dimensions).  Duplicate triples have their weights summed.
        """
        node_reg = Registry(str(n) for n in nodes)
        dim_reg = Registry(str(d) for d in dimensions)
        buckets: list[dict[tuple[int, int], float]] = [{} for _ in range(len(dim_reg))]
        for edge in edges:
            if len(edge) == 3:
                u, v, d = edge
                w = 1.0
            else:
                u, v, d, w = edge
            w = float(w)
            if u == v:
                raise NetworkValidationError(f"self-loop on node {u!r}")
            if not w > 0 or w == float("inf"):
                raise NetworkValidationError(f"weight must be finite and > 0, got {w!r}")
            a, b = node_reg.add(str(u)), node_reg.add(str(v))
            di = dim_reg.add(str(d))
            if di == len(buckets):
                buckets.append({})
            key = (a, b) if a < b else (b, a)
            bucket = buckets[di]
            bucket[key] = bucket.get(key, 0.0) + w
        arrays = []
        for bucket in buckets:
            if bucket:
                pairs = sorted(bucket)
                src = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
                dst = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
                w = np.fromiter((bucket[p] for p in pairs), dtype=np.float64, count=len(pairs))
            else:
                src = np.empty(0, dtype=np.int64)
                dst = np.empty(0, dtype=np.int64)
                w = np.empty(0, dtype=np.float64)
            arrays.append((src, dst, w))
        return cls(node_reg, dim_reg, arrays)

    @classmethod
    def from_arrays(
        cls,
        node_names: Iterable[str],
        dimension_names: Iterable[str],
        edges: Iterable[tuple],
    ) -> "MultidimNetwork":
        """Build from integer edge arrays, one ``(src, dst, weight)`` per dimension.

        Arrays are validated, oriented and deduplicated (weights summed).
        """
        nodes = Registry(node_names)
        dims = Registry(dimension_names)
        if len(nodes) == 0:
            n = 1
        else:
            n = len(nodes)
        edges = [_canonical_edges(s, d, w, n) for s, d, w in edges]
        if len(edges) != len(dims):
            raise ValueError("one edge triple per dimension required")
        return cls(nodes, dims, edges)

    # -- registries -----------------------------------------------------
    @property
    def nodes(self) -> Registry:
        return self._nodes

    @property
    def dimensions(self) -> Registry:
        return self._dims

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_dimensions(self) -> int:
        return len(self._dims)

    @property
    def n_edges(self) -> int:
        return sum(s.size for s, _, _ in self._edges)

    def _check_dim(self, d: int) -> None:
        if not 0 <= d < len(self._dims):
            raise KeyError(f"unknown dimension id {d}")

    def _check_node(self, n: int) -> None:
        if not 0 <= n < len(self._nodes):
            raise KeyError(f"unknown node id {n}")

    # -- edges ----------------------------------------------------------
    def dimension_edges(self, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Read-only ``(src, dst, weight)`` arrays of dimension ``d``."""
        self._check_dim(d)
        return self._edges[d]

    def edges(self) -> Iterator[tuple[int, int, int, float]]:
        """Iterate ``(u, v, d, w)`` with ``u < v``, ordered by dimension then pair."""
        for d, (s, t, w) in enumerate(self._edges):
            for u, v, x in zip(s.tolist(), t.tolist(), w.tolist()):
                yield u, v, d, x

    def adjacency(self, d: int) -> _Adjacency:
        """CSR adjacency of dimension ``d`` over global node ids (cached)."""
        self._check_dim(d)
        adj = self._adj.get(d)
        if adj is None:
            s, t, w = self._edges[d]
            adj = _csr(s, t, w, self.n_nodes)
            self._adj[d] = adj
        return adj

    def has_edge(self, u: int, v: int, d: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        self._check_dim(d)
        if u == v:
            return False
        a, b = (u, v) if u < v else (v, u)
        s, t, _ = self._edges[d]
        lo = np.searchsorted(s, a, side="left")
        hi = np.searchsorted(s, a, side="right")
        j = lo + np.searchsorted(t[lo:hi], b)
        return bool(j < hi and t[j] == b)

    def weight(self, u: int, v: int, d: int) -> float:
        a, b = (u, v) if u < v else (v, u)
        if not self.has_edge(a, b, d):
            raise KeyError(f"no edge ({u}, {v}, {d})")
        s, t, w = self._edges[d]
        lo = np.searchsorted(s, a, side="left")
        hi = np.searchsorted(s, a, side="right")
        return float(w[lo + np.searchsorted(t[lo:hi], b)])

    def nodes_in_dimension(self, d: int) -> np.ndarray:
        """Sorted ids of nodes with at least one edge in dimension ``d``."""
        s, t, _ = self.dimension_edges(d)
        return np.unique(np.concatenate([s, t]))

    def node_dimensions(self, n: int) -> list[int]:
        """Dimensions in which node ``n`` appears."""
        self._check_node(n)
        out = []
        for d in range(self.n_dimensions):
            adj = self.adjacency(d)
            if adj.indptr[n + 1] > adj.indptr[n]:
                out.append(d)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultidimNetwork):
            return NotImplemented
        if self._nodes != other._nodes or self._dims != other._dims:
            return False
        return all(
            np.array_equal(a, b)
            for ea, eb in zip(self._edges, other._edges)
            for a, b in zip(ea, eb)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"MultidimNetwork(n_nodes={self.n_nodes}, "
            f"n_dimensions={self.n_dimensions}, n_edges={self.n_edges})"
        )


@dataclass(frozen=True, eq=False)
class MonoNetwork:
    """The edges of one dimension, over the nodes that appear in it.

    ``nodes`` holds sorted global node ids; the CSR adjacency is indexed by
    *local* positions into ``nodes``.
    """

    dimension: int
    nodes: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    _adj: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, dimension: int, src, dst, weight) -> "MonoNetwork":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        weight = np.asarray(weight, dtype=np.float64)
        nodes = np.unique(np.concatenate([src, dst]))
        return cls(dimension, nodes, src, dst, weight)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def local_edges(self) -> tuple[np.ndarray, np.ndarray]:
        return np.searchsorted(self.nodes, self.src), np.searchsorted(self.nodes, self.dst)

    def adjacency(self) -> _Adjacency:
        """CSR adjacency over local node positions (cached)."""
        adj = self._adj.get("csr")
        if adj is None:
            ls, ld = self.local_edges()
            adj = _csr(ls, ld, self.weight, self.n_nodes)
            self._adj["csr"] = adj
        return adj


def split(net: MultidimNetwork) -> list[MonoNetwork]:
    """One :class:`MonoNetwork` per dimension that has at least one edge.

    Each node is replicated into every dimension where it has an edge;
    dimensions without edges produce nothing.
    """
    out = []
    for d in range(net.n_dimensions):
        s, t, w = net.dimension_edges(d)
        if s.size:
            out.append(MonoNetwork.from_edges(d, s, t, w))
    return out


def collapse(net: MultidimNetwork) -> MonoNetwork:
    """Merge all dimensions into one slice, summing parallel edge weights.

    The result carries dimension id ``-1``.
    """
    parts = [net.dimension_edges(d) for d in range(net.n_dimensions)]
    if not parts:
        e = np.empty(0, dtype=np.int64)
        return MonoNetwork.from_edges(-1, e, e, np.empty(0))
    s, t, w = _canonical_edges(
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
        np.concatenate([p[2] for p in parts]),
        max(net.n_nodes, 1),
    )
    return MonoNetwork.from_edges(-1, s, t, w)


def _resolve_nodes(net: MultidimNetwork, nodes) -> np.ndarray:
    arr = np.unique(np.asarray(list(nodes), dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= net.n_nodes):
        bad = arr[0] if arr[0] < 0 else arr[-1]
        raise KeyError(f"unknown node id {int(bad)}")
    return arr


def _resolve_dims(net: MultidimNetwork, dims) -> list[int]:
    out = sorted(set(int(d) for d in dims))
    for d in out:
        net._check_dim(d)
    return out


def induced_edges(net: MultidimNetwork, nodes, dims) -> Iterator[tuple[int, int, int]]:
    """Yield ``(u, v, d)`` for every edge with both ends in ``nodes`` and ``d`` in ``dims``."""
    members = _resolve_nodes(net, nodes)
    dim_ids = _resolve_dims(net, dims)
    member_set = set(members.tolist())
    for d in dim_ids:
        adj = net.adjacency(d)
        indptr, indices = adj.indptr, adj.indices
        for u in members.tolist():
            for v in indices[indptr[u]:indptr[u + 1]].tolist():
                if v > u and v in member_set:
                    yield u, v, d


def edges_among(net: MultidimNetwork, nodes, dims) -> int:
    """Number of distinct edges ``(u, v, d)`` with ``u, v`` in ``nodes`` and ``d`` in ``dims``."""
    return sum(1 for _ in induced_edges(net, nodes, dims))


# -- edge-list I/O --------------------------------------------------------

def _parse_lines(lines: Iterable[str], default_weight: float):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) == 3:
            u, v, d = fields
            w = default_weight
        elif len(fields) == 4:
            u, v, d, ws = fields
            try:
                w = float(ws)
            except ValueError:
                raise EdgeListParseError(lineno, f"non-numeric weight {ws!r}") from None
        else:
            raise EdgeListParseError(lineno, f"expected 3 or 4 fields, got {len(fields)}")
        if u == v:
            raise NetworkValidationError(f"line {lineno}: self-loop on node {u!r}")
        if not w > 0 or w == float("inf"):
            raise NetworkValidationError(f"line {lineno}: weight must be finite and > 0, got {w!r}")
        yield u, v, d, w


def read_edgelist(lines: Iterable[str], default_weight: float = 1.0) -> MultidimNetwork:
    """Parse ``u v d [w]`` records from an iterable of text lines."""
    return MultidimNetwork.from_edges(_parse_lines(lines, default_weight))


def load_edgelist(path: str | os.PathLike, default_weight: float = 1.0) -> MultidimNetwork:
    """Load a whitespace-separated ``u v d [w]`` edge list.

    ``#`` starts a comment.  Names are arbitrary non-whitespace tokens; the
    file is decoded with ``surrogateescape`` so arbitrary bytes round-trip.
    """
    with open(path, encoding="utf-8", errors="surrogateescape") as fh:
        net = read_edgelist(fh, default_weight)
    logger.info("loaded %r from %s", net, path)
    return net


def format_edgelist(net: MultidimNetwork) -> Iterator[str]:
    nodes = net.nodes.names
    dims = net.dimensions.names
    for u, v, d, w in net.edges():
        yield f"{nodes[u]}\t{nodes[v]}\t{dims[d]}\t{w!r}\n"


def write_edgelist(net: MultidimNetwork, path: str | os.PathLike) -> None:
    """Write ``net`` in the edge-list format (weights use ``repr`` for exact round-trip).

    Nodes without edges and dimensions without edges are not representable
    and are dropped.
    """
    with open(path, "w", encoding="utf-8", errors="surrogateescape") as fh:
        fh.writelines(format_edgelist(net))
