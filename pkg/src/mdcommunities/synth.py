"""Synthetic multidimensional networks with planted shared memberships."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .network import MultidimNetwork
from .validation import check_fraction


@dataclass
class PlantedGroup:
    """Nodes wired together (with probability ``p_intra``) in each of ``dimensions``.

    ``p_intra`` is one probability for all dimensions or one per dimension.
    """

    nodes: list[int]
    dimensions: list[int]
    p_intra: float | list[float] = 1.0

    def intra_probabilities(self) -> list[float]:
        if isinstance(self.p_intra, (list, tuple)):
            if len(self.p_intra) != len(self.dimensions):
                raise ValueError("p_intra needs one probability per group dimension")
            return [check_fraction("p_intra", p) for p in self.p_intra]
        return [check_fraction("p_intra", self.p_intra)] * len(self.dimensions)


@dataclass
class SynthSpec:
    n_nodes: int
    n_dimensions: int
    groups: list[PlantedGroup] = field(default_factory=list)
    p_background: float = 0.0
    weight_low: float = 1.0
    weight_high: float = 10.0
    seed: int = 0

    def validate(self) -> "SynthSpec":
        if self.n_nodes < 0 or self.n_dimensions < 0:
            raise ValueError("n_nodes and n_dimensions must be non-negative")
        check_fraction("p_background", self.p_background)
        if not 0 < self.weight_low <= self.weight_high:
            raise ValueError("weights need 0 < weight_low <= weight_high")
        for g in self.groups:
            g.intra_probabilities()
            if any(not 0 <= n < self.n_nodes for n in g.nodes):
                raise ValueError(f"group references a node outside 0..{self.n_nodes - 1}")
            if any(not 0 <= d < self.n_dimensions for d in g.dimensions):
                raise ValueError(f"group references a dimension outside 0..{self.n_dimensions - 1}")
            if len(set(g.nodes)) != len(g.nodes) or len(set(g.dimensions)) != len(g.dimensions):
                raise ValueError("group lists a node or dimension twice")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        data = dict(data)
        data["groups"] = [PlantedGroup(**g) for g in data.get("groups", [])]
        return cls(**data).validate()

    def to_dict(self) -> dict:
        return asdict(self)


def load_spec(path: str | os.PathLike) -> SynthSpec:
    """Read a :class:`SynthSpec` from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        return SynthSpec.from_dict(json.load(fh))


def _background_pairs(rng, n: int, p: float) -> np.ndarray:
    """Uniformly random ``m ~ Binomial(n(n-1)/2, p)`` distinct pairs as keys ``u*n+v``, ``u<v``."""
    n_pairs = n * (n - 1) // 2
    if p == 0 or n_pairs == 0:
        return np.empty(0, dtype=np.int64)
    m = int(rng.binomial(n_pairs, p))
    if m == 0:
        return np.empty(0, dtype=np.int64)
    if m > n_pairs // 4:
        iu, iv = np.triu_indices(n, k=1)
        pick = rng.choice(n_pairs, size=m, replace=False)
        return np.sort(iu[pick].astype(np.int64) * n + iv[pick])
    keys = np.empty(0, dtype=np.int64)
    while keys.size < m:
        need = m - keys.size
        u = rng.integers(0, n, size=int(need * 1.1) + 16)
        v = rng.integers(0, n, size=u.size)
        ok = u != v
        lo, hi = np.minimum(u[ok], v[ok]), np.maximum(u[ok], v[ok])
        fresh = np.setdiff1d(np.unique(lo * n + hi), keys, assume_unique=True)
        if fresh.size > need:
            fresh = rng.choice(fresh, size=need, replace=False)
        keys = np.union1d(keys, fresh)
    return keys


def generate(spec: SynthSpec) -> tuple[MultidimNetwork, list[dict]]:
    """Sample a network from ``spec``.

    Returns
    -------
    net : MultidimNetwork
        Nodes are named ``"0".."n-1"`` and dimensions ``"d0".."d{k-1}"``;
        every node is registered even without edges.
    truth : list of dict
        One ``{"nodes": [...], "dimensions": [...]}`` per planted group.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n_nodes
    per_dim: list[list[np.ndarray]] = [[] for _ in range(spec.n_dimensions)]
    for g in spec.groups:
        members = np.array(sorted(g.nodes), dtype=np.int64)
        if members.size < 2:
            continue
        pairs = np.array(list(combinations(members.tolist(), 2)), dtype=np.int64)
        keys = pairs[:, 0] * n + pairs[:, 1]
        for d, p in zip(g.dimensions, g.intra_probabilities()):
            keep = rng.random(keys.size) < p
            per_dim[d].append(keys[keep])
    edges = []
    for d in range(spec.n_dimensions):
        keys = np.unique(np.concatenate(per_dim[d] + [_background_pairs(rng, n, spec.p_background)]))
        w = rng.uniform(spec.weight_low, spec.weight_high, size=keys.size)
        edges.append((keys // max(n, 1), keys % max(n, 1), w))
    net = MultidimNetwork.from_arrays(
        [str(i) for i in range(n)], [f"d{d}" for d in range(spec.n_dimensions)], edges
    )
    truth = [{"nodes": sorted(g.nodes), "dimensions": sorted(g.dimensions)} for g in spec.groups]
    return net, truth
