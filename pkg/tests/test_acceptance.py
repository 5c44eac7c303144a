"""End-to-end acceptance checks; each criterion prints PASS/FAIL in the terminal summary."""

import logging
import math
import time
from itertools import combinations

import numpy as np
import pytest

from conftest import TOY_CLOSED, random_db, random_network
from mdcommunities.cli import main
from mdcommunities.detect import ConnectedComponents, FixedAssignment, LabelPropagation
from mdcommunities.fcim import brute_force_closed, is_closed, mine_closed
from mdcommunities.network import read_edgelist, write_edgelist
from mdcommunities.pipeline import (
    MultidimCommunity,
    MultidimCommunityMiner,
    RunConfig,
    collapse_baseline,
    compare_node_sets,
    compute_mcd,
    run,
    write_communities,
)
from mdcommunities.synth import PlantedGroup, SynthSpec, generate

log = logging.getLogger(__name__)

# mined results of criteria 1-3, re-checked by criterion 4
MINED: list[tuple[object, list, int]] = []


def assert_closed_invariants(db, patterns, sigma):
    tidsets = [p.tidset for p in patterns]
    assert len(set(tidsets)) == len(tidsets)
    for p in patterns:
        assert p.support >= sigma
        inter = set(range(db.n_transactions))
        for x in p.itemset:
            inter &= set(db.tidsets[x])
        assert p.tidset == tuple(sorted(inter))
        assert is_closed(db, p)


@pytest.mark.criterion(1, "closed itemsets of the six-transaction toy, exact, < 1 s")
def test_c1_toy_database_golden(toy_db):
    t0 = time.perf_counter()
    got = mine_closed(toy_db, 2)
    elapsed = time.perf_counter() - t0
    MINED.append((toy_db, got, 2))
    assert {p.itemset: tuple(t + 1 for t in p.tidset) for p in got} == TOY_CLOSED
    assert len(got) == 6
    assert elapsed < 1.0


@pytest.mark.criterion(2, "toy network run-through, {3,5} and the five-node community, < 1 s")
def test_c2_run_through(toy_net, toy_table):
    t0 = time.perf_counter()
    miner = MultidimCommunityMiner(2, FixedAssignment(toy_table, per_dimension=True)).fit(toy_net)
    elapsed = time.perf_counter() - t0
    MINED.append((miner.transactions_, miner.patterns_, 2))
    name = toy_net.nodes.name
    found = {frozenset(name(n) for n in c.nodes): c for c in miner.communities_}
    pair = found[frozenset({"3", "5"})]
    assert len(pair.memberships) == 4
    assert pair.components == 2
    vldb = toy_net.dimensions.id("VLDB")
    everyone = found[frozenset({"1", "2", "3", "4", "5"})]
    # the second VLDB community densifies to label 1
    assert everyone.memberships == ((vldb, 1),)
    assert elapsed < 1.0


@pytest.mark.criterion(3, "miner equals brute force on 240 random databases, < 30 s")
def test_c3_oracle_equivalence():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    for i in range(240):
        db = random_db(rng, max_items=12, max_tx=30)
        sigma = 1 + i % 3
        got = mine_closed(db, sigma)
        assert got == brute_force_closed(db, sigma), f"database {i}"
        MINED.append((db, got, sigma))
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(4, "support, tidset, distinctness and closedness on every mined result")
def test_c4_invariants():
    # relies on criteria 1-3 having populated MINED earlier in this module
    assert len(MINED) >= 242
    for db, patterns, sigma in MINED:
        assert_closed_invariants(db, patterns, sigma)


def brute_mcd(net, nodes, dims):
    edges = sum(net.has_edge(u, v, d) for u, v in combinations(sorted(nodes), 2) for d in dims)
    n = len(nodes)
    return edges / (len(dims) * n * (n - 1) / 2)


@pytest.mark.criterion(5, "MCD against direct pair counting on 150 random communities")
def test_c5_mcd():
    rng = np.random.default_rng(5)
    for _ in range(150):
        n, k = int(rng.integers(2, 16)), int(rng.integers(1, 5))
        net = random_network(rng, n_nodes=n, n_dims=k, p=float(rng.uniform(0.0, 1.0)))
        nodes = rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False).tolist()
        dims = rng.choice(k, size=int(rng.integers(1, k + 1)), replace=False).tolist()
        c = MultidimCommunity(tuple((d, 0) for d in sorted(dims)), tuple(sorted(nodes)))
        got = compute_mcd(net, c)
        want = brute_mcd(net, nodes, dims)
        assert math.isclose(got, want, rel_tol=1e-12) or got == want == 0.0
        assert 0.0 <= got <= 1.0
    lines = [f"{u} {v} {d}" for u, v in combinations("abcde", 2) for d in ("x", "y", "z")]
    full = read_edgelist(lines)
    c = MultidimCommunity(((0, 0), (1, 0), (2, 0)), tuple(range(5)))
    assert compute_mcd(full, c) == 1.0


def planted_spec(seed):
    rng = np.random.default_rng(1000 + seed)
    n_nodes, n_dims = int(rng.integers(30, 300)), int(rng.integers(1, 7))
    order = rng.permutation(n_nodes).tolist()
    groups, start = [], 0
    for _ in range(int(rng.integers(1, 12))):
        k = int(rng.integers(2, 15))
        if start + k > n_nodes:
            break
        dims = rng.choice(n_dims, size=int(rng.integers(1, n_dims + 1)), replace=False)
        groups.append(PlantedGroup(order[start:start + k], sorted(dims.tolist())))
        start += k
    return SynthSpec(n_nodes, n_dims, groups, p_background=0.0, seed=seed)


@pytest.mark.criterion(6, "planted disjoint groups recovered exactly on 25 seeded specs")
def test_c6_planted_recovery():
    for seed in range(25):
        net, truth = generate(planted_spec(seed))
        comms = run(net, RunConfig(sigma=2, cd="components"))
        got = sorted((list(c.nodes), sorted({d for d, _ in c.memberships})) for c in comms)
        assert got == sorted((g["nodes"], g["dimensions"]) for g in truth), f"spec {seed}"


@pytest.mark.slow
@pytest.mark.criterion(7, "100k nodes, ~2M edges, 10 dimensions: label propagation + mining < 20 min")
def test_c7_scale():
    n, k = 100_000, 10
    p = 2_000_000 / k / (n * (n - 1) / 2)
    net, _ = generate(SynthSpec(n, k, p_background=p, seed=7))
    assert 1_900_000 < net.n_edges < 2_100_000
    t0 = time.perf_counter()
    miner = MultidimCommunityMiner(2, LabelPropagation(seed=42)).fit(net)
    elapsed = time.perf_counter() - t0
    log.warning("scale run: %d edges, %d communities, %.1f s", net.n_edges,
                len(miner.communities_), elapsed)
    assert miner.communities_
    assert elapsed < 1200.0


def cycle_fixture():
    # a and b co-author in three venues; the cycle a-c-d-b closes through one venue each
    return read_edgelist([
        "a b ICDM", "a b CIKM", "a b SIGMOD", "a c KDD", "b d VLDB", "c d SDM",
    ])


@pytest.mark.criterion(8, "collapsed baseline merges all four nodes, multidimensional run does not")
def test_c8_collapse_contrast():
    net = cycle_fixture()
    everyone = frozenset(range(4))
    baseline = collapse_baseline(net, ConnectedComponents())
    assert baseline == [everyone]
    for cd in ("components", "labelprop"):
        comms = run(net, RunConfig(cd=cd))
        assert comms
        assert all(frozenset(c.nodes) != everyone for c in comms)
        ratios = compare_node_sets(comms, baseline)
        assert math.isclose(sum(ratios), 1.0, rel_tol=0.0, abs_tol=1e-12)


def test_stats_tables_on_synthetic_run(tmp_path):
    spec = SynthSpec(
        200, 3,
        [PlantedGroup(list(range(i, i + 6)), [i % 3, (i + 1) % 3], 0.8) for i in range(0, 60, 6)],
        p_background=0.01, seed=11,
    )
    net, _ = generate(spec)
    comms = run(net, RunConfig(cd="labelprop", seed=1))
    path = tmp_path / "c.tsv"
    write_communities(comms, path, net)
    out = tmp_path / "stats.csv"
    assert main(["stats", "--communities", str(path), "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()]
    assert rows[0] == ["measure", "threshold", "fraction_at_least"]
    for measure in ("support", "size", "mcd"):
        series = [(float(t), float(f)) for m, t, f in rows[1:] if m == measure]
        assert series and series[0][1] == 1.0
        assert all(a[0] < b[0] and a[1] >= b[1] for a, b in zip(series, series[1:]))
    edge_file = tmp_path / "net.tsv"
    write_edgelist(net, edge_file)
    assert main(["run", "--input", str(edge_file), "--seed", "1", "--out", str(tmp_path / "r.tsv")]) == 0
