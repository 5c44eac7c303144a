"""Command-line interface: ``mdcommunities <command> [flags]``."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys

from . import __version__
from .detect import ConnectedComponents, LabelPropagation, read_assignment_table
from .fcim import format_patterns, mine_closed
from .lattice import build_lattice, format_lattice
from .membership import read_transactions
from .network import format_edgelist, load_edgelist
from .pipeline import (
    MultidimCommunityMiner,
    RunConfig,
    collapse_baseline,
    compare_node_sets,
    filter_communities,
    format_communities,
    format_stats,
    read_communities,
    read_node_sets,
    stats,
)
from .synth import generate, load_spec

logger = logging.getLogger("mdcommunities")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", errors="surrogateescape") as fh:
            yield fh


def _add_cd_flags(p):
    p.add_argument("--cd", choices=["labelprop", "components", "fixed"], default="labelprop")
    p.add_argument("--cd-table", help="membership table for --cd fixed")
    p.add_argument("--seed", type=_non_negative_int, default=42)
    p.add_argument("--max-iters", type=_positive_int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdcommunities",
        description="Multidimensional community discovery via closed membership itemsets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="find communities in an edge-list network")
    p.add_argument("--input", required=True, help="edge list: u v dimension [weight]")
    _add_cd_flags(p)
    p.add_argument("--min-support", type=_positive_int, default=2)
    p.add_argument("--n-jobs", type=int, default=None,
                   help="parallel dimensions (default: $MDCOMMUNITIES_N_JOBS or 1)")
    p.add_argument("--out", help="community records (default: stdout)")
    p.add_argument("--lattice-out", help="write the community lattice here")
    p.add_argument("--transactions-out", help="write the membership transactions here")

    p = sub.add_parser("mine", help="mine closed itemsets from a transaction file")
    p.add_argument("--transactions", required=True)
    p.add_argument("--min-support", type=_positive_int, default=2)
    p.add_argument("--out")

    p = sub.add_parser("filter", help="select communities by support, size and MCD")
    p.add_argument("--communities", required=True)
    p.add_argument("--min-support", type=int)
    p.add_argument("--max-support", type=int)
    p.add_argument("--min-size", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--min-mcd", type=float)
    p.add_argument("--max-mcd", type=float)
    p.add_argument("--exclusive-max-mcd", action="store_true", help="require mcd < --max-mcd")
    p.add_argument("--out")

    p = sub.add_parser("lattice", help="cover lattice of a community file")
    p.add_argument("--communities", required=True)
    p.add_argument("--out")

    p = sub.add_parser("compare", help="exact-match overlap of two community collections")
    p.add_argument("--a", required=True, help="community records or one node set per line")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--b", help="second collection")
    group.add_argument("--collapse-input", help="network whose collapsed communities form B")
    p.add_argument("--cd", choices=["labelprop", "components"], default="labelprop")
    p.add_argument("--seed", type=_non_negative_int, default=42)
    p.add_argument("--max-iters", type=_positive_int, default=100)
    p.add_argument("--out")

    p = sub.add_parser("synth", help="generate a network with planted groups")
    p.add_argument("--spec", required=True, help="JSON generator spec")
    p.add_argument("--out", help="edge list (default: stdout)")
    p.add_argument("--truth-out", help="planted groups as JSON")

    p = sub.add_parser("stats", help="cumulative distributions of support, size and MCD")
    p.add_argument("--communities", required=True)
    p.add_argument("--out")
    return parser


def cmd_run(args) -> None:
    net = load_edgelist(args.input)
    table = None
    if args.cd == "fixed":
        if not args.cd_table:
            raise ValueError("--cd fixed requires --cd-table")
        table = read_assignment_table(args.cd_table, nodes=net.nodes, dimensions=net.dimensions)
    cfg = RunConfig(
        sigma=args.min_support, cd=args.cd, seed=args.seed, max_iters=args.max_iters,
        table=table, n_jobs=args.n_jobs, input_path=args.input, out_path=args.out,
        lattice_path=args.lattice_out,
    )
    miner = MultidimCommunityMiner(cfg.sigma, cfg.make_discoverer(), cfg.n_jobs).fit(net)
    logger.info("%d communities", len(miner.communities_))
    with _output(args.out) as fh:
        fh.writelines(format_communities(miner.communities_, net))
    if args.lattice_out:
        labels = [
            " ".join(f"{net.dimensions.name(d)}:{lab}" for d, lab in c.memberships)
            for c in miner.communities_
        ]
        with _output(args.lattice_out) as fh:
            fh.writelines(format_lattice(miner.lattice(), labels))
    if args.transactions_out:
        from .membership import write_transactions

        write_transactions(miner.transactions_, args.transactions_out)


def cmd_mine(args) -> None:
    db = read_transactions(args.transactions)
    patterns = mine_closed(db, args.min_support)
    logger.info("%d closed patterns", len(patterns))
    with _output(args.out) as fh:
        fh.writelines(format_patterns(patterns))


def cmd_filter(args) -> None:
    comms = read_communities(args.communities)
    kept = filter_communities(
        comms, args.min_support, args.min_size, args.max_size, args.min_mcd, args.max_mcd,
        max_support=args.max_support, exclusive_max_mcd=args.exclusive_max_mcd,
    )
    logger.info("kept %d of %d communities", len(kept), len(comms))
    with _output(args.out) as fh:
        fh.writelines(format_communities(kept))


def cmd_lattice(args) -> None:
    comms = read_communities(args.communities)
    lattice = build_lattice([c.memberships for c in comms])
    labels = [" ".join(f"{d}:{lab}" for d, lab in c.memberships) for c in comms]
    with _output(args.out) as fh:
        fh.writelines(format_lattice(lattice, labels))


def cmd_compare(args) -> None:
    a = read_node_sets(args.a)
    if args.b:
        b = read_node_sets(args.b)
    else:
        net = load_edgelist(args.collapse_input)
        cd = (
            LabelPropagation(seed=args.seed, max_iter=args.max_iters)
            if args.cd == "labelprop" else ConnectedComponents()
        )
        b = [tuple(net.nodes.name(n) for n in sorted(g)) for g in collapse_baseline(net, cd)]
    overlap = compare_node_sets(a, b)
    with _output(args.out) as fh:
        fh.write("both\tonly_a\tonly_b\n")
        fh.write(f"{overlap.both!r}\t{overlap.only_a!r}\t{overlap.only_b!r}\n")


def cmd_synth(args) -> None:
    spec = load_spec(args.spec)
    net, truth = generate(spec)
    logger.info("generated %r", net)
    with _output(args.out) as fh:
        fh.writelines(format_edgelist(net))
    if args.truth_out:
        named = [
            {"nodes": [net.nodes.name(n) for n in g["nodes"]],
             "dimensions": [net.dimensions.name(d) for d in g["dimensions"]]}
            for g in truth
        ]
        with _output(args.truth_out) as fh:
            json.dump(named, fh, indent=2)
            fh.write("\n")


def cmd_stats(args) -> None:
    comms = read_communities(args.communities)
    with _output(args.out) as fh:
        fh.writelines(format_stats(stats(comms)))


COMMANDS = {
    "run": cmd_run,
    "mine": cmd_mine,
    "filter": cmd_filter,
    "lattice": cmd_lattice,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"mdcommunities {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
