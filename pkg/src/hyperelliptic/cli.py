"""Command-line front end: hgr file format, gonality checks, oracles,
generators and DOT export.

hgr format: a header line ``hgr <n> <m>``, then exactly m lines ``e <u> <v>``
with 0-based dense vertex ids (u = v gives a loop, repeated lines give
parallel edges), then any number of ``c <u> <v>`` constraint lines.  ``#``
starts a comment; tokens are whitespace separated.

Exit codes for ``check``: 0 when all requested modes answer YES, 1 when any
answers NO, 2 on parse or usage errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import chipfiring, engine, testkit
from .multigraph import GraphError, Multigraph


class HgrError(Exception):
    """Malformed hgr input."""


def parse_hgr(text: str, warn=None) -> Multigraph:
    tokens: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens.append(line.split())
    if not tokens:
        raise HgrError("empty input")
    head = tokens[0]
    if len(head) != 3 or head[0] != "hgr":
        raise HgrError(f"malformed header: {' '.join(head)!r}")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise HgrError(f"malformed header: {' '.join(head)!r}") from None
    if n < 0 or m < 0:
        raise HgrError("vertex and edge counts must be non-negative")
    g = Multigraph()
    ids = [g.add_vertex() for _ in range(n)]

    def vertex(tok: str) -> int:
        try:
            i = int(tok)
        except ValueError:
            raise HgrError(f"bad vertex id {tok!r}") from None
        if not 0 <= i < n:
            raise HgrError(f"vertex id {i} out of range [0, {n})")
        return ids[i]

    edges = 0
    for parts in tokens[1:]:
        kind = parts[0]
        if kind == "e":
            if len(parts) != 3:
                raise HgrError(f"malformed edge line: {' '.join(parts)!r}")
            g.add_edge(vertex(parts[1]), vertex(parts[2]))
            edges += 1
        elif kind == "c":
            if len(parts) != 3:
                raise HgrError(f"malformed constraint line: {' '.join(parts)!r}")
            if not g.add_constraint(vertex(parts[1]), vertex(parts[2])):
                if warn is not None:
                    warn(f"duplicate constraint {parts[1]} {parts[2]} ignored")
        else:
            raise HgrError(f"unknown line kind {kind!r}")
    if edges != m:
        raise HgrError(f"header promises {m} edges, found {edges}")
    return g


def format_hgr(g: Multigraph) -> str:
    idx = {v: i for i, v in enumerate(g.vertices())}
    lines = [f"hgr {g.vertex_count} {g.edge_count}"]
    for _, (u, v) in g.edge_items():
        lines.append(f"e {idx[u]} {idx[v]}")
    for a, b in sorted(g.constraints):
        lines.append(f"c {idx[a]} {idx[b]}")
    return "\n".join(lines) + "\n"


def to_dot(g: Multigraph) -> str:
    lines = ["graph reduction_state {"]
    for v in g.vertices():
        lines.append(f'  v{v} [label="{v}"];')
    for _, (u, v) in g.edge_items():
        lines.append(f"  v{u} -- v{v};")
    for a, b in sorted(g.constraints):
        lines.append(f"  v{a} -- v{b} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write_dot_snapshots(g: Multigraph, trace, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    state = g.copy()
    (directory / "step_0000.dot").write_text(to_dot(state))
    for i, s in enumerate(trace, start=1):
        state = engine.replay_trace(state, [s])
        (directory / f"step_{i:04d}.dot").write_text(to_dot(state))


def _cmd_check(args) -> int:
    g = _load(args.file)
    modes = list(engine.FLAVORS) if args.mode == "all" else [args.mode]
    all_yes = True
    for mode in modes:
        verdict = engine.run(g, mode, record_trace=bool(args.trace or args.dot))
        all_yes &= verdict.answer
        tree = "true" if verdict.is_tree else "false"
        print(
            f"{mode} {verdict.text} reason={verdict.reason} "
            f"steps={verdict.steps_total} tree={tree}"
        )
        if args.trace:
            for s in verdict.trace:
                line = f"{mode} {s.rule} removed={list(s.removed_vertices)}"
                if s.added_constraint is not None:
                    line += f" constraint={s.added_constraint}"
                print(line)
        if args.dot:
            base = Path(args.dot)
            _write_dot_snapshots(
                g, verdict.trace, base / mode if len(modes) > 1 else base
            )
    return 0 if all_yes else 1


def _cmd_oracle(args) -> int:
    g = _load(args.file)
    if args.mode == "dgon":
        print("YES" if chipfiring.dgon_at_most_2(g) else "NO")
    elif args.mode == "constrained":
        print("YES" if chipfiring.constrained_suitable_exists(g) else "NO")
    else:
        print(testkit.sdgon_leq2_bounded(g, max_subdiv=args.max_subdiv))
    return 0


def _cmd_gen(args) -> int:
    if args.kind == "random":
        if args.edges is None:
            raise GraphError("--edges is required for --kind random")
        g = testkit.gen_multigraph(
            args.seed, args.nodes, args.edges, args.p_parallel, args.p_loop
        )
    elif args.kind == "sp":
        g = testkit.gen_series_parallel(
            args.seed, args.nodes, p_series=args.p_series,
            max_parallel=args.max_parallel,
        )
    else:
        g = testkit.gen_tree(args.seed, args.nodes)
    sys.stdout.write(format_hgr(g))
    return 0


def _load(path: str) -> Multigraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise HgrError(f"cannot read {path}: {exc}") from None
    return parse_hgr(text, warn=lambda msg: print(f"warning: {msg}", file=sys.stderr))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperelliptic",
        description="Decide whether a multigraph has gonality at most 2.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run the reduction engines on an hgr file")
    check.add_argument("--mode", choices=[*engine.FLAVORS, "all"], default="all")
    check.add_argument("--trace", action="store_true", help="print one line per rule")
    check.add_argument("--dot", metavar="DIR", help="write step_<i>.dot snapshots")
    check.add_argument("file")
    check.set_defaults(func=_cmd_check)

    oracle = sub.add_parser("oracle", help="run a brute-force oracle on an hgr file")
    oracle.add_argument(
        "--mode", choices=["dgon", "constrained", "sdgon-bounded"], required=True
    )
    oracle.add_argument("--max-subdiv", type=int, default=2)
    oracle.add_argument("file")
    oracle.set_defaults(func=_cmd_oracle)

    gen = sub.add_parser("gen", help="generate an hgr graph on stdout")
    gen.add_argument("--kind", choices=["random", "sp", "tree"], required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--edges", type=int, default=None)
    gen.add_argument("--p-parallel", type=float, default=0.2)
    gen.add_argument("--p-loop", type=float, default=0.1)
    gen.add_argument("--p-series", type=float, default=0.5)
    gen.add_argument("--max-parallel", type=int, default=None)
    gen.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HgrError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
