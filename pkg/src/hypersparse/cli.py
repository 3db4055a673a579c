"""Command-line interface: ``hypersparse {sparsify,verify,oracle,gen,bench-space}``.

Exit codes: 0 success, 1 usage or other error, 2 recovery failure,
3 deletion budget exceeded, 4 malformed input, 5 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from contextlib import contextmanager

from . import generators
from .core import Hypergraph, WeightedHypergraph, verify_sparsifier
from .errors import (DeletionBudgetExceeded, HypersparseError, MalformedInput, NoCut,
                     NotASubgraph, RecoveryFailure, StreamTooLong, TooLarge)
from .formats import materialize, read_stream, read_weighted, write_stream, write_weighted
from .oracle import (compute_strengths, min_normalized_kcut, num_components,
                     reciprocal_strength_sum, simple_sparsify, static_sparsify)
from .stream import EngineConfig, make_engine

EXIT_OK, EXIT_ERROR, EXIT_RECOVERY, EXIT_BUDGET, EXIT_MALFORMED, EXIT_VERIFY = 0, 1, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("HSS_SEED")
    return int(raw) if raw else 0


@contextmanager
def _open(path, mode="r"):
    if path in (None, "-"):
        yield sys.stdin if "r" in mode else sys.stdout
    else:
        with open(path, mode, encoding="utf-8", newline="\n") as fh:
            yield fh


def _parse_sets(pairs) -> dict:
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _parse_mode(mode: str):
    name, _, k = mode.partition(":")
    if name not in ("static", "simple", "insertion", "bounded", "dynamic"):
        raise ValueError(f"unknown mode {mode!r}")
    if k and name != "bounded":
        raise ValueError("only bounded mode takes :k")
    return name, int(k) if k else None


def _sparsify_once(args, config, seed):
    name, k = _parse_mode(args.mode)
    with _open(args.input) as fh:
        header, updates = read_stream(fh, labels=args.labels)
        if name == "bounded":
            if k is None:
                k = header.k
            elif header.k and header.k != k:
                raise MalformedInput(f"header k={header.k} disagrees with mode k={k}")
            if k < 1:
                raise MalformedInput("bounded mode needs k >= 1 (header or --mode bounded:k)")
        if name in ("static", "simple"):
            H = Hypergraph(header.n, header.r, frozenset(materialize(updates)))
            fn = static_sparsify if name == "static" else simple_sparsify
            S = fn(H, args.epsilon, seed)
            manifest = (f"mode={name}\nseed={seed}\nn={header.n}\nr={header.r}\n"
                        f"eps={args.epsilon}\nprofile={args.profile}\n")
            return S, manifest
        engine = make_engine(name, header.n, header.r, args.epsilon, seed, config, k or 0)
        for u in updates:
            engine.update(u)
    S = engine.recover()
    return S, engine.manifest()


def cmd_sparsify(args) -> int:
    config = EngineConfig(profile=args.profile).with_overrides(_parse_sets(args.set))
    seed = args.seed
    attempts = 1 + max(0, args.retries)
    if attempts > 1 and args.input in (None, "-"):
        raise ValueError("--retries needs a file input; a pipe can only be read once")
    for attempt in range(attempts):
        try:
            S, manifest = _sparsify_once(args, config, seed + attempt)
            break
        except RecoveryFailure as exc:
            print(f"recovery failure (seed {seed + attempt}): {exc}", file=sys.stderr)
            if attempt + 1 == attempts:
                return EXIT_RECOVERY
    manifest += f"attempt={attempt}\nedges_out={len(S)}\n"
    with _open(args.output, "w") as fh:
        write_weighted(fh, S)
    report = args.report or (args.output + ".manifest" if args.output not in (None, "-") else None)
    if report:
        with open(report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(manifest)
    else:
        sys.stderr.write(manifest)
    return EXIT_OK


def _load_final(path) -> Hypergraph:
    with _open(path) as fh:
        header, updates = read_stream(fh)
        edges = materialize(updates)
    return Hypergraph(header.n, header.r, frozenset(edges))


def cmd_verify(args) -> int:
    H = _load_final(args.original)
    with _open(args.sparsifier) as fh:
        S = read_weighted(fh)
    if S.n != H.n:
        raise MalformedInput(f"sparsifier has n={S.n}, stream has n={H.n}")
    S = WeightedHypergraph(H.n, H.r, S.weights) if S.r <= H.r else S
    report = verify_sparsifier(H, S, args.epsilon, max_n=args.max_n)
    print(report)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _fmt(x):
    return "inf" if x == float("inf") else str(x)


def cmd_oracle(args) -> int:
    H = _load_final(args.input)
    if args.what == "kcut":
        res = min_normalized_kcut(H, args.max_n)
        print(f"Phi = {res.value}")
        print(f"k = {res.k}")
        print("partition = " + " | ".join(" ".join(map(str, b)) for b in res.partition.blocks()))
        return EXIT_OK
    lams = compute_strengths(H, args.max_n)
    if args.what == "strengths":
        for e in sorted(lams):
            print(f"{_fmt(lams[e])}\t" + " ".join(map(str, e)))
        return EXIT_OK
    total = reciprocal_strength_sum(lams)
    expect = H.n - num_components(H)
    print(f"sum 1/lambda = {total}; n - components = {expect}")
    return EXIT_OK if total == expect else EXIT_VERIFY


def cmd_gen(args) -> int:
    if args.kind == "uniform":
        header, ups = generators.uniform(args.n, args.m, args.r, args.seed)
    elif args.kind == "planted":
        header, ups, _ = generators.planted(args.n, args.blocks, args.m, args.cross, args.r,
                                            args.seed)
    else:
        header, ups = generators.deletion_heavy(args.n, args.m, args.k, args.r, args.seed)
    with _open(args.output, "w") as fh:
        write_stream(fh, header, ups)
    return EXIT_OK


BENCH_FIELDS = ["mode", "k", "n", "r", "m", "seed", "nonempty_samplers", "strength_samplers",
                "conn_samplers", "bytes", "peak_nonempty_samplers", "live_components"]


def bench_rows(n, r, m, ks, seed, modes=("bounded",), profile="desk", overrides=None,
               eps=0.5):
    """One space row per (mode, k) on the same insertion stream."""
    config = EngineConfig(profile=profile).with_overrides(overrides or {})
    _, ups = generators.uniform(n, m, r, seed)
    rows = []
    for mode in modes:
        for k in (ks if mode == "bounded" else [0]):
            engine = make_engine(mode, n, r, eps, seed, config, k)
            engine.feed(ups)
            rep = engine.space_report()
            conn = sum(b.live_samplers for b in getattr(engine, "conn", []))
            rows.append({
                "mode": mode, "k": k, "n": n, "r": r, "m": m, "seed": seed,
                "nonempty_samplers": rep.nonempty_samplers,
                "strength_samplers": rep.nonempty_samplers - conn, "conn_samplers": conn,
                "bytes": rep.bytes, "peak_nonempty_samplers": rep.peak_nonempty_samplers,
                "live_components": rep.live_components})
    return rows


def cmd_bench_space(args) -> int:
    ks = [int(x) for x in args.ks.split(",")]
    modes = args.modes.split(",")
    rows = bench_rows(args.n, args.r, args.m, ks, args.seed, modes, args.profile,
                      _parse_sets(args.set), args.epsilon)
    with _open(args.output, "w") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypersparse", description="Streaming hypergraph cut sparsification.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sparsify", help="stream a .hgs file through an engine")
    s.add_argument("--mode", default="insertion",
                   help="static | simple | insertion | bounded[:k] | dynamic")
    s.add_argument("--epsilon", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--profile", choices=("paper", "desk"), default="desk")
    s.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a constant (C, kappa, c_delta, c_T, c_s, c_D, M, L_max, ...)")
    s.add_argument("--input", default="-")
    s.add_argument("--output", default="-")
    s.add_argument("--report", help="manifest path (default: OUTPUT.manifest, or stderr)")
    s.add_argument("--retries", type=int, default=0,
                   help="on recovery failure re-run from the file with seed+1, seed+2, ...")
    s.add_argument("--labels", action="store_true",
                   help="treat vertex tokens as opaque labels, numbered by first appearance")
    s.set_defaults(func=cmd_sparsify)

    v = sub.add_parser("verify", help="check a sparsifier against the final hypergraph")
    v.add_argument("original")
    v.add_argument("sparsifier")
    v.add_argument("--epsilon", type=float, default=0.5)
    v.add_argument("--max-n", type=int, default=16)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force strengths, k-cut or the sum identity")
    o.add_argument("what", choices=("strengths", "kcut", "sum-check"))
    o.add_argument("--input", default="-")
    o.add_argument("--max-n", type=int, default=10)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", help="write a synthetic .hgs stream")
    g.add_argument("kind", choices=("uniform", "planted", "deletion-heavy"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True, help="edges (per block for planted)")
    g.add_argument("--r", type=int, default=3)
    g.add_argument("--k", type=int, default=0, help="deletions (deletion-heavy)")
    g.add_argument("--blocks", type=int, default=2)
    g.add_argument("--cross", type=int, default=4, help="crossing edges (planted)")
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--output", default="-")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench-space", help="space report CSV over a matrix of k values")
    b.add_argument("--n", type=int, default=64)
    b.add_argument("--r", type=int, default=3)
    b.add_argument("--m", type=int, default=1024)
    b.add_argument("--ks", default="1,16,256,4096")
    b.add_argument("--modes", default="bounded", help="comma list of bounded,insertion,dynamic")
    b.add_argument("--epsilon", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=_default_seed())
    b.add_argument("--profile", choices=("paper", "desk"), default="desk")
    b.add_argument("--set", action="append", metavar="KEY=VALUE")
    b.add_argument("--output", default="-")
    b.set_defaults(func=cmd_bench_space)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RecoveryFailure as exc:
        print(f"recovery failure: {exc}", file=sys.stderr)
        return EXIT_RECOVERY
    except DeletionBudgetExceeded as exc:
        print(f"deletion budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MalformedInput, StreamTooLong) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NotASubgraph as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (TooLarge, NoCut, HypersparseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
