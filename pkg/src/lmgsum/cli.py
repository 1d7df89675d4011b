"""Command-line front end: summarize, eval-labels, bench, verify.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O or
input-format error.  The seed falls back to the LMGSUM_SEED environment
variable, then to 0.  All outputs are deterministic given inputs, flags,
and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from .graph import GraphFormatError, LabeledMultiGraph, load_graph
from .summarize import RunConfig, run, shuffled_label_eval
from .summary import (
    compute_corrections,
    corrections_from_dict,
    corrections_to_dict,
    export_dot,
    reconstruct,
    summary_from_dict,
    summary_to_dict,
)
from .synth import kout_graph

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _add_common(p: argparse.ArgumentParser, need_input: bool = True) -> None:
    if need_input:
        p.add_argument("-i", "--input", required=True, help="edge list file (TSV)")
        p.add_argument("-l", "--labels", help="node label file (TSV)")
        p.add_argument(
            "--undirected",
            action="store_true",
            help="materialize each listed edge in both directions",
        )
    p.add_argument("-r", type=int, default=8, help="minhash rows per band")
    p.add_argument("-b", "--bands", type=int, default=10, help="number of bands")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $LMGSUM_SEED or 0)")
    p.add_argument("--threads", type=int, default=1, help="worker cap for parallel parts")
    p.add_argument("--cluster-cap", type=int, default=5000, help="LSH cluster size cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmgsum",
        description="Lossless MDL summarization of labeled directed multi-graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize a graph and export the result")
    _add_common(p)
    p.add_argument(
        "--checkpoints",
        type=_parse_int_list,
        default=(),
        help="band counts at which to snapshot the summary, e.g. 2,5,10",
    )
    p.add_argument("--dot", metavar="DIR", help="write DOT renderings into DIR")
    p.add_argument("--json", metavar="PATH", help="write the full report JSON to PATH")

    p = sub.add_parser("eval-labels", help="normalized gain of a labeling vs shuffles")
    _add_common(p)
    p.add_argument("--shuffles", type=int, default=20, help="number of label permutations")
    p.add_argument("--json", metavar="PATH", help="write the evaluation JSON to PATH")

    p = sub.add_parser("bench", help="timing benchmark; CSV of |V|,|E|,seconds,ratio")
    _add_common(p, need_input=False)
    p.add_argument("-i", "--input", help="edge list to subsample (fractions mode)")
    p.add_argument("-l", "--labels", help="node label file for fractions mode")
    p.add_argument("--undirected", action="store_true")
    p.add_argument(
        "--sizes",
        type=_parse_int_list,
        default=(),
        help="k-out generator node counts, e.g. 1000,3000,10000",
    )
    p.add_argument("--k", type=int, default=10, help="out-edges per new node")
    p.add_argument(
        "--fractions",
        type=_parse_float_list,
        default=(),
        help="edge fractions of the input graph, e.g. 0.25,0.5,1.0",
    )
    p.add_argument("--json", metavar="PATH", help="also write rows as JSON to PATH")

    p = sub.add_parser("verify", help="reconstruct from a report and compare")
    _add_common(p)
    p.add_argument(
        "--json",
        metavar="PATH",
        required=True,
        help="report JSON produced by `summarize`",
    )
    return parser


def _seed_of(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LMGSUM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LMGSUM_SEED is not an integer: {env!r}")
    return 0


class UsageError(Exception):
    pass


def _config(args, checkpoints=(), shuffles: int | None = None) -> RunConfig:
    try:
        return RunConfig(
            r=args.r,
            b_max=args.bands,
            seed=_seed_of(args),
            cluster_cap=args.cluster_cap,
            undirected=getattr(args, "undirected", False),
            checkpoints=tuple(checkpoints),
            threads=args.threads,
            shuffles=shuffles if shuffles is not None else 20,
        )
    except ValueError as e:
        raise UsageError(str(e))


def _load(args) -> LabeledMultiGraph:
    return load_graph(args.input, args.labels, undirected=args.undirected)


def cmd_summarize(args) -> int:
    g = _load(args)
    config = _config(args, checkpoints=args.checkpoints)
    summary, report = run(g, config, keep_checkpoint_summaries=bool(args.dot))
    corrections = compute_corrections(g, summary)
    payload = {
        "config": {
            "r": config.r,
            "b_max": config.b_max,
            "seed": config.seed,
            "cluster_cap": config.cluster_cap,
            "undirected": config.undirected,
            "checkpoints": list(config.checkpoints),
        },
        "report": report.to_dict(),
        "summary": summary_to_dict(g, summary),
        "corrections": corrections_to_dict(summary, corrections),
    }
    text = json.dumps(payload, indent=2)
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)
        for cp in report.checkpoints:
            if cp.summary is not None:
                path = os.path.join(args.dot, f"summary_b{cp.band}.dot")
                with open(path, "w") as f:
                    f.write(export_dot(cp.summary, f"summary_b{cp.band}"))
        with open(os.path.join(args.dot, "summary_final.dot"), "w") as f:
            f.write(export_dot(summary, "summary_final"))
    if args.json:
        with open(args.json, "w") as f:
            f.write(text + "\n")
        print(
            f"bits_before={report.bits_before:.3f} bits_after={report.bits_after:.3f} "
            f"ratio={report.compression_ratio:.4f} super_nodes={report.super_node_count} "
            f"super_edges={report.super_edge_count} -> {args.json}"
        )
    else:
        print(text)
    return EXIT_OK


def cmd_eval_labels(args) -> int:
    if not args.labels:
        raise UsageError("eval-labels requires a label file (-l/--labels)")
    g = _load(args)
    if args.shuffles < 1:
        raise UsageError("--shuffles must be >= 1")
    config = _config(args, shuffles=args.shuffles)
    result = shuffled_label_eval(g, config)
    if args.json:
        with open(args.json, "w") as f:
            json.dump(result, f, indent=2)
            f.write("\n")
    print(f"actual_ratio={result['actual']:.4f}")
    if result.get("normalized_gain") is None:
        print(f"warning: {result['warning']}")
    else:
        print(f"shuffled_mean={result['shuffled_mean']:.4f} (n={len(result['shuffled'])})")
        print(f"normalized_gain={result['normalized_gain'] * 100:.1f}%")
    return EXIT_OK


def _bench_rows(args) -> list[dict]:
    rows = []
    seed = _seed_of(args)
    if args.sizes and args.fractions:
        raise UsageError("bench takes either --sizes or --fractions, not both")
    if args.sizes:
        graphs = [(f"kout_{n}", kout_graph(seed, n, args.k)) for n in args.sizes]
    elif args.fractions:
        if not args.input:
            raise UsageError("--fractions needs an input graph (-i)")
        base = _load(args)
        all_edges = list(base.edges())
        rng = np.random.default_rng(seed)
        order = rng.permutation(len(all_edges))
        graphs = []
        for frac in args.fractions:
            if not (0 < frac <= 1):
                raise UsageError(f"fraction out of range: {frac}")
            take = max(1, int(round(frac * len(all_edges))))
            sub = {
                (all_edges[i][0], all_edges[i][1]): all_edges[i][2]
                for i in order[:take]
            }
            graphs.append(
                (
                    f"frac_{frac:g}",
                    LabeledMultiGraph(
                        base.n,
                        sub,
                        list(base.labels),
                        label_names=list(base.label_names),
                        node_names=list(base.node_names),
                    ),
                )
            )
    else:
        raise UsageError("bench needs --sizes or --fractions")
    config = _config(args)
    for name, g in graphs:
        t0 = time.perf_counter()
        _, report = run(g, config)
        seconds = time.perf_counter() - t0
        rows.append(
            {
                "name": name,
                "nodes": g.n,
                "edges": g.edge_count,
                "seconds": seconds,
                "ratio": report.compression_ratio,
            }
        )
    return rows


def cmd_bench(args) -> int:
    rows = _bench_rows(args)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["nodes", "edges", "seconds", "ratio"])
    for row in rows:
        writer.writerow(
            [row["nodes"], row["edges"], f"{row['seconds']:.4f}", f"{row['ratio']:.4f}"]
        )
    sys.stdout.write(out.getvalue())
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)
            f.write("\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load(args)
    try:
        with open(args.json) as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"{args.json}: invalid JSON: {e}")
    if "summary" not in payload:
        raise UsageError(f"{args.json}: no 'summary' section")
    if "corrections" not in payload:
        raise UsageError(f"{args.json}: no 'corrections' section — cannot reconstruct")
    summary = summary_from_dict(payload["summary"])
    corrections = corrections_from_dict(summary, payload["corrections"])
    recon = reconstruct(summary, corrections)
    original = g.canonical_dump()
    rebuilt = recon.canonical_dump()
    if original == rebuilt:
        print(f"OK: reconstruction matches {args.input} exactly")
        return EXIT_OK
    for i, (a, b) in enumerate(zip(original.splitlines(), rebuilt.splitlines())):
        if a != b:
            print(f"MISMATCH at line {i + 1}: original={a!r} reconstructed={b!r}")
            break
    else:
        print(
            f"MISMATCH: line counts differ "
            f"({len(original.splitlines())} vs {len(rebuilt.splitlines())})"
        )
    return EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "summarize": cmd_summarize,
        "eval-labels": cmd_eval_labels,
        "bench": cmd_bench,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except GraphFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
