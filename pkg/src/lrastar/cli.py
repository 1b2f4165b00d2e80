"""``lrastar`` command line: sweep the lookahead on seeded worlds."""
from __future__ import annotations

import argparse
import math
import sys

from . import BACKEND
from .bench import ExperimentConfig, argmin_alpha, emit_f_trace, format_alpha, sweep_alpha
from .errors import LRAStarError
from .search import parse_alpha


def parse_seeds(text: str) -> tuple:
    """``"0-9"``, ``"1,4,7"`` or a mix such as ``"0-3,10"``."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1) if not part.startswith("-") else ("-" + part[1:].split("-", 1)[0], part[1:].split("-", 1)[1])
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return tuple(seeds)


def parse_alphas(text: str) -> tuple:
    try:
        return tuple(parse_alpha(a) for a in text.split(",") if a.strip())
    except (ValueError, LRAStarError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lrastar",
        description="Sweep the lazy lookahead of LRA* over seeded roadmaps and write CSV.",
    )
    p.add_argument("--env", choices=("clutter2d", "maze", "file"), default="clutter2d")
    p.add_argument("--graph", help="graph file for --env file")
    p.add_argument("--source", type=int, help="source vertex (default 0)")
    p.add_argument("--target", type=int, help="target vertex (default 1; n-1 for --env file)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n", type=int, default=500, help="number of Halton samples")
    p.add_argument("--radius", type=float, help="connection radius (default from n and dim)")
    p.add_argument("--coverage", type=float, default=0.7, help="clutter coverage fraction")
    p.add_argument("--maze-depth", type=int, default=4)
    p.add_argument("--seeds", type=parse_seeds, default=tuple(range(10)), help='e.g. "0-9" or "1,5,9"')
    p.add_argument("--alpha", type=parse_alphas, default=parse_alphas("1,2,4,8,16,inf"),
                   help='comma list, "inf" allowed')
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--heuristic", default="euclid", help="zero | euclid | scaled:<f>")
    p.add_argument("--no-lazy-extend", action="store_true",
                   help="extend the whole band every iteration")
    p.add_argument("--eval-delay-us", type=float, default=0.0,
                   help="busy-wait this long per edge evaluation")
    p.add_argument("--engine", choices=("auto", "python", "compiled"), default="auto")
    p.add_argument("--check-invariants", action="store_true",
                   help="full consistency sweep every iteration (python engine)")
    p.add_argument("--out", default="lrastar_out", help="output directory")
    p.add_argument("--replay-log", action="store_true", help="write one event log per trial")
    p.add_argument("--f-trace", action="store_true", help="write popped f-values per trial")
    p.add_argument("--quiet", action="store_true")
    return p


def config_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        env=args.env,
        dimension=args.dim,
        n=args.n,
        radius=args.radius,
        coverage=args.coverage,
        maze_depth=args.maze_depth,
        graph_file=args.graph,
        source=args.source,
        target=args.target,
        seeds=args.seeds,
        alphas=args.alpha,
        beta=args.beta,
        heuristic=args.heuristic,
        lazy_band_extension=not args.no_lazy_extend,
        eval_delay_us=args.eval_delay_us,
        check_invariants=args.check_invariants,
        engine=args.engine,
        out=args.out,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if len(config.alphas) == 1:
            # single lookahead: only the f-trace makes sense
            a = config.alphas[0]
            import os
            os.makedirs(config.out, exist_ok=True)
            for seed in config.seeds:
                path = os.path.join(config.out, f"ftrace_seed{seed}_alpha{format_alpha(a)}.csv")
                emit_f_trace(config, seed, a, path)
                if not args.quiet:
                    print(f"wrote {path}")
            return 0

        def progress(row):
            if not args.quiet:
                print(f"seed {row['seed']:>4} alpha {row['alpha']:>4} evals {row['evals']:>6} "
                      f"rewires {row['rewires']:>8} cost {row['cost']:.6g} "
                      f"total {row['total_time_us'] / 1e3:9.1f} ms", flush=True)

        result = sweep_alpha(config, replay_log=args.replay_log, f_trace=args.f_trace,
                             progress=progress)
    except LRAStarError as exc:
        print(f"lrastar: error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(f"backend {BACKEND}; fastest mean total time at alpha="
              f"{argmin_alpha(result['aggregate'])}; wrote {config.out}/sweep.csv "
              f"and {config.out}/plot_data.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
