"""Command-line driver: ``dynkclust run|value|ufl|oracle``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Sequence

from .engine import DynamicClustering, ValueTracker
from .errors import DynKClustError, InvariantViolation, ParseError, TooLarge
from .facility import FracLMP
from .hierarchy import HierarchyConfig
from .oracles import UFL_CAP, brute_opt_clustering, brute_opt_ufl
from .stream import Stream, parse_stream

log = logging.getLogger("dynkclust")

COLUMNS = ["update_idx", "op", "n_live", "improper_cost", "proper_cost",
           "recourse_improper", "recourse_proper", "cumulative_recourse",
           "value_estimate", "elapsed_us"]

EXIT_ERROR = 1
EXIT_INVARIANT = 2


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class Checkpoint:
    update_idx: int
    n_live: int
    cost: float
    opt: float
    ratio: float
    lower: float
    upper: float

    @property
    def passed(self) -> bool:
        return self.lower - 1e-9 <= self.ratio <= self.upper + 1e-9


def _ratio(cost: float, opt: float) -> float:
    if opt == 0:
        return 1.0 if cost == 0 else math.inf
    return cost / opt


class MetricsWriter:
    def __init__(self, path: str | None) -> None:
        self._fh = open(path, "w", newline="", encoding="utf-8") if path else None
        self._csv = csv.writer(self._fh, lineterminator="\n") if self._fh else None
        self._started = False

    def write(self, row: dict) -> None:
        if self._csv:
            # the header is written with the first row, so an empty stream leaves an empty file
            if not self._started:
                self._csv.writerow(COLUMNS)
                self._started = True
            self._csv.writerow([_fmt(row.get(c)) for c in COLUMNS])
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()


def run_stream(stream: Stream, config: HierarchyConfig, metrics_out: str | None = None,
               strict: bool = False, metric: str = "euclidean", timing: bool = False,
               oracle_every: int = 0) -> tuple[DynamicClustering, list[Checkpoint]]:
    space = stream.new_space(metric)
    engine = DynamicClustering(space, config, strict)
    writer = MetricsWriter(metrics_out)
    bound = config.approximation_bound()
    checks: list[Checkpoint] = []
    cumulative = 0
    try:
        for idx, ev in enumerate(stream.events, 1):
            t0 = time.perf_counter_ns()
            step = engine.apply(ev)
            elapsed = (time.perf_counter_ns() - t0) // 1000 if timing else 0
            cumulative += step.recourse_proper
            writer.write({
                "update_idx": idx, "op": ev.op, "n_live": step.n_live,
                "improper_cost": engine.improper_cost(), "proper_cost": engine.proper_cost(),
                "recourse_improper": step.recourse_improper,
                "recourse_proper": step.recourse_proper,
                "cumulative_recourse": cumulative, "elapsed_us": elapsed,
            })
            if oracle_every and idx % oracle_every == 0 and len(space):
                opt = brute_opt_clustering(space, config.k, config.p)[1]
                cost = engine.improper_cost()
                checks.append(Checkpoint(idx, len(space), cost, opt, _ratio(cost, opt), 0.0, bound))
    finally:
        writer.close()
    return engine, checks


def value_stream(stream: Stream, k: int, epsilon: float, metrics_out: str | None = None,
                 metric: str = "euclidean", timing: bool = False,
                 oracle_every: int = 0) -> tuple[float, list[Checkpoint]]:
    space = stream.new_space(metric)
    tracker = ValueTracker(space, k, epsilon)
    est = 0.0
    writer = MetricsWriter(metrics_out)
    checks: list[Checkpoint] = []
    try:
        for idx, ev in enumerate(stream.events, 1):
            t0 = time.perf_counter_ns()
            est = tracker.apply(ev)
            elapsed = (time.perf_counter_ns() - t0) // 1000 if timing else 0
            writer.write({"update_idx": idx, "op": ev.op, "n_live": len(space),
                          "value_estimate": est, "elapsed_us": elapsed})
            if oracle_every and idx % oracle_every == 0 and len(space):
                opt = brute_opt_clustering(space, k, 1)[1]
                checks.append(Checkpoint(idx, len(space), est, opt, _ratio(est, opt),
                                         1.0, 12 * (1 + epsilon)))
    finally:
        writer.close()
    return est, checks


def compare_with_oracle(stream: Stream, config: HierarchyConfig, every: int = 1,
                        mode: str = "run", epsilon: float = 0.1,
                        metric: str = "euclidean") -> list[Checkpoint]:
    """Cost-to-optimum ratios at every ``every``-th update, with their bounds."""
    if mode == "value":
        return value_stream(stream, config.k, epsilon, metric=metric, oracle_every=every)[1]
    return run_stream(stream, config, metric=metric, oracle_every=every)[1]


def _print_checks(checks: list[Checkpoint], out) -> bool:
    ok = True
    for c in checks:
        ok &= c.passed
        print(f"checkpoint {c.update_idx}: n={c.n_live} cost={c.cost:.6g} opt={c.opt:.6g} "
              f"ratio={c.ratio:.4g} bound=[{c.lower:g}, {c.upper:.4g}] "
              f"{'ok' if c.passed else 'FAIL'}", file=out)
    return ok


def _cmd_run(args) -> int:
    stream = parse_stream(args.stream)
    config = HierarchyConfig(k=args.k, epsilon=args.epsilon, p=args.p, ls_epsilon=args.ls_epsilon,
                             c=args.c, seed=args.seed, max_iters=args.max_iters)
    if abs(config.effective_epsilon - args.epsilon) > 1e-12:
        log.info("epsilon %g snapped to 1/%d", args.epsilon, config.levels)
    engine, checks = run_stream(stream, config, args.metrics_out, args.strict, args.metric,
                                args.timing, args.oracle_every)
    if engine.violations:
        log.warning("%d invariant violations", len(engine.violations))
    print(f"final proper_cost={engine.proper_cost()!r} improper_cost={engine.improper_cost()!r} "
          f"centers={sorted(engine.projection.proper_solution())}")
    if checks and not _print_checks(checks, sys.stdout):
        return EXIT_ERROR
    return 0


def _cmd_value(args) -> int:
    stream = parse_stream(args.stream)
    est, checks = value_stream(stream, args.k, args.epsilon, args.metrics_out, args.metric,
                               args.timing, args.oracle_every)
    print(f"final value_estimate={est!r}")
    if checks and not _print_checks(checks, sys.stdout):
        return EXIT_ERROR
    return 0


def _final_space(stream: Stream, metric: str):
    space = stream.new_space(metric)
    for ev in stream.events:
        if ev.op == "insert":
            space.insert(ev.id, ev.weight, ev.coords or None)
        else:
            space.delete(ev.id)
    space.collect()
    return space


def _cmd_ufl(args) -> int:
    space = _final_space(parse_stream(args.stream), args.metric)
    sol = FracLMP(space).solution(args.lam)
    print(f"lambda={args.lam!r} open_mass={sol.open_mass!r} connection_cost={sol.connection_cost!r} "
          f"lmp_cost={4 * args.lam * sol.open_mass + sol.connection_cost!r}")
    for i, y in sol.y.items():
        print(f"y {i} {y!r}")
    if len(space) <= UFL_CAP:
        centers, cost = brute_opt_ufl(space, args.lam)
        print(f"integral_opt={cost!r} centers={sorted(centers)}")
    return 0


def _cmd_oracle(args) -> int:
    stream = parse_stream(args.stream)
    space = stream.new_space(args.metric)
    print("update_idx,n_live,opt_cost,centers")
    for idx, ev in enumerate(stream.events, 1):
        if ev.op == "insert":
            space.insert(ev.id, ev.weight, ev.coords or None)
        else:
            space.delete(ev.id)
        space.collect()
        if len(space):
            centers, cost = brute_opt_clustering(space, args.k, args.p)
            print(f"{idx},{len(space)},{cost!r},{' '.join(map(str, sorted(centers)))}")
        else:
            print(f"{idx},0,0.0,")
    return 0


def _p_value(s: str) -> float:
    if s.lower() in ("inf", "infinity"):
        return math.inf
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("p must be a positive integer or 'inf'")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynkclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, metrics=True):
        p.add_argument("--stream", required=True, help="update stream file")
        p.add_argument("--metric", choices=["euclidean", "l1"], default="euclidean",
                       help="distance for coordinate streams")
        if metrics:
            p.add_argument("--metrics-out", help="CSV file for per-update metrics")
            p.add_argument("--timing", action="store_true",
                           help="record elapsed_us (otherwise 0, keeping output reproducible)")
            p.add_argument("--oracle-every", type=int, default=0, metavar="N",
                           help="compare against brute force every N updates")

    run = sub.add_parser("run", help="maintain a dynamic clustering")
    common(run)
    run.add_argument("--k", type=int, required=True)
    run.add_argument("--epsilon", type=float, default=0.5, help="hierarchy parameter, snapped to 1/l")
    run.add_argument("--p", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--ls-epsilon", type=float, default=0.2, help="local-search accuracy")
    run.add_argument("--c", type=float, default=1.0, help="local-search confidence constant")
    run.add_argument("--max-iters", type=int, default=None, help="override the local-search budget")
    run.add_argument("--strict", action="store_true", help="exit 2 on any invariant violation")
    run.set_defaults(func=_cmd_run)

    value = sub.add_parser("value", help="track the fractional k-median value estimate")
    common(value)
    value.add_argument("--k", type=int, required=True)
    value.add_argument("--epsilon", type=float, default=0.1)
    value.set_defaults(func=_cmd_value)

    ufl = sub.add_parser("ufl", help="fractional facility location on the final point set")
    common(ufl, metrics=False)
    ufl.add_argument("--lambda", dest="lam", type=float, required=True)
    ufl.set_defaults(func=_cmd_ufl)

    oracle = sub.add_parser("oracle", help="brute-force optimum after every update")
    common(oracle, metrics=False)
    oracle.add_argument("--k", type=int, required=True)
    oracle.add_argument("--p", type=_p_value, default=1)
    oracle.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("DYNKCLUST_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ParseError as exc:
        print(f"{args.stream}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except TooLarge as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DynKClustError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
