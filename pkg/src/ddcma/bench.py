"""Benchmark harness: trial grids, CSV output and aggregate statistics.

Command line::

    ddcma-bench --problem ellipsoid --dim 40 --variant dd,plain --trials 20 \\
        --seed-base 1 --out results.csv
"""
import argparse
import csv
import io
import os
import statistics
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConfigurationError, EvaluationError
from .params import default_params
from .problems import NAMES, default_budget, format_token, make_instance
from .strategy import (DDCMA, VARIANTS, OptimizerConfig, Status, TerminationCriteria,
                       canonical_variant)
from .update import ACTIVE_MODES

CSV_COLUMNS = ("problem", "dim", "rotated", "variant", "active", "lambda", "seed",
               "iterations", "evaluations", "success", "best_f", "status")
LOG_COLUMNS = ("t", "evals", "best_f", "sigma", "beta", "cond_C", "min_D", "max_D")


@dataclass(frozen=True)
class TrialConfig:
    problem: str
    dim: int
    rotated: bool = False
    variant: str = "dd"
    active: str = "method1"
    lam: Optional[int] = None
    seed: int = 1
    budget: Optional[int] = None
    target: float = 1e-8
    det_preserving: bool = False
    log_every: int = 0

    @property
    def token(self):
        return format_token(self.problem, self.dim, self.rotated, self.seed)

    def optimizer_seed(self):
        """Seed of the optimizer's normal deviates.

        Depends on the instance seed and on the algorithm settings, so that
        variants see the same problem instance but different samples.
        """
        key = "%s|%s|%s|%d" % (canonical_variant(self.variant), self.active,
                               self.lam, self.det_preserving)
        ss = np.random.SeedSequence([int(self.seed) & 0xFFFFFFFF, zlib.crc32(key.encode())])
        return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class TrialResult:
    problem: str
    dim: int
    rotated: bool
    variant: str
    active: str
    lam: int
    seed: int
    iterations: int
    evaluations: int
    success: bool
    best_f: float
    status: str
    log: List[str] = field(default_factory=list, repr=False)

    @property
    def token(self):
        return format_token(self.problem, self.dim, self.rotated, self.seed)

    def group(self):
        return (self.problem, self.dim, self.rotated, self.variant, self.active, self.lam)

    def row(self):
        return [self.problem, str(self.dim), str(int(self.rotated)), self.variant, self.active,
                str(self.lam), str(self.seed), str(self.iterations), str(self.evaluations),
                str(int(self.success)), repr(float(self.best_f)), self.status]


@dataclass
class RunSummary:
    problem: str
    dim: int
    rotated: bool
    variant: str
    active: str
    lam: int
    trials: int
    successes: int
    median_evals_success: Optional[float]
    success_rate: float
    sp1: Optional[float]


def start_trial(cfg: TrialConfig):
    """Create the problem instance and a fresh optimizer for ``cfg``."""
    problem = make_instance(cfg.problem, cfg.dim, cfg.rotated, cfg.seed)
    budget = default_budget(cfg.problem, cfg.dim) if cfg.budget is None else cfg.budget
    config = OptimizerConfig(
        variant=cfg.variant, active_mode=cfg.active, det_preserving=cfg.det_preserving,
        params=default_params(cfg.dim, cfg.lam),
        termination=TerminationCriteria(target_f=cfg.target, max_evals=budget))
    es = DDCMA(problem.m0, problem.sigma0, config, seed=cfg.optimizer_seed())
    return es, problem


def drive(es, problem, cfg: TrialConfig, until=None, log=None):
    """Iterate ask/tell until termination or until iteration ``until``.

    Returns the termination status (``Status.RUNNING`` if stopped by ``until``).
    """
    status = es.should_stop()
    while status == Status.RUNNING:
        if until is not None and es.t >= until:
            break
        X = es.ask()
        try:
            es.tell(problem.batch(X))
        except EvaluationError as exc:
            es.failure = str(exc)
        if log is not None and cfg.log_every and es.t % cfg.log_every == 0:
            log.append(es.log_line())
        status = es.should_stop()
    return status


def finish_trial(es, cfg: TrialConfig, status, log=None) -> TrialResult:
    return TrialResult(
        problem=cfg.problem, dim=cfg.dim, rotated=bool(cfg.rotated),
        variant=canonical_variant(cfg.variant), active=cfg.active, lam=es.lam,
        seed=cfg.seed, iterations=es.t, evaluations=es.evals,
        success=bool(es.best_f <= cfg.target), best_f=es.best_f, status=str(status),
        log=log or [])


def run_trial(cfg: TrialConfig) -> TrialResult:
    """Run one trial to termination; numerical failures end up as status ``degenerate``."""
    es, problem = start_trial(cfg)
    log = [] if cfg.log_every else None
    status = drive(es, problem, cfg, log=log)
    return finish_trial(es, cfg, status, log)


def run_trials(configs, jobs=1):
    """Run trials, optionally in worker processes; result order follows ``configs``."""
    configs = list(configs)
    if jobs is None or jobs <= 1 or len(configs) <= 1:
        return [run_trial(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, configs, chunksize=1))


def _median(values):
    return float(statistics.median(values)) if values else None


def summarize(results) -> List[RunSummary]:
    groups = {}
    for r in results:
        groups.setdefault(r.group(), []).append(r)
    out = []
    for key in sorted(groups):
        rs = groups[key]
        ok = [r.evaluations for r in rs if r.success]
        rate = len(ok) / len(rs)
        sp1 = (sum(ok) / len(ok)) / rate if ok else None
        out.append(RunSummary(*key, trials=len(rs), successes=len(ok),
                              median_evals_success=_median(ok), success_rate=rate, sp1=sp1))
    return out


def median_of(results, attr="evaluations", successful_only=True):
    values = [getattr(r, attr) for r in results if r.success or not successful_only]
    return _median(values)


def write_csv(results, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in results:
        writer.writerow(r.row())


def read_csv(stream):
    """Parse CSV written by :func:`write_csv` back into ``TrialResult`` objects."""
    out = []
    for row in csv.DictReader(stream):
        out.append(TrialResult(
            problem=row["problem"], dim=int(row["dim"]), rotated=row["rotated"] == "1",
            variant=row["variant"], active=row["active"], lam=int(row["lambda"]),
            seed=int(row["seed"]), iterations=int(row["iterations"]),
            evaluations=int(row["evaluations"]), success=row["success"] == "1",
            best_f=float(row["best_f"]), status=row["status"]))
    return out


def csv_text(results):
    buf = io.StringIO()
    write_csv(results, buf)
    return buf.getvalue()


def _fmt(v):
    return "" if v is None else repr(v)


def write_summary(summaries, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("problem", "dim", "rotated", "variant", "active", "lambda", "trials",
                     "successes", "median_evals_success", "success_rate", "sp1"))
    for s in summaries:
        writer.writerow((s.problem, s.dim, int(s.rotated), s.variant, s.active, s.lam,
                         s.trials, s.successes, _fmt(s.median_evals_success),
                         repr(s.success_rate), _fmt(s.sp1)))


# -- command line -----------------------------------------------------------

def _choice_list(choices, canon=lambda s: s):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        out = []
        for item in items:
            try:
                item = canon(item)
            except ConfigurationError:
                pass
            if item not in choices:
                raise argparse.ArgumentTypeError(
                    "invalid choice %r (choose from %s)" % (item, ", ".join(choices)))
            out.append(item)
        return out
    return parse


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers, got %r" % text)
    if not values or min(values) < 2:
        raise argparse.ArgumentTypeError("dimensions must be >= 2")
    return values


def _lambda_list(text):
    out = []
    for t in text.split(","):
        t = t.strip()
        if t == "default":
            out.append(None)
            continue
        try:
            v = int(t)
        except ValueError:
            raise argparse.ArgumentTypeError("lambda must be an integer or 'default', got %r" % t)
        if v < 2:
            raise argparse.ArgumentTypeError("lambda must be >= 2")
        out.append(v)
    return out


def _rotated(text):
    table = {"0": [False], "1": [True], "both": [False, True]}
    if text not in table:
        raise argparse.ArgumentTypeError("--rotated takes 0, 1 or both")
    return table[text]


def build_parser():
    p = argparse.ArgumentParser(
        prog="ddcma-bench",
        description="Run CMA-ES variants (plain, sep, dd) on the built-in test functions "
                    "and write one CSV row per trial.")
    p.add_argument("--problem", type=_choice_list(NAMES), required=True,
                   help="comma list of: " + ", ".join(NAMES))
    p.add_argument("--dim", type=_int_list, required=True, help="comma list of dimensions")
    p.add_argument("--rotated", type=_rotated, default=[False], help="0, 1 or both (default 0)")
    p.add_argument("--variant", type=_choice_list(VARIANTS, canonical_variant), default=["dd"],
                   help="comma list of plain, sep, dd (default dd)")
    p.add_argument("--active", type=_choice_list(ACTIVE_MODES), default=["method1"],
                   help="comma list of off, method1, method2 (default method1)")
    p.add_argument("--lambda", dest="lam", type=_lambda_list, default=[None],
                   help="population size(s): integer or 'default'")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed-base", type=int, default=1,
                   help="instance seed of trial 0 (overridden by $DDCMA_SEED)")
    p.add_argument("--budget", type=int, default=None,
                   help="evaluation budget per trial (default 5e4 n, 2e5 n on rastrigin)")
    p.add_argument("--target", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--summary", default=None, help="also write per-group summary CSV here")
    p.add_argument("--log-every", type=int, default=0,
                   help="write a log line every k generations to <out>.log (0 = off)")
    p.add_argument("--jobs", type=int, default=1, help="number of worker processes")
    p.add_argument("--det-preserving", action="store_true",
                   help="keep det(D) fixed in the diagonal update")
    return p


def grid(args):
    seed_base = args.seed_base
    env = os.environ.get("DDCMA_SEED")
    if env is not None and env.strip():
        seed_base = int(env)
    configs = []
    for problem in args.problem:
        for dim in args.dim:
            for rotated in args.rotated:
                for variant in args.variant:
                    for active in args.active:
                        for lam in args.lam:
                            for k in range(args.trials):
                                configs.append(TrialConfig(
                                    problem=problem, dim=dim, rotated=rotated,
                                    variant=variant, active=active, lam=lam,
                                    seed=seed_base + k, budget=args.budget,
                                    target=args.target, det_preserving=args.det_preserving,
                                    log_every=args.log_every))
    return configs


def _sort_key(r):
    return (r.problem, r.dim, r.rotated, VARIANTS.index(r.variant),
            ACTIVE_MODES.index(r.active), r.lam, r.seed)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    if args.trials < 1 or args.jobs < 1 or args.log_every < 0 \
            or (args.budget is not None and args.budget < 0):
        parser.print_usage(sys.stderr)
        print("ddcma-bench: error: --trials and --jobs must be >= 1, "
              "--log-every and --budget >= 0", file=sys.stderr)
        return 2
    try:
        configs = grid(args)
        results = run_trials(configs, args.jobs)
    except (ConfigurationError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print("ddcma-bench: error: %s" % exc, file=sys.stderr)
        return 2
    results.sort(key=_sort_key)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(results, fh)
    else:
        write_csv(results, sys.stdout)
    if args.log_every:
        path = (args.out or "ddcma-bench") + ".log"
        with open(path, "w") as fh:
            for r in results:
                fh.write("# %s variant=%s active=%s lambda=%d\n"
                         % (r.token, r.variant, r.active, r.lam))
                fh.write("\t".join(LOG_COLUMNS) + "\n")
                for line in r.log:
                    fh.write(line + "\n")
    summaries = summarize(results)
    if args.summary:
        with open(args.summary, "w", newline="") as fh:
            write_summary(summaries, fh)
    for s in summaries:
        print("%s d=%d rot=%d %s/%s lambda=%d: %d/%d successes, median evals %s, SP1 %s"
              % (s.problem, s.dim, s.rotated, s.variant, s.active, s.lam, s.successes,
                 s.trials, _fmt(s.median_evals_success), _fmt(s.sp1)), file=sys.stderr)
    return 0
