"""
Command line front door
Location: abw_lab/cli.py

SAVES IT TO:
--out path when given (JSON for abw/karea/stats, CSV for upsilon/montecarlo), stdout otherwise
Run log: ./logs/runs_YYYYMMDD.jsonl (config.LOG_DIR, when ABW_MONITORING is on)

Usage:
    python cli.py gw --n 2 --r 1 --classes "1;1;1" --d 1
    python cli.py abw --n 3 --l 3 --out golden/abw_n3_l3.json
    python cli.py upsilon --classes "0.1,-0.1;0.1,-0.1;0.3,-0.3" --budget 4000
    python cli.py karea --classes "0.1,-0.1;0.3,-0.3" --mesh 64
    python cli.py montecarlo --n 3 --l 3 --samples 10000 --d-max 2 --out mc.csv
    python cli.py stats --out logs/metrics.json

Exit codes: 0 success, 2 validation, 3 numeric convergence, 4 internal consistency.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

sys.path.append(str(Path(__file__).parent))

from config import (
    CONSISTENCY_TOL,
    DEFAULT_BUDGET,
    DEFAULT_EPSILON,
    DEFAULT_MESH,
    DEFAULT_SEED,
    DEFAULT_STARTS,
    ENABLE_MONITORING,
    LOG_DIR,
    MIN_MESH,
    VERBOSE,
)
from grassmannian.quantum import GwQuery, gw_invariant
from grassmannian.schubert import make_index
from groups.karea import karea_duality_check
from groups.unitary import product_class, upsilon_estimate, write_upsilon_report
from inequalities.abw import (
    AlcovePoint,
    check_membership,
    enumerate_inequalities,
    inequalities_to_json,
    random_alcove_point,
    shared_n,
    upsilon_lower_bound,
)
from utils.cache_manager import get_default_cache
from utils.errors import InputValidationError, InternalConsistencyError, exit_code_for
from utils.observability import RunMonitor, track_performance

class RunConfig(BaseModel):
    """Validated parameters of one subcommand run"""

    model_config = ConfigDict(frozen=True)

    subcommand: Literal["gw", "abw", "upsilon", "karea", "montecarlo", "stats"]
    n: Optional[int] = None
    l: Optional[int] = None
    r: Optional[int] = None
    d_max: Optional[int] = None
    seed: int = DEFAULT_SEED
    budget: Optional[int] = None
    mesh: Optional[int] = None
    epsilon: Optional[float] = None
    out: Optional[str] = None
    format: Literal["json", "csv", "text"] = "text"

    @model_validator(mode="after")
    def _ranges(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed {self.seed} is not a 64-bit unsigned integer")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n={self.n} must be positive")
        if self.r is not None and self.n is not None and not 1 <= self.r <= self.n - 1:
            raise ValueError(f"r={self.r} outside 1..{self.n - 1}")
        if self.d_max is not None and self.d_max < 0:
            raise ValueError(f"d_max={self.d_max} is negative")
        if self.budget is not None and self.budget < 1:
            raise ValueError(f"budget={self.budget} must be positive")
        if self.mesh is not None and self.mesh < MIN_MESH:
            raise ValueError(f"mesh={self.mesh} below the minimum {MIN_MESH}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon={self.epsilon} must be positive")
        return self


# =========================
# CLASS SYNTAX
# =========================

def _tokens(text: str) -> List[Tuple[int, str]]:
    """Split on ';' keeping the 1-based column where each token starts"""
    tokens, column = [], 1
    for piece in text.split(";"):
        tokens.append((column, piece))
        column += len(piece) + 1
    return tokens


def parse_subsets(text: str) -> List[List[int]]:
    """'1,2;1,3;2,4' -> [[1, 2], [1, 3], [2, 4]]"""
    subsets = []
    for k, (column, token) in enumerate(_tokens(text), start=1):
        if not token.strip():
            raise InputValidationError(f"class {k} at column {column} is empty")
        entries = []
        offset = column
        for piece in token.split(","):
            try:
                entries.append(int(piece))
            except ValueError:
                raise InputValidationError(
                    f"class {k}: '{piece.strip()}' at column {offset} is not an integer index"
                ) from None
            offset += len(piece) + 1
        subsets.append(entries)
    return subsets


def parse_alcove_points(text: str) -> List[AlcovePoint]:
    """'0.1,-0.1;0.3,-0.3' -> alcove points; coordinates are taken as given"""
    points = []
    for k, (column, token) in enumerate(_tokens(text), start=1):
        try:
            alpha = tuple(float(piece) for piece in token.split(","))
        except ValueError:
            raise InputValidationError(
                f"class {k} at column {column}: '{token.strip()}' is not a list of reals"
            ) from None
        try:
            points.append(AlcovePoint(alpha=alpha))
        except ValueError as e:
            raise InputValidationError(f"class {k} at column {column} is not an alcove point: {e}") from e
    return points


def _emit(text: str, out: Optional[str]):
    if out is None:
        print(text)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text + "\n", encoding="utf-8")
    if VERBOSE:
        print(f" Written: {out}")


# =========================
# SUBCOMMANDS
# =========================

def cmd_gw(n: int, r: int, classes: str, d: int) -> int:
    subsets = parse_subsets(classes)
    for k, subset in enumerate(subsets, start=1):
        if len(subset) != r:
            raise InputValidationError(f"class {k} has {len(subset)} indices, expected r={r}")
    query = GwQuery(classes=tuple(make_index(s, n) for s in subsets), d=d)
    print(gw_invariant(query))
    print(query.audit())
    return 0


def cmd_abw(n: int, l: int, d_max: Optional[int] = None, out: Optional[str] = None) -> int:
    _emit(inequalities_to_json(enumerate_inequalities(n, l, d_max)), out)
    return 0


def cmd_upsilon(classes: str, n: Optional[int] = None, budget: int = DEFAULT_BUDGET,
                seed: int = DEFAULT_SEED, starts: int = DEFAULT_STARTS,
                out: Optional[str] = None) -> int:
    zeta = parse_alcove_points(classes)
    size = shared_n(zeta)
    if n is not None and n != size:
        raise InputValidationError(f"--n {n} but the classes live in SU({size})")
    estimate, _ = upsilon_estimate(zeta, budget=budget, seed=seed, starts=starts)
    bound = upsilon_lower_bound(zeta, enumerate_inequalities(size, len(zeta)))
    gap = estimate - bound

    print(f"estimate: {estimate:.12g}")
    print(f"lower bound: {bound:.12g}")
    print(f"gap: {gap:.12g}")
    if out is not None:
        write_upsilon_report([{
            "seed": seed, "n": size, "l": len(zeta), "classes": classes,
            "estimate": estimate, "lower_bound": bound, "gap": gap,
        }], out)

    if estimate < bound - CONSISTENCY_TOL:
        raise InternalConsistencyError(f"estimate {estimate!r} below the certified bound {bound!r}")
    return 0


def cmd_karea(classes: str, mesh: int = DEFAULT_MESH, epsilon: float = DEFAULT_EPSILON,
              budget: int = 8, seed: int = DEFAULT_SEED, out: Optional[str] = None) -> int:
    zeta = parse_alcove_points(classes)
    if len(zeta) != 2:
        raise InputValidationError(f"the cylinder has two boundary classes, got {len(zeta)}")
    report = karea_duality_check(zeta[0], zeta[1], mesh=mesh, epsilon=epsilon, budget=budget, seed=seed)
    _emit(report.model_dump_json(indent=2), out)
    return 0


def montecarlo_frame(n: int, l: int, samples: int, d_max: Optional[int] = None,
                     seed: int = DEFAULT_SEED) -> pd.DataFrame:
    """
    One row per sampled tuple in Delta_l: l - 1 random classes plus the class
    of the inverse of a random product, with the margin of every inequality.
    """
    if samples < 0:
        raise InputValidationError(f"samples={samples} is negative")
    inequalities = enumerate_inequalities(n, l, d_max)
    margin_columns = [f"margin_{k}" for k in range(len(inequalities))]
    columns = ["sample", "classes", "max_margin", "violations"] + margin_columns

    rows = []
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(samples)):
        rng = np.random.default_rng(child)
        zeta = [random_alcove_point(n, rng) for _ in range(l - 1)]
        zeta.append(product_class(zeta, seed=int(rng.integers(2**63))))
        report = check_membership(zeta, inequalities)
        rows.append([k, ";".join(",".join(f"{a:.15g}" for a in z.alpha) for z in zeta),
                     report.max_margin, len(report.violations)] + report.margins)
    return pd.DataFrame(rows, columns=columns)


def cmd_montecarlo(n: int, l: int, samples: int, d_max: Optional[int] = None,
                   seed: int = DEFAULT_SEED, out: Optional[str] = None) -> int:
    df = montecarlo_frame(n, l, samples, d_max, seed)
    text = df.to_csv(index=False, float_format="%.15g")
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")

    violations = int(df["violations"].sum()) if len(df) else 0
    print(f" {len(df)} samples, {violations} violations", file=sys.stderr)
    if violations:
        raise InternalConsistencyError(f"{violations} sampled tuples violate an inequality")
    return 0


def cmd_stats(log_dir: Optional[str] = None, out: Optional[str] = None) -> int:
    log_dir = log_dir or LOG_DIR
    history = RunMonitor.from_logs(log_dir)
    stats = history.get_stats()
    if not stats['total_runs']:
        print(f"no runs logged in {log_dir}")
        return 0

    table = pd.DataFrame.from_dict(stats['by_subcommand'], orient='index')
    table.index.name = 'subcommand'
    print(table.to_string())
    print(f"runs: {stats['total_runs']}  success rate: {stats['success_rate']}%  "
          f"mean runtime: {stats['avg_runtime']}s")
    for code, count in stats['by_exit_code'].items():
        print(f"exit {code}: {count}")
    for anomaly in history.detect_anomalies():
        detail = anomaly.get('error') or f"{anomaly['time']}s > {anomaly['threshold']}s"
        print(f"{anomaly['type']}: {anomaly['subcommand']} ({detail})")

    if out is not None:
        history.export_metrics(out)
    return 0


COMMANDS = {
    "gw": cmd_gw,
    "abw": cmd_abw,
    "upsilon": cmd_upsilon,
    "karea": cmd_karea,
    "montecarlo": cmd_montecarlo,
    "stats": cmd_stats,
}

FORMATS = {"abw": "json", "karea": "json", "upsilon": "csv", "montecarlo": "csv", "stats": "json"}


# =========================
# ARGUMENTS
# =========================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abw", description="Eigenvalue inequalities and Upsilon estimates for SU(n)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gw = sub.add_parser("gw", help="Gromov-Witten number of Schubert classes on Gr(r, n)")
    gw.add_argument("--n", type=int, required=True)
    gw.add_argument("--r", type=int, required=True)
    gw.add_argument("--classes", required=True, help="subsets, e.g. '1,2;1,3;2,4'")
    gw.add_argument("--d", type=int, default=0)

    abw = sub.add_parser("abw", help="write the inequality list as JSON")
    abw.add_argument("--n", type=int, required=True)
    abw.add_argument("--l", type=int, required=True)
    abw.add_argument("--d-max", dest="d_max", type=int)
    abw.add_argument("--out")

    ups = sub.add_parser("upsilon", help="estimate Upsilon_l and its certified lower bound")
    ups.add_argument("--classes", required=True, help="alcove points, e.g. '0.1,-0.1;0.3,-0.3'")
    ups.add_argument("--n", type=int)
    ups.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ups.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ups.add_argument("--starts", type=int, default=DEFAULT_STARTS)
    ups.add_argument("--out")

    karea = sub.add_parser("karea", help="K-area / distance duality on the cylinder (SU(2))")
    karea.add_argument("--classes", required=True, help="two alcove points, e.g. '0.1,-0.1;0.3,-0.3'")
    karea.add_argument("--mesh", type=int, default=DEFAULT_MESH)
    karea.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    karea.add_argument("--budget", type=int, default=8)
    karea.add_argument("--seed", type=int, default=DEFAULT_SEED)
    karea.add_argument("--out")

    mc = sub.add_parser("montecarlo", help="sample Delta_l and check every inequality")
    mc.add_argument("--n", type=int, required=True)
    mc.add_argument("--l", type=int, required=True)
    mc.add_argument("--samples", type=int, default=10000)
    mc.add_argument("--d-max", dest="d_max", type=int)
    mc.add_argument("--seed", type=int, default=DEFAULT_SEED)
    mc.add_argument("--out")

    stats = sub.add_parser("stats", help="summarize the run log: runtimes, failures, anomalies")
    stats.add_argument("--log-dir", dest="log_dir", help=f"folder of runs_*.jsonl (default {LOG_DIR})")
    stats.add_argument("--out", help="export stats and anomalies as JSON")

    return parser


def run_config(subcommand: str, params: dict) -> RunConfig:
    fields = {k: v for k, v in params.items() if k in RunConfig.model_fields}
    return RunConfig(subcommand=subcommand, format=FORMATS.get(subcommand, "text"), **fields)


def main(argv: Optional[Sequence[str]] = None, monitor: Optional[RunMonitor] = None) -> int:
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k != "subcommand"}
    monitor = monitor or RunMonitor(log_dir=LOG_DIR, persist=ENABLE_MONITORING, verbose=VERBOSE)

    @track_performance(monitor, args.subcommand)
    def run(**kwargs) -> int:
        run_config(args.subcommand, kwargs)
        return COMMANDS[args.subcommand](**kwargs)

    try:
        return run(**params)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    finally:
        get_default_cache().save()


if __name__ == "__main__":
    sys.exit(main())
