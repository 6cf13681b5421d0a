"""
Observability & Monitoring System
Location: abw_lab/utils/observability.py
Tracks CLI runs: parameters, runtime, failures
Read back by `cli.py stats`

SAVES IT TO:
Folder: ./logs/ (config.LOG_DIR)
Files:
runs_YYYYMMDD.jsonl (daily run logs)
metrics_YYYYMMDD_HHMMSS.json (exported metrics)
"""

import json
import os
import time
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from config import ANOMALY_MIN_RUNS, RECENT_RUNS, SLOW_RUN_FACTOR, SLOW_RUN_FLOOR
from utils.errors import exit_code_for

RUN_COLUMNS = ['timestamp', 'subcommand', 'params', 'runtime_seconds',
               'success', 'error', 'exit_code', 'metadata']

# exit code -> anomaly type; anything else is a plain error
FAILURE_KINDS = {3: 'convergence', 4: 'inconsistency'}


class RunMonitor:
    """Monitors subcommand runs"""

    def __init__(self, log_dir: str = "./logs", persist: bool = True, verbose: bool = False):
        """Initialize run monitor"""
        self.log_dir = log_dir
        self.persist = persist
        self.verbose = verbose
        self.metrics: List[Dict] = []

        if persist:
            os.makedirs(log_dir, exist_ok=True)

        if verbose:
            print(f" Run Monitor initialized (logs: {log_dir})")

    def log_run(self, subcommand: str, params: Dict, runtime: float,
                success: bool = True, error: Optional[str] = None,
                exit_code: int = 0, metadata: Optional[Dict] = None):
        """Log a subcommand execution"""

        log_entry = {
            'timestamp': datetime.now().isoformat(),
            'subcommand': subcommand,
            'params': {k: _jsonable(v) for k, v in params.items()},
            'runtime_seconds': round(runtime, 3),
            'success': success,
            'error': error,
            'exit_code': exit_code,
            'metadata': metadata or {},
        }

        self.metrics.append(log_entry)

        if self.persist:
            self._save_log(log_entry)

        if self.verbose:
            status = "ok" if success else "FAILED"
            print(f"{status} {subcommand.upper()} | {runtime:.2f}s | exit {exit_code}")

    @classmethod
    def from_logs(cls, log_dir: str, verbose: bool = False) -> "RunMonitor":
        """Read-only monitor over every runs_*.jsonl file in log_dir, oldest first"""
        history = cls(log_dir=log_dir, persist=False, verbose=verbose)
        for path in sorted(Path(log_dir).glob("runs_*.jsonl")):
            for lineno, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    history.metrics.append(json.loads(line))
                except ValueError:
                    # a run killed mid-write leaves a torn last line
                    print(f" Skipping unreadable record {path.name}:{lineno}")
        return history

    def _frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.metrics, columns=RUN_COLUMNS)
        frame['success'] = frame['success'].astype(bool)
        return frame

    def get_stats(self) -> Dict:
        """Totals, success rate and per-subcommand runtimes"""
        runs = self._frame()
        if runs.empty:
            return {'total_runs': 0, 'success_rate': 0, 'avg_runtime': 0}

        successes = int(runs['success'].sum())
        per_command = runs.groupby('subcommand')['runtime_seconds'].agg(['count', 'mean'])
        failed_codes = runs.loc[~runs['success'], 'exit_code'].value_counts().sort_index()

        return {
            'total_runs': len(runs),
            'success_count': successes,
            'error_count': len(runs) - successes,
            'success_rate': round(100 * successes / len(runs), 2),
            'avg_runtime': round(float(runs['runtime_seconds'].mean()), 3),
            'by_subcommand': {
                name: {'count': int(row['count']), 'avg_time': round(float(row['mean']), 3)}
                for name, row in per_command.iterrows()
            },
            'by_exit_code': {int(code): int(count) for code, count in failed_codes.items()},
        }

    def detect_anomalies(self) -> List[Dict]:
        """
        Failed runs, labelled by exit code, and runs slower than SLOW_RUN_FACTOR
        times the median runtime (never below SLOW_RUN_FLOOR seconds).
        Needs ANOMALY_MIN_RUNS runs before anything is reported.
        """
        runs = self._frame()
        if len(runs) < ANOMALY_MIN_RUNS:
            return []

        threshold = max(SLOW_RUN_FACTOR * float(runs['runtime_seconds'].median()), SLOW_RUN_FLOOR)
        anomalies = []
        for run in runs.itertuples(index=False):
            if run.runtime_seconds > threshold:
                anomalies.append({
                    'type': 'slow_run',
                    'subcommand': run.subcommand,
                    'time': float(run.runtime_seconds),
                    'threshold': round(threshold, 3),
                })
            if not run.success:
                anomalies.append({
                    'type': FAILURE_KINDS.get(int(run.exit_code), 'error'),
                    'subcommand': run.subcommand,
                    'exit_code': int(run.exit_code),
                    'error': run.error,
                })
        return anomalies

    def _save_log(self, log_entry: Dict):
        """Append one record to today's runs file"""
        path = Path(self.log_dir) / f"runs_{datetime.now():%Y%m%d}.jsonl"
        with path.open('a', encoding='utf-8') as f:
            f.write(json.dumps(log_entry) + '\n')

    def export_metrics(self, filepath: Optional[str] = None) -> str:
        """Write stats, anomalies and the latest runs as one JSON document"""
        target = Path(filepath) if filepath else Path(self.log_dir) / f"metrics_{datetime.now():%Y%m%d_%H%M%S}.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        report = {
            'stats': self.get_stats(),
            'anomalies': self.detect_anomalies(),
            'recent_runs': self.metrics[-RECENT_RUNS:],
        }
        target.write_text(json.dumps(report, indent=2, default=_jsonable), encoding='utf-8')

        if self.verbose:
            print(f" Metrics exported to: {target}")
        return str(target)


def track_performance(monitor: RunMonitor, subcommand: str):
    """Decorator to log a callable as one run"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            success = True
            error = None
            code = 0

            try:
                return func(*args, **kwargs)
            except Exception as e:
                success = False
                error = f"{type(e).__name__}: {e}"
                code = exit_code_for(e)
                raise
            finally:
                monitor.log_run(
                    subcommand=subcommand,
                    params=kwargs,
                    runtime=time.time() - start_time,
                    success=success,
                    error=error,
                    exit_code=code,
                )

        return wrapper
    return decorator


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)
