"""
Test Observability & Run Monitoring
Location: abw_lab/test_observability.py

SAVES IT TO:
Folder: pytest tmp_path
Files:
Logs: runs_YYYYMMDD.jsonl, metrics_*.json
"""

import json
import time
from pathlib import Path

import pytest

from utils.errors import InputValidationError
from utils.observability import RunMonitor, track_performance


def test_log_run_persists_jsonl(tmp_path):
    monitor = RunMonitor(log_dir=str(tmp_path))
    monitor.log_run("abw", {"n": 3, "l": 3, "out": None}, runtime=0.25)
    monitor.log_run("gw", {"classes": "1;1;1"}, runtime=0.01, success=False,
                    error="InputValidationError: bad", exit_code=2)

    files = list(tmp_path.glob("runs_*.jsonl"))
    assert len(files) == 1
    lines = [json.loads(line) for line in files[0].read_text(encoding="utf-8").splitlines()]
    assert [entry["subcommand"] for entry in lines] == ["abw", "gw"]
    assert lines[0]["params"] == {"n": 3, "l": 3, "out": None}
    assert lines[1]["exit_code"] == 2
    assert lines[1]["success"] is False


def test_stats():
    monitor = RunMonitor(persist=False)
    assert monitor.get_stats()["total_runs"] == 0

    for runtime in (0.1, 0.2, 0.3):
        monitor.log_run("upsilon", {}, runtime=runtime)
    monitor.log_run("karea", {}, runtime=1.0, success=False, error="boom", exit_code=3)

    stats = monitor.get_stats()
    assert stats["total_runs"] == 4
    assert stats["success_count"] == 3
    assert stats["error_count"] == 1
    assert stats["success_rate"] == 75.0
    assert stats["by_subcommand"]["upsilon"]["count"] == 3
    assert stats["by_subcommand"]["upsilon"]["avg_time"] == pytest.approx(0.2)


def test_detect_anomalies():
    monitor = RunMonitor(persist=False)
    for _ in range(4):
        monitor.log_run("gw", {}, runtime=0.1)
    assert monitor.detect_anomalies() == []

    monitor.log_run("montecarlo", {}, runtime=5.0)
    monitor.log_run("abw", {}, runtime=0.1, success=False, error="bad", exit_code=2)
    kinds = [(a["type"], a["subcommand"]) for a in monitor.detect_anomalies()]
    assert ("slow_run", "montecarlo") in kinds
    assert ("error", "abw") in kinds


def test_export_metrics(tmp_path):
    monitor = RunMonitor(log_dir=str(tmp_path))
    monitor.log_run("abw", {"n": 2}, runtime=0.5)
    path = monitor.export_metrics(str(tmp_path / "metrics.json"))
    payload = json.loads((tmp_path / "metrics.json").read_text(encoding="utf-8"))
    assert path.endswith("metrics.json")
    assert payload["stats"]["total_runs"] == 1
    assert payload["recent_runs"][0]["params"] == {"n": 2}


def test_failures_are_labelled_by_exit_code():
    monitor = RunMonitor(persist=False)
    for _ in range(3):
        monitor.log_run("abw", {}, runtime=0.1)
    monitor.log_run("karea", {}, runtime=0.2, success=False, error="PlaquetteBranchError: cut", exit_code=3)
    monitor.log_run("upsilon", {}, runtime=0.2, success=False, error="below bound", exit_code=4)

    assert monitor.get_stats()["by_exit_code"] == {3: 1, 4: 1}
    kinds = {a["subcommand"]: a["type"] for a in monitor.detect_anomalies()}
    assert kinds == {"karea": "convergence", "upsilon": "inconsistency"}


def test_fast_runs_are_never_slow():
    monitor = RunMonitor(persist=False)
    for runtime in (0.0, 0.0, 0.0, 0.0, 0.02):
        monitor.log_run("gw", {}, runtime=runtime)
    assert monitor.detect_anomalies() == []


def test_from_logs_reads_every_day(tmp_path, capsys):
    first = {"timestamp": "2024-01-01T00:00:00", "subcommand": "abw", "params": {}, "runtime_seconds": 0.5,
             "success": True, "error": None, "exit_code": 0, "metadata": {}}
    second = dict(first, subcommand="gw", success=False, error="bad", exit_code=2)
    (tmp_path / "runs_20240101.jsonl").write_text(json.dumps(first) + "\n", encoding="utf-8")
    (tmp_path / "runs_20240102.jsonl").write_text(json.dumps(second) + "\n{\"subcomm", encoding="utf-8")

    history = RunMonitor.from_logs(str(tmp_path))
    assert [m["subcommand"] for m in history.metrics] == ["abw", "gw"]
    assert "runs_20240102.jsonl:2" in capsys.readouterr().out
    assert history.get_stats()["error_count"] == 1
    assert not history.persist


def test_export_is_plain_json(tmp_path):
    monitor = RunMonitor(log_dir=str(tmp_path))
    for _ in range(4):
        monitor.log_run("gw", {}, runtime=0.1)
    monitor.log_run("montecarlo", {"samples": 10000}, runtime=4.0)
    payload = json.loads(Path(monitor.export_metrics()).read_text(encoding="utf-8"))
    assert payload["anomalies"] == [
        {"type": "slow_run", "subcommand": "montecarlo", "time": 4.0, "threshold": 1.0},
    ]


def test_track_performance_decorator():
    monitor = RunMonitor(persist=False)

    @track_performance(monitor, "demo")
    def work(x=1):
        time.sleep(0.01)
        return x * 2

    @track_performance(monitor, "demo")
    def fail(x=1):
        raise InputValidationError("bad input")

    assert work(x=3) == 6
    with pytest.raises(InputValidationError):
        fail(x=4)

    first, second = monitor.metrics
    assert first["success"] and first["params"] == {"x": 3} and first["exit_code"] == 0
    assert not second["success"]
    assert second["exit_code"] == 2
    assert "bad input" in second["error"]


def test_params_are_made_jsonable(tmp_path):
    monitor = RunMonitor(log_dir=str(tmp_path))
    monitor.log_run("abw", {"path": tmp_path, "dims": (2, 3)}, runtime=0.0)
    entry = monitor.metrics[0]
    assert entry["params"]["path"] == str(tmp_path)
    assert entry["params"]["dims"] == [2, 3]


if __name__ == "__main__":
    print("=" * 70)
    print("TESTING OBSERVABILITY & RUN MONITORING")
    print("=" * 70)
    raise SystemExit(pytest.main([__file__, "-v"]))
