"""Per-round metrics, run summaries, their file formats and run comparison."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from .errors import ComparisonError

CSV_COLUMNS = (
    "round",
    "dead_cum",
    "alive_cum",
    "latency_ms",
    "packet_loss_pct",
    "fused_quality_pct",
    "energy_consumed_j",
    "ch_count",
)
_INT_COLUMNS = {"round", "dead_cum", "alive_cum", "ch_count"}

SUMMARY_KEYS = (
    "final_dead",
    "final_alive",
    "mean_latency_ms",
    "mean_packet_loss_pct",
    "mean_fused_quality_pct",
    "total_energy_j",
    "first_death_round",
    "config_digest",
)


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    dead_cum: int
    alive_cum: int
    latency_ms: float
    packet_loss_pct: float
    fused_quality_pct: float
    energy_consumed_j: float
    ch_count: int


@dataclass(frozen=True)
class RunSummary:
    final_dead: int
    final_alive: int
    mean_latency_ms: float
    mean_packet_loss_pct: float
    mean_fused_quality_pct: float
    total_energy_j: float
    first_death_round: int | None
    config_digest: str

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in SUMMARY_KEYS}

    @property
    def n_nodes(self) -> int:
        return self.final_dead + self.final_alive


def fused_quality(fd: float, truth: float, eps: float = 1e-9) -> float:
    """Closeness of a fused value to ground truth, in percent (clipped to [0, 100])."""
    rel = abs(fd - truth) / max(abs(truth), eps)
    return 100.0 * min(1.0, max(0.0, 1.0 - rel))


def summarize(metrics: Sequence[RoundMetrics], n_nodes: int, config_digest: str) -> RunSummary:
    """Aggregate a run. With no rounds the summary describes the initial, all-alive state."""

    def mean(attr):
        return math.fsum(getattr(m, attr) for m in metrics) / len(metrics) if metrics else 0.0

    first_death = next((m.round for m in metrics if m.dead_cum > 0), None)
    final_dead = metrics[-1].dead_cum if metrics else 0
    return RunSummary(
        final_dead=final_dead,
        final_alive=n_nodes - final_dead,
        mean_latency_ms=mean("latency_ms"),
        mean_packet_loss_pct=mean("packet_loss_pct"),
        mean_fused_quality_pct=mean("fused_quality_pct"),
        total_energy_j=math.fsum(m.energy_consumed_j for m in metrics),
        first_death_round=first_death,
        config_digest=config_digest,
    )


def _fmt(column, value) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    return f"{value:.6g}"


def rounds_csv_text(metrics: Sequence[RoundMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for m in metrics:
        writer.writerow([_fmt(c, getattr(m, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_rounds_csv(metrics: Sequence[RoundMetrics], path) -> None:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(rounds_csv_text(metrics))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_rounds_csv(path) -> list[RoundMetrics]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            RoundMetrics(**{c: (int(row[c]) if c in _INT_COLUMNS else float(row[c])) for c in CSV_COLUMNS})
            for row in reader
        ]


def summary_json_text(summary: RunSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2) + "\n"


def write_summary_json(summary: RunSummary, path) -> None:
    path = Path(path)
    try:
        path.write_text(summary_json_text(summary))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_summary_json(path) -> RunSummary:
    data = json.loads(Path(path).read_text())
    return RunSummary(**{f.name: data[f.name] for f in fields(RunSummary)})


def _pct(baseline, proposed, cost_like=True):
    if baseline is None or proposed is None or baseline == 0:
        return None
    delta = baseline - proposed if cost_like else proposed - baseline
    return 100.0 * delta / baseline


def compare_runs(proposed: RunSummary, baseline: RunSummary) -> dict:
    """Deltas of proposed vs baseline, positive meaning "proposed is better".

    Percentages are relative to the baseline. A ``first_death_round`` of
    ``None`` means no node died during the run, which counts as later than
    any recorded death.
    """
    if proposed.n_nodes != baseline.n_nodes:
        raise ComparisonError(f"node counts differ: {proposed.n_nodes} vs {baseline.n_nodes}")

    p_fd, b_fd = proposed.first_death_round, baseline.first_death_round
    if p_fd is None:
        later_or_equal = True
    elif b_fd is None:
        later_or_equal = False
    else:
        later_or_equal = p_fd >= b_fd

    return {
        "total_energy_j": {
            "proposed": proposed.total_energy_j,
            "baseline": baseline.total_energy_j,
            "delta": baseline.total_energy_j - proposed.total_energy_j,
            "pct_reduction": _pct(baseline.total_energy_j, proposed.total_energy_j),
        },
        "first_death_round": {
            "proposed": p_fd,
            "baseline": b_fd,
            "delta": None if p_fd is None or b_fd is None else p_fd - b_fd,
            "proposed_later_or_equal": later_or_equal,
        },
        "final_alive": {
            "proposed": proposed.final_alive,
            "baseline": baseline.final_alive,
            "delta": proposed.final_alive - baseline.final_alive,
            "pct_increase": _pct(baseline.final_alive, proposed.final_alive, cost_like=False),
        },
        "mean_latency_ms": {
            "proposed": proposed.mean_latency_ms,
            "baseline": baseline.mean_latency_ms,
            "delta": baseline.mean_latency_ms - proposed.mean_latency_ms,
            "pct_reduction": _pct(baseline.mean_latency_ms, proposed.mean_latency_ms),
        },
    }


FIGURE_SERIES = {
    "fused_quality": ("round", "fused_quality_pct"),
    "dead_nodes": ("round", "dead_cum"),
    "alive_nodes": ("round", "alive_cum"),
    "latency": ("round", "latency_ms"),
    "packet_loss": ("round", "packet_loss_pct"),
}


def write_figure_series(metrics: Sequence[RoundMetrics], out_dir) -> list[Path]:
    """One two-column CSV per results figure (fused data, dead, alive, latency, loss)."""
    out_dir = Path(out_dir)
    written = []
    for name, cols in FIGURE_SERIES.items():
        path = out_dir / f"series_{name}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for m in metrics:
                writer.writerow([_fmt(c, getattr(m, c)) for c in cols])
        written.append(path)
    return written
