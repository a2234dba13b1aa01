import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsnfusion.errors import ComparisonError
from wsnfusion.metrics import (
    CSV_COLUMNS,
    SUMMARY_KEYS,
    RoundMetrics,
    RunSummary,
    compare_runs,
    fused_quality,
    read_rounds_csv,
    read_summary_json,
    rounds_csv_text,
    summarize,
    summary_json_text,
    write_figure_series,
    write_rounds_csv,
    write_summary_json,
)


def row(r, dead=0, n=100, energy=0.0123456789, quality=98.76543):
    return RoundMetrics(r, dead, n - dead, 25.5 + r / 7, 0.05, quality, energy, 5)


def summary(**changes):
    base = dict(
        final_dead=6,
        final_alive=94,
        mean_latency_ms=25.5,
        mean_packet_loss_pct=0.05,
        mean_fused_quality_pct=98.6,
        total_energy_j=1.0,
        first_death_round=40,
        config_digest="abc",
    )
    base.update(changes)
    return RunSummary(**base)


def test_fused_quality_examples():
    assert fused_quality(3.7, 3.7) == 100.0
    assert fused_quality(0.0, 1.0) == 0.0
    assert fused_quality(0.95, 1.0) == pytest.approx(95.0)
    assert fused_quality(5.0, 1.0) == 0.0  # clipped
    assert fused_quality(0.0, 0.0) == 100.0


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_fused_quality_bounded(fd, truth):
    assert 0.0 <= fused_quality(fd, truth) <= 100.0


def test_csv_header_only_for_empty(tmp_path):
    path = tmp_path / "rounds.csv"
    write_rounds_csv([], path)
    assert path.read_bytes() == (",".join(CSV_COLUMNS) + "\n").encode()
    assert read_rounds_csv(path) == []


def test_csv_has_rounds_plus_one_lines_and_lf(tmp_path):
    path = tmp_path / "rounds.csv"
    write_rounds_csv([row(r) for r in range(1, 101)], path)
    data = path.read_bytes()
    assert b"\r" not in data
    assert len(data.decode().splitlines()) == 101
    assert data.decode().splitlines()[1].split(",")[6] == "0.0123457"  # six significant digits


def test_csv_reserialization_is_byte_identical(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_rounds_csv([row(r, dead=r // 30) for r in range(1, 51)], first)
    write_rounds_csv(read_rounds_csv(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_csv_unwritable_path_names_path(tmp_path):
    target = tmp_path / "missing" / "rounds.csv"
    with pytest.raises(OSError, match="missing"):
        write_rounds_csv([row(1)], target)


def test_summary_json_roundtrip(tmp_path):
    s = summary(total_energy_j=0.1 + 0.2, first_death_round=None)
    path = tmp_path / "summary.json"
    write_summary_json(s, path)
    assert list(json.loads(path.read_text())) == list(SUMMARY_KEYS)
    assert len(SUMMARY_KEYS) == 8
    assert read_summary_json(path) == s
    assert summary_json_text(s) == summary_json_text(read_summary_json(path))


def test_summarize():
    metrics = [row(1), row(2, dead=1), row(3, dead=3)]
    s = summarize(metrics, 100, "d")
    assert (s.final_dead, s.final_alive, s.first_death_round) == (3, 97, 2)
    assert s.mean_packet_loss_pct == pytest.approx(0.05)
    assert s.total_energy_j == pytest.approx(3 * 0.0123456789)
    empty = summarize([], 100, "d")
    assert (empty.final_alive, empty.first_death_round, empty.mean_latency_ms) == (100, None, 0.0)


def test_compare_identical_is_zero():
    report = compare_runs(summary(), summary())
    assert report["total_energy_j"]["pct_reduction"] == 0.0
    assert report["first_death_round"]["delta"] == 0
    assert report["final_alive"]["delta"] == 0
    assert report["mean_latency_ms"]["delta"] == 0.0


def test_compare_half_energy():
    report = compare_runs(summary(total_energy_j=1.0), summary(total_energy_j=2.0))
    assert report["total_energy_j"]["pct_reduction"] == 50.0


def test_compare_first_death_none_counts_as_survival():
    assert compare_runs(summary(first_death_round=None), summary())["first_death_round"]["proposed_later_or_equal"]
    assert not compare_runs(summary(), summary(first_death_round=None))["first_death_round"][
        "proposed_later_or_equal"
    ]


def test_compare_mismatched_population():
    with pytest.raises(ComparisonError):
        compare_runs(summary(), summary(final_alive=90))


def test_compare_sign_flips_when_swapped():
    a, b = summary(total_energy_j=1.5, mean_latency_ms=20.0), summary(total_energy_j=3.0, mean_latency_ms=30.0)
    fwd, rev = compare_runs(a, b), compare_runs(b, a)
    for key in ("total_energy_j", "mean_latency_ms"):
        assert fwd[key]["delta"] == -rev[key]["delta"]
        assert fwd[key]["pct_reduction"] > 0 > rev[key]["pct_reduction"]


def test_figure_series(tmp_path):
    paths = write_figure_series([row(r) for r in range(1, 4)], tmp_path)
    assert {p.name for p in paths} == {
        "series_fused_quality.csv",
        "series_dead_nodes.csv",
        "series_alive_nodes.csv",
        "series_latency.csv",
        "series_packet_loss.csv",
    }
    assert (tmp_path / "series_dead_nodes.csv").read_text() == "round,dead_cum\n1,0\n2,0\n3,0\n"
    assert rounds_csv_text([]).count("\n") == 1
