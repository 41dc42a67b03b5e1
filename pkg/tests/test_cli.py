"""End-to-end command-line checks through ``python -m offloadsim``."""

import json
import subprocess
import sys

import pytest

GRAPH_DOC = {
    "vertices": [
        {"name": "core.Heavy", "methods": [
            {"name": "work", "invocations": 10, "t_local_ms": 50.0,
             "in_bytes": 100, "out_bytes": 100, "energy_mj": 1.0}]},
        {"name": "core.Mate", "methods": [
            {"name": "assist", "invocations": 5, "t_local_ms": 20.0,
             "in_bytes": 50, "out_bytes": 50, "energy_mj": 0.5}]},
        {"name": "ui.Main", "methods": [
            {"name": "draw", "invocations": 100, "t_local_ms": 1.0,
             "in_bytes": 10, "out_bytes": 10, "energy_mj": 0.1}]},
    ],
    "edges": [
        {"a": "core.Heavy", "b": "core.Mate", "weight": 8},
        {"a": "core.Mate", "b": "ui.Main", "weight": 1},
    ],
}

SCENARIO_DOC = {
    "name": "cli-smoke",
    "topology": {"generate": {"kind": "line", "n": 3, "seed": 1}},
    "services": [{"name": "s", "mean_exec_time_s": 0.001}],
    "base_rate_per_s": 100.0,
    "horizon_s": 0.1,
    "strategy": "passive",
}

CORPUS_TEXT = (
    "appA\t1000\tavendor.own.stuff=6;lib.core.alpha=4\n"
    "appB\t2000\tbvendor.own.stuff=5;lib.core.beta=5\n"
    "appC\t800\tcvendor.deep.pkg=8\n"
)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "offloadsim", *map(str, args)],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-inputs")
    (root / "graph.json").write_text(json.dumps(GRAPH_DOC))
    (root / "rules.json").write_text(json.dumps([{"prefix": "ui", "tag": "pinned"}]))
    (root / "energy.json").write_text(json.dumps({
        "energy_per_tx_byte_j": 0.0,
        "energy_per_rx_byte_j": 0.0,
        "energy_idle_per_s_j": 0.0,
    }))
    (root / "scenario.json").write_text(json.dumps(SCENARIO_DOC))
    (root / "corpus.tsv").write_text(CORPUS_TEXT)
    return root


class TestSimulate:
    def test_preset_run_writes_summary_and_series(self, tmp_path):
        out = tmp_path / "run"
        res = run_cli("simulate", "--preset", "fig3", "--seed", 1, "--out", out)
        assert res.returncode == 0
        assert res.stdout.startswith("strategy=proactive seed=1 ")
        for name in ("run_summary.json", "run_series.json",
                     "run_summary.csv", "run_series.csv"):
            assert (out / name).exists()

    def test_config_file_with_single_format(self, tmp_path, inputs):
        out = tmp_path / "run"
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--seed", 2, "--format", "json", "--out", out)
        assert res.returncode == 0
        assert (out / "run_summary.json").exists()
        assert not (out / "run_summary.csv").exists()
        summary = json.loads((out / "run_summary.json").read_text())
        assert summary["seed"] == 2
        assert summary["strategy"] == "passive"

    def test_strategy_flag_overrides_the_scenario(self, tmp_path, inputs):
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--strategy", "none", "--seed", 1, "--out", tmp_path / "o")
        assert res.returncode == 0
        assert res.stdout.startswith("strategy=none ")

    def test_seed_sweep_writes_batch_summary(self, tmp_path, inputs):
        out = tmp_path / "sweep"
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--seeds", "1..3", "--out", out)
        assert res.returncode == 0
        assert res.stdout.startswith("runs=3 ")
        payload = json.loads((out / "batch_summary.json").read_text())
        assert payload["aggregate"]["runs"] == 3
        assert [r["seed"] for r in payload["per_seed"]] == [1, 2, 3]

    def test_comma_separated_seed_list(self, tmp_path, inputs):
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--seeds", "4,7", "--out", tmp_path / "o")
        assert res.returncode == 0
        assert res.stdout.startswith("runs=2 ")

    def test_repeated_run_is_byte_identical(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            res = run_cli("simulate", "--preset", "fig3", "--seed", 5, "--out", out)
            assert res.returncode == 0
        for name in ("run_summary.json", "run_series.json",
                     "run_summary.csv", "run_series.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_missing_config_exits_with_usage_error(self, tmp_path):
        res = run_cli("simulate", "--config", tmp_path / "absent.json",
                      "--out", tmp_path / "o")
        assert res.returncode == 2
        assert res.stderr.startswith("error:")

    def test_malformed_seed_range_rejected(self, tmp_path, inputs):
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--seeds", "a..b", "--out", tmp_path / "o")
        assert res.returncode == 2

    def test_config_and_preset_are_mutually_exclusive(self, tmp_path, inputs):
        res = run_cli("simulate", "--config", inputs / "scenario.json",
                      "--preset", "fig3", "--out", tmp_path / "o")
        assert res.returncode == 2


class TestPartition:
    def test_report_lands_on_stdout(self, inputs):
        res = run_cli("partition", "--graph", inputs / "graph.json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["natural_n_clusters"] >= 1
        sizes = [s["n_clusters"] for s in payload["sets"]]
        assert sizes == sorted(sizes)

    def test_rules_pin_classes_out_of_offload_sets(self, inputs):
        res = run_cli("partition", "--graph", inputs / "graph.json",
                      "--rules", inputs / "rules.json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        for entry in payload["sets"]:
            for cluster in entry["offloadable"]:
                assert "ui.Main" not in cluster

    def test_out_file_matches_stdout_payload(self, tmp_path, inputs):
        piped = run_cli("partition", "--graph", inputs / "graph.json")
        target = tmp_path / "report.json"
        filed = run_cli("partition", "--graph", inputs / "graph.json", "--out", target)
        assert filed.returncode == 0
        assert filed.stdout == ""
        assert target.read_text() == piped.stdout

    def test_invalid_graph_document_is_a_usage_error(self, tmp_path):
        bad = tmp_path / "graph.json"
        bad.write_text("{not json")
        res = run_cli("partition", "--graph", bad)
        assert res.returncode == 2

    def test_unwritable_output_is_a_runtime_error(self, tmp_path, inputs):
        blocker = tmp_path / "blocker"
        blocker.write_text("occupied")
        res = run_cli("partition", "--graph", inputs / "graph.json",
                      "--out", blocker / "report.json")
        assert res.returncode == 3
        assert res.stderr.startswith("runtime error:")


class TestDecide:
    def test_verdict_reports_chosen_partition(self, inputs):
        res = run_cli("decide", "--graph", inputs / "graph.json",
                      "--rules", inputs / "rules.json",
                      "--rtt-ms", 15, "--bandwidth-bytes-per-s", 1e6,
                      "--cpu-speedup", 4.0)
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert "chosen_N" in payload
        assert payload["source"] in ("partition", "singleton-fallback", "local-only")

    def test_energy_model_file_is_accepted(self, inputs):
        res = run_cli("decide", "--graph", inputs / "graph.json",
                      "--rtt-ms", 15, "--bandwidth-bytes-per-s", 1e6,
                      "--cpu-speedup", 4.0, "--energy-model", inputs / "energy.json",
                      "--mode", "all")
        assert res.returncode == 0
        json.loads(res.stdout)

    def test_repeated_verdicts_are_byte_identical(self, inputs):
        args = ("decide", "--graph", inputs / "graph.json",
                "--rtt-ms", 40, "--bandwidth-bytes-per-s", 250000)
        assert run_cli(*args).stdout == run_cli(*args).stdout


class TestAppstats:
    def test_overlap_report_payload(self, inputs):
        res = run_cli("appstats", "--corpus", inputs / "corpus.tsv", "--depth", 2)
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["apps"] == 3
        assert payload["depth"] == 2
        assert payload["mean_unique_fraction"] == pytest.approx(70.0)
        assert payload["storage_savings"] == pytest.approx(2 / 19)

    def test_bad_depth_is_a_usage_error(self, inputs):
        res = run_cli("appstats", "--corpus", inputs / "corpus.tsv", "--depth", 0)
        assert res.returncode == 2
        assert res.stderr.startswith("error:")


class TestParserBasics:
    def test_help_exits_cleanly(self):
        res = run_cli("--help")
        assert res.returncode == 0
        assert "simulate" in res.stdout

    def test_missing_subcommand_is_a_usage_error(self):
        assert run_cli().returncode == 2

    def test_unknown_subcommand_is_a_usage_error(self):
        assert run_cli("frobnicate").returncode == 2
