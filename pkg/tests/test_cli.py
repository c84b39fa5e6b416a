"""Harness behavior: exit codes, CSV schema, determinism, config handling."""

import csv
import json
import os

import pytest

from cgkit.cli import CSV_HEADER, main


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def strip_elapsed(rows):
    idx = rows[0].index("elapsed_seconds")
    return [[c for i, c in enumerate(row) if i != idx] for row in rows]


class TestRun:
    def test_unknown_preset_exit_2(self, capsys):
        assert main(["run", "--preset", "mystery"]) == 2

    def test_unknown_variant_exit_2(self, capsys):
        code = main(["run", "--preset", "birkhoff", "--variants", "quantum"])
        assert code == 2

    def test_unsupported_variant_exit_2(self, capsys):
        code = main(["run", "--preset", "birkhoff", "--variants", "pgd-reference"])
        assert code == 2

    def test_birkhoff_run_csv_schema(self, tmp_path, capsys):
        out = tmp_path / "bk.csv"
        code = main([
            "run", "--preset", "birkhoff", "--n", "8",
            "--variants", "fw,lfw,lafw,bcg", "--max-iterations", "120",
            "--eps", "1e-7", "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == CSV_HEADER
        variants = {row[0] for row in rows[1:]}
        assert variants == {"fw", "lfw", "lafw", "bcg"}
        cols = {name: i for i, name in enumerate(rows[0])}
        for name in ("lfw", "lafw", "bcg"):
            block = [row for row in rows[1:] if row[0] == name]
            assert int(block[-1][cols["cache_hits"]]) > 0
        for row in rows[1:]:
            assert float(row[cols["dual_gap"]]) >= 0.0
        # cumulative counters never decrease within a block
        for name in variants:
            calls = [int(r[cols["lmo_calls"]]) for r in rows[1:] if r[0] == name]
            assert calls == sorted(calls)

    def test_rational_run_reports_exact_strings(self, tmp_path, capsys):
        out = tmp_path / "rat.csv"
        code = main([
            "run", "--preset", "rational", "--n", "100",
            "--max-iterations", "60", "--out", str(out),
        ])
        assert code == 0
        summary = json.loads(out.with_suffix(".json").read_text())
        assert summary["exact_optimum_coordinate"] == "1/100"
        assert summary["exact_optimum_dual_gap"] == "0"
        assert summary["exact_run"] is True
        rows = read_csv(out)
        cols = {name: i for i, name in enumerate(rows[0])}
        assert "/" in rows[-1][cols["primal"]]  # exact rational formatting

    def test_polyreg_has_test_error_column(self, tmp_path, capsys):
        out = tmp_path / "pr.csv"
        code = main([
            "run", "--preset", "polyreg", "--n", "4", "--degree", "2",
            "--n-samples", "120", "--variants", "lafw,bcg,pgd-reference",
            "--max-iterations", "40", "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == CSV_HEADER + ["test_error"]
        assert {row[0] for row in rows[1:]} == {"lafw", "bcg", "pgd-reference"}
        for row in rows[1:]:
            assert float(row[-1]) >= 0.0

    def test_max_iterations_zero_reports_initial_point(self, tmp_path, capsys):
        out = tmp_path / "z.csv"
        code = main([
            "run", "--preset", "simplex-projection", "--n", "5",
            "--variants", "fw,afw", "--max-iterations", "0", "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out)
        by_variant = {}
        for row in rows[1:]:
            by_variant.setdefault(row[0], []).append(row)
        for block in by_variant.values():
            assert len(block) == 1
            assert block[0][1] == "0"
            assert block[0][-1] == "init"

    def test_determinism_excluding_elapsed(self, tmp_path, capsys):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            code = main([
                "run", "--preset", "birkhoff", "--n", "6",
                "--variants", "fw,lfw,bcg", "--max-iterations", "80",
                "--seed", "3", "--out", str(out),
            ])
            assert code == 0
            outs.append(strip_elapsed(read_csv(out)))
        assert outs[0] == outs[1]

    def test_env_seed_override(self, tmp_path, capsys, monkeypatch):
        out1 = tmp_path / "s1.csv"
        out2 = tmp_path / "s2.csv"
        main(["run", "--preset", "simplex-projection", "--n", "5",
              "--max-iterations", "10", "--seed", "1", "--out", str(out1)])
        monkeypatch.setenv("CGKIT_SEED", "1")
        main(["run", "--preset", "simplex-projection", "--n", "5",
              "--max-iterations", "10", "--seed", "99", "--out", str(out2)])
        assert strip_elapsed(read_csv(out1)) == strip_elapsed(read_csv(out2))

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "preset": "simplex-projection", "n": 5, "variants": "fw",
            "max_iterations": 15, "out": str(tmp_path / "c.csv"),
        }))
        assert main(["run", "--config", str(cfg)]) == 0
        assert (tmp_path / "c.csv").exists()

    def test_save_instance(self, tmp_path, capsys):
        out = tmp_path / "pr.csv"
        inst = tmp_path / "inst.json"
        code = main([
            "run", "--preset", "polyreg", "--n", "3", "--degree", "2",
            "--n-samples", "50", "--variants", "fw", "--max-iterations", "5",
            "--out", str(out), "--save-instance", str(inst),
        ])
        assert code == 0
        payload = json.loads(inst.read_text())
        assert payload["kind"] == "polyreg"
        assert payload["spec"]["n_samples"] == 50

    def test_oracle_interchangeability_summary(self, tmp_path, capsys):
        out = tmp_path / "sp.csv"
        code = main([
            "run", "--preset", "simplex-projection", "--n", "6",
            "--variants", "fw", "--max-iterations", "60", "--out", str(out),
        ])
        assert code == 0
        summary = json.loads(out.with_suffix(".json").read_text())
        assert summary["oracle_interchangeable"] is True
        rows = read_csv(out)
        assert {"fw", "fw-enum"} <= {row[0] for row in rows[1:]}


class TestCompare:
    def test_table_and_lazification_economy(self, tmp_path, capsys):
        out = tmp_path / "bk.csv"
        code = main([
            "compare", "--preset", "birkhoff", "--n", "8",
            "--variants", "fw,lfw,lafw,bcg", "--max-iterations", "150",
            "--out", str(out),
        ])
        assert code == 0
        table = capsys.readouterr().out
        assert "final_primal" in table and "lmo_calls" in table
        summary = json.loads(out.with_suffix(".json").read_text())
        fw_iterations = summary["variants"]["fw"]["iterations"]
        for lazy in ("lfw", "lafw", "bcg"):
            assert summary["variants"][lazy]["lmo_calls"] < fw_iterations

    def test_matcomp_rank_bound(self, tmp_path, capsys):
        out = tmp_path / "mc.csv"
        code = main([
            "compare", "--preset", "matcomp", "--n-rows", "20", "--n-cols", "15",
            "--rank", "3", "--variants", "fw", "--max-iterations", "40",
            "--out", str(out),
        ])
        assert code == 0
        summary = json.loads(out.with_suffix(".json").read_text())
        assert summary["variants"]["fw"]["final_sparsity"] <= 41


class TestCheck:
    def test_clean_build_passes(self, capsys):
        assert main(["check"]) == 0
        out = capsys.readouterr().out
        assert "hungarian" in out and "rational" in out

    def test_corrupted_oracle_fails_by_name(self, capsys):
        assert main(["check", "--corrupt", "ksparse"]) == 1
        captured = capsys.readouterr()
        assert "ksparse" in captured.err
