import subprocess
import sys

import pytest

from btsearch.cli import main, parse_cli, _CliError

from oracles import cnf_text, pigeonhole_cnf


class TestParseCli:
    def test_defaults_applied(self):
        opts = parse_cli(["run", "topsorts", "input.txt"])
        assert opts.num_workers == 4
        assert opts.max_depth == 2
        assert opts.max_nodes == 5000
        assert opts.scale == 40
        assert (opts.lmin, opts.lmax) == (1.0, 3.0)
        assert opts.prune == "off"
        assert opts.budget_kind == "nodes"
        assert not opts.count_only

    def test_explicit_budget_flags(self):
        opts = parse_cli(["run", "topsorts", "in.txt", "-scale", "200", "-maxnodes", "10000"])
        assert opts.scale == 200
        assert opts.max_nodes == 10000

    def test_unbounded_depth_spelling(self):
        opts = parse_cli(["run", "spantree", "in.txt", "-maxd", "inf"])
        assert opts.max_depth is None

    def test_lmin_above_lmax_is_usage_error(self):
        with pytest.raises(_CliError) as err:
            parse_cli(["run", "topsorts", "in.txt", "-lmin", "3", "-lmax", "1"])
        assert err.value.code == 1

    def test_unknown_flag_rejected(self):
        with pytest.raises(_CliError):
            parse_cli(["run", "topsorts", "in.txt", "-frobnicate"])

    def test_unknown_app_rejected(self):
        with pytest.raises(_CliError):
            parse_cli(["run", "mystery", "in.txt"])

    def test_sat_defaults_to_decision_budgeting(self):
        opts = parse_cli(["run", "sat", "f.cnf"])
        assert opts.budget_kind == "decisions"

    def test_sat_rejects_node_budgeting_and_countonly(self):
        with pytest.raises(_CliError):
            parse_cli(["run", "sat", "f.cnf", "-budgetkind", "nodes"])
        with pytest.raises(_CliError):
            parse_cli(["run", "sat", "f.cnf", "-countonly"])

    def test_enumeration_rejects_conflict_budgeting(self):
        with pytest.raises(_CliError):
            parse_cli(["run", "topsorts", "in.txt", "-budgetkind", "conflicts"])


class TestMain:
    def test_run_topsorts_countonly(self, tmp_path, capsys):
        inp = tmp_path / "poset.txt"
        inp.write_text("3 0\n")
        code = main(["run", "topsorts", str(inp), "-countonly", "-np", "2"])
        assert code == 0
        assert capsys.readouterr().out.strip() == "6"

    def test_run_writes_frequency_and_histogram_files(self, tmp_path, capsys):
        inp = tmp_path / "poset.txt"
        inp.write_text("4 0\n")
        freq = tmp_path / "freq.txt"
        hist = tmp_path / "hist.csv"
        code = main(
            ["run", "topsorts", str(inp), "-countonly", "-freq", str(freq), "-hist", str(hist)]
        )
        assert code == 0
        freq_lines = freq.read_text().splitlines()
        assert all(int(v) >= 0 for v in freq_lines)
        assert hist.read_text().startswith("elapsed_seconds,busy_workers,joblist_len")

    def test_run_sat_unsat(self, tmp_path, capsys):
        inp = tmp_path / "php.cnf"
        inp.write_text(cnf_text(pigeonhole_cnf(3, 2)))
        code = main(["run", "sat", str(inp), "-np", "2"])
        assert code == 0
        assert "s UNSATISFIABLE" in capsys.readouterr().out

    def test_missing_input_is_input_error(self, tmp_path):
        code = main(["run", "topsorts", str(tmp_path / "absent.txt")])
        assert code == 2

    def test_unparsable_input_is_input_error(self, tmp_path):
        inp = tmp_path / "bad.txt"
        inp.write_text("3 3\n1 2\n2 3\n3 1\n")  # cyclic
        code = main(["run", "topsorts", str(inp)])
        assert code == 2

    def test_usage_error_exit_code(self, capsys):
        assert main(["run", "topsorts", "x", "-lmin", "9", "-lmax", "1"]) == 1

    def test_gwtree_csv(self, tmp_path, capsys):
        out_csv = tmp_path / "rows.csv"
        code = main(
            [
                "gwtree", "-law", "fullbinary", "-size", "200", "-budget", "50",
                "-trials", "2", "-seed", "1", "-out", str(out_csv),
            ]
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "trial,size,b,jobs,ratio,predicted"
        assert len(lines) == 3

    def test_gwtree_rejects_bad_law(self):
        assert main(["gwtree", "-law", "cauchy"]) == 2

    def test_efficiency_output(self, capsys):
        assert main(["efficiency", "12723", "192", "125"]) == 0
        assert capsys.readouterr().out.startswith("efficiency 0.530")

    def test_efficiency_rejects_nonpositive(self):
        assert main(["efficiency", "0", "4", "5"]) == 1


class TestConsoleEntry:
    def test_module_invocation(self, tmp_path):
        inp = tmp_path / "p.txt"
        inp.write_text("3 0\n")
        proc = subprocess.run(
            [sys.executable, "-m", "btsearch.cli", "run", "topsorts", str(inp), "-countonly"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "6"
