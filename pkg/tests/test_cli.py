import csv
import io
import json
import re
import subprocess
import sys

import pytest

from msgbench.cli import DEFAULTS, build_parser, main
from msgbench.landscape import LandscapeSpec, load_landscape, save_landscape


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestGenerate:
    def test_single_component(self, in_tmp, capsys):
        assert main(["generate", "--local-optima", "0", "--dims", "2", "--seed", "1",
                     "--out", "l.json"]) == 0
        assert len(load_landscape("l.json").components) == 1
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "l.json" and "global optimum at" in out

    def test_invalid_dims(self, in_tmp, capsys):
        assert main(["generate", "--dims", "0"]) == 2
        assert "--dims" in capsys.readouterr().err

    def test_resampling_exhausted_is_runtime_failure(self, in_tmp):
        assert main(["generate", "--local-optima", "40", "--dims", "1", "--boundary", "10",
                     "--smoothness", "10"]) == 1

    def test_deterministic(self, in_tmp):
        main(["generate", "--seed", "3", "--out", "a.json"])
        main(["generate", "--seed", "3", "--out", "b.json"])
        assert (in_tmp / "a.json").read_bytes() == (in_tmp / "b.json").read_bytes()


class TestRun:
    def test_three_rows(self, in_tmp, capsys):
        main(["generate", "--out", "l.json"])
        capsys.readouterr()
        assert main(["run", "--landscape", "l.json", "--algo", "rs", "--runs", "3",
                     "--seed", "5", "--budget", "500"]) == 0
        records = rows(capsys.readouterr().out)
        assert len(records) == 3 and {r["algorithm"] for r in records} == {"rs"}

    def test_unknown_algorithm(self, in_tmp, capsys):
        main(["generate", "--out", "l.json"])
        assert main(["run", "--landscape", "l.json", "--algo", "sa"]) == 2

    def test_missing_landscape_flag(self, in_tmp):
        assert main(["run", "--algo", "rs"]) == 2

    def test_missing_landscape_file(self, in_tmp):
        assert main(["run", "--landscape", "nope.json"]) == 1

    def test_pso_one_dimension(self, in_tmp, capsys):
        main(["generate", "--dims", "1", "--out", "l.json"])
        capsys.readouterr()
        assert main(["run", "--landscape", "l.json", "--algo", "pso", "--budget", "20000",
                     "--runs", "100", "--out", "r.csv"]) == 0
        records = rows((in_tmp / "r.csv").read_text())
        assert sum(r["success"] == "1" for r in records) >= 90


class TestSweep:
    def test_single_characteristic(self, in_tmp, capsys):
        assert main(["sweep", "--characteristic", "smoothness", "--runs", "2", "--budget", "60",
                     "--out-dir", "out"]) == 0
        summary = rows((in_tmp / "out" / "summary.csv").read_text())
        assert len(summary) == 10 * 8
        assert {r["characteristic"] for r in summary} == {"smoothness"}
        assert sorted(p.name for p in (in_tmp / "out").glob("radar_*.svg")) == \
            sorted(f"radar_{a}.svg" for a in ("ba", "bfoa", "es", "ga", "hs", "pso", "rs", "shc"))
        err = capsys.readouterr().err
        assert "[80/80]" in err

    def test_all_smoke(self, in_tmp):
        assert main(["sweep", "--characteristic", "all", "--runs", "2", "--budget", "100",
                     "--out-dir", "out"]) == 0
        summary = rows((in_tmp / "out" / "summary.csv").read_text())
        assert len({(r["characteristic"], r["value"]) for r in summary}) == 45
        assert len(rows((in_tmp / "out" / "resilience.csv").read_text())) == 40
        assert not (in_tmp / "out" / "diagnostics.txt").exists()

    def test_bogus_characteristic(self, in_tmp):
        assert main(["sweep", "--characteristic", "bogus"]) == 2

    def test_unknown_algorithm_list(self, in_tmp):
        assert main(["sweep", "--characteristic", "ratio", "--algorithms", "rs,sa"]) == 2

    def test_partial_failure_writes_diagnostics(self, in_tmp, capsys):
        code = main(["sweep", "--characteristic", "local_optima", "--dims", "1",
                     "--boundary", "10", "--smoothness", "10", "--algorithms", "rs",
                     "--runs", "2", "--budget", "50", "--out-dir", "out"])
        diag = in_tmp / "out" / "diagnostics.txt"
        summary = rows((in_tmp / "out" / "summary.csv").read_text())
        assert code == 0
        assert diag.exists() and "ResamplingExhausted" in diag.read_text()
        assert [r["value"] for r in summary] == ["0", "1", "2"]

    def test_total_failure_exits_one(self, in_tmp):
        code = main(["sweep", "--characteristic", "boundary", "--local-optima", "9",
                     "--dims", "1", "--smoothness", "1", "--algorithms", "rs", "--runs", "1",
                     "--budget", "5", "--out-dir", "out"])
        assert code == 1
        assert len((in_tmp / "out" / "diagnostics.txt").read_text().splitlines()) == 10
        assert not (in_tmp / "out" / "summary.csv").exists()

    def test_jobs_do_not_change_output(self, in_tmp):
        args = ["sweep", "--characteristic", "ratio", "--algorithms", "rs,hs,ga",
                "--runs", "3", "--budget", "120"]
        main(args + ["--jobs", "1", "--out-dir", "a"])
        main(args + ["--jobs", "2", "--out-dir", "b"])
        for name in ("records.csv", "summary.csv", "resilience.csv", "radar_hs.svg"):
            assert (in_tmp / "a" / name).read_bytes() == (in_tmp / "b" / name).read_bytes()


class TestVerify:
    def test_default_landscape(self, in_tmp, capsys):
        main(["generate", "--out", "l.json"])
        capsys.readouterr()
        assert main(["verify", "--landscape", "l.json"]) == 0
        assert capsys.readouterr().out.strip() == "expected 4, found 4"

    def test_zero_local_optima(self, in_tmp, capsys):
        main(["generate", "--local-optima", "0", "--out", "l.json"])
        capsys.readouterr()
        assert main(["verify", "--landscape", "l.json"]) == 0
        assert capsys.readouterr().out.strip() == "expected 1, found 1"

    def test_high_dimension(self, in_tmp):
        main(["generate", "--dims", "10", "--out", "l.json"])
        assert main(["verify", "--landscape", "l.json"]) == 2

    def test_mismatch_exits_one(self, in_tmp, capsys):
        # two bumps so close that the weaker one has no basin
        from msgbench.landscape import make_landscape

        save_landscape(make_landscape([[10.0, 10.0], [10.5, 10.0]], [1.0, 0.5], sigma=3.0),
                       in_tmp / "l.json")
        assert main(["verify", "--landscape", "l.json"]) == 1
        assert capsys.readouterr().out.strip() == "expected 2, found 1"


class TestReport:
    def test_rebuild_from_records(self, in_tmp):
        main(["sweep", "--characteristic", "ratio", "--algorithms", "rs,pso", "--runs", "3",
              "--budget", "100", "--out-dir", "a"])
        assert main(["report", "--records", "a/records.csv", "--out-dir", "b"]) == 0
        for name in ("summary.csv", "resilience.csv", "radar_rs.svg", "radar_pso.svg"):
            assert (in_tmp / "a" / name).read_bytes() == (in_tmp / "b" / name).read_bytes()

    def test_missing_records_flag(self, in_tmp):
        assert main(["report"]) == 2


class TestConfig:
    def test_flag_beats_file_beats_default(self, in_tmp, capsys):
        (in_tmp / "c.json").write_text(json.dumps({"local_optima": 0, "dims": 1, "seed": 9,
                                                   "out": "from_file.json"}))
        assert main(["generate", "--config", "c.json", "--dims", "2"]) == 0
        landscape = load_landscape("from_file.json")
        assert landscape.spec == LandscapeSpec(num_local_optima=0, dimensions=2, seed=9)

    def test_bad_config_file(self, in_tmp):
        (in_tmp / "c.json").write_text("[1, 2]")
        assert main(["generate", "--config", "c.json"]) == 2
        assert main(["generate", "--config", "missing.json"]) == 2

    def test_sweep_records_resolved_config(self, in_tmp):
        main(["sweep", "--characteristic", "ratio", "--algorithms", "rs", "--runs", "2",
              "--budget", "40", "--out-dir", "out"])
        saved = json.loads((in_tmp / "out" / "config.json").read_text())
        assert saved["runs"] == 2 and saved["population"] == 50 and saved["range"] == 10.0


class TestHelp:
    EXPECTED = {
        "--local-optima": "3", "--ratio": "0.5", "--dims": "2", "--boundary": "30.0",
        "--smoothness": "15.0", "--runs": "100", "--budget": "20000", "--population": "50",
        "--range": "10.0", "--tolerance": "0.0001", "--characteristic": "all",
        "--landscapes-per-value": "1", "--jobs": "1", "--seed": "0", "--out-dir": "results",
    }

    def _help(self, command, capsys):
        with pytest.raises(SystemExit) as exc:
            main([command, "--help"])
        assert exc.value.code == 0
        return " ".join(capsys.readouterr().out.split())

    def test_sweep_defaults(self, capsys):
        text = self._help("sweep", capsys)
        for flag, default in self.EXPECTED.items():
            assert re.search(re.escape(flag) + r" \S+ .*?\(default: " + re.escape(default) + r"\)", text), flag

    def test_every_flag_documented(self, capsys):
        seen = set()
        for command in ("generate", "run", "sweep", "verify", "report"):
            text = self._help(command, capsys)
            seen |= set(re.findall(r"--[a-z][a-z-]+", text))
            assert text.count("(default:") >= 1
        required = {"--local-optima", "--ratio", "--dims", "--boundary", "--smoothness", "--seed",
                    "--algo", "--algorithms", "--runs", "--budget", "--population", "--range",
                    "--tolerance", "--characteristic", "--landscapes-per-value", "--jobs",
                    "--out", "--out-dir", "--config"}
        assert required <= seen

    def test_default_table_matches_library(self):
        assert (DEFAULTS["local_optima"], DEFAULTS["ratio"], DEFAULTS["dims"],
                DEFAULTS["boundary"], DEFAULTS["smoothness"]) == (3, 0.5, 2, 30.0, 15.0)
        assert build_parser().prog == "msgbench"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "msgbench", "generate", "--out",
                           str(tmp_path / "l.json")], capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "l.json").exists()
