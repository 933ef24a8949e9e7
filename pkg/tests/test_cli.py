"""Tests for the command-line interface: parsing, config echo,
exit codes, output determinism, and the table cache.

Functional paths run in-process through cli.main; the bit-identity
checks spawn real subprocesses so they cover the full stdout pipeline.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from primelab import cli

CLI = [sys.executable, "-m", "primelab"]


def run_main(argv, capsys):
    """Invoke cli.main in-process and return (exit_code, stdout)."""
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


class TestParsing:
    def test_parse_count_scientific(self):
        assert cli.parse_count("1e6") == 1_000_000
        assert cli.parse_count("250") == 250

    def test_parse_count_rejects_garbage(self):
        import argparse
        for bad in ("abc", "-5", "0", "1.5", "inf"):
            with pytest.raises(argparse.ArgumentTypeError):
                cli.parse_count(bad)

    def test_parse_ladder(self):
        assert cli.parse_ladder("1e3,1e5,1e7") == (1000, 100_000, 10_000_000)
        import argparse
        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_ladder("1e5,1e3")

    def test_parse_keyvals(self):
        assert cli.parse_keyvals("rho=0.3,C=-0.5") == {"rho": "0.3", "C": "-0.5"}
        import argparse
        with pytest.raises(argparse.ArgumentTypeError):
            cli.parse_keyvals("rho=0.3,rho=0.4")


class TestExitCodes:
    def test_argparse_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["correlate", "--n", "xyz", "--r", "5", "--pattern", "0:1"])
        assert exc.value.code == 2

    def test_precondition_returns_3(self, capsys):
        # omega with A = sqrt(h log N) >= h
        code, _ = run_main(
            ["omega", "--n", "1e4", "--h", "5", "--r", "16",
             "--rho", "0.3", "--c", "-0.5"], capsys)
        assert code == 3

    def test_success_returns_0(self, capsys):
        code, out = run_main(
            ["correlate", "--n", "2000", "--r", "8", "--pattern", "0:1,2:1"],
            capsys)
        assert code == 0
        assert out.startswith("# schema = primelab-correlate-csv-v1\n")


class TestConfigEcho:
    def test_csv_echo_sorted_and_complete(self, capsys):
        code, out = run_main(
            ["correlate", "--n", "2000", "--r-exp", "0.25",
             "--pattern", "0:1,2:1"], capsys)
        assert code == 0
        echo = [l for l in out.splitlines() if l.startswith("# ")]
        keys = [l.split(" = ")[0][2:] for l in echo[1:]]  # after schema line
        assert keys == sorted(keys)
        assert "N" in keys and "R" in keys and "backend" in keys
        # resolved R = round(2000^0.25) echoed as a concrete integer
        assert any(l.startswith("# R = ") for l in echo)

    def test_threads_never_echoed(self, capsys):
        """--threads must not influence output bytes, so it is excluded."""
        code, out = run_main(
            ["correlate", "--n", "2000", "--r", "8", "--pattern", "0:1",
             "--threads", "4"], capsys)
        assert code == 0
        assert "threads" not in out

    def test_json_schema_version_and_config(self, capsys):
        code, out = run_main(
            ["singular", "--pattern", "0:1,2:1"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["schema_version"] == 1
        assert payload["command"] == "singular"
        assert payload["config"]["p_cut"] == 1_000_000
        assert len(payload["rows"]) == 1

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "out.csv"
        code, out = run_main(
            ["lambda", "--r", "4", "--n", "6", "--output", str(path)], capsys)
        assert code == 0
        assert out == ""
        text = path.read_text()
        assert text.startswith("# schema = primelab-lambda-csv-v1\n")
        assert text.splitlines()[-1].startswith("6,")


class TestSubcommands:
    def test_sieve_stats(self, capsys):
        code, out = run_main(["sieve", "--n-max", "1e4"], capsys)
        assert code == 0
        row = out.splitlines()[-1].split(",")
        assert row[0] == "10000" and row[1] == "1229" and row[3] == "-23"

    def test_lambda_exact_crosscheck(self, capsys):
        code, out = run_main(["lambda", "--r", "10", "--n", "30", "--exact"],
                             capsys)
        assert code == 0
        assert "# denominator = " in out

    def test_moments_first_moment(self, capsys):
        code, out = run_main(
            ["moments", "--n", "5000", "--h", "25", "--first-moment"], capsys)
        assert code == 0
        assert "True,True" in out  # both exact route comparisons

    def test_moments_exact_expand_identity(self, capsys):
        code, out = run_main(
            ["moments", "--n", "1500", "--k", "2", "--h", "6", "--r", "12",
             "--exact", "--expand"], capsys)
        assert code == 0
        assert "# mode = psi_R" in out

    def test_moments_omega_inline(self, capsys):
        code, out = run_main(
            ["moments", "--n", "1e4", "--h", "40", "--r-exp", "0.3",
             "--omega", "rho=0.3,C=-0.5"], capsys)
        assert code == 0
        assert "# command = omega" in out

    def test_omega_coupled_C(self, capsys):
        code, out = run_main(
            ["omega", "--n", "1e4", "--h", "40", "--r-exp", "0.3",
             "--rho", "0.3", "--c", "couple"], capsys)
        assert code == 0
        echoed_C = [l for l in out.splitlines() if l.startswith("# C = ")]
        assert echoed_C and "couple" not in echoed_C[0]
        float(echoed_C[0].split(" = ")[1])  # a concrete solved float

    def test_lemma_json_report(self, capsys):
        code, out = run_main(
            ["lemma", "--which", "2", "--ladder", "1e3,1e4"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["config"]["which"] == 2
        assert len(payload["rows"]) == 2
        assert {"which", "x", "lhs", "main", "scaled_error"} == set(payload["rows"][0])

    def test_lemma_params_routing(self, capsys):
        code, out = run_main(
            ["lemma", "--which", "4", "--ladder", "1e3",
             "--params", "j=2,variant=log"], capsys)
        assert code == 0
        assert json.loads(out)["config"]["params"] == "j=2,variant=log"

    def test_lemma_custom_polynomials(self, capsys):
        code, out = run_main(
            ["lemma", "--which", "1", "--ladder", "1e3",
             "--params", "p1=-1:-1:1,p2=-1:3:-3:1,k=1"], capsys)
        assert code == 0

    def test_singular_sn_mode(self, capsys):
        code, out = run_main(["singular", "--sn", "2", "--j", "6"], capsys)
        assert code == 0
        assert json.loads(out)["rows"][0]["finite_part"] == "4"


class TestCache:
    def test_sieve_cache_roundtrip(self, tmp_path, capsys, monkeypatch):
        from primelab.tables import CACHE_DIR_ENV
        monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path))
        code1, out1 = run_main(["sieve", "--n-max", "3000"], capsys)
        cached = list(tmp_path.iterdir())
        assert cached, "expected a cache file to be written"
        code2, out2 = run_main(["sieve", "--n-max", "3000"], capsys)
        assert code1 == code2 == 0
        # cache_dir is echoed, so bytes match between build and load paths
        assert out1 == out2


class TestDeterminism:
    CELLS = [
        ["correlate", "--n", "3000", "--r-exp", "0.25", "--pattern", "0:1,2:1"],
        ["moments", "--n", "3000", "--k", "2", "--h", "10", "--r", "10",
         "--format", "json"],
        ["lemma", "--which", "2", "--ladder", "1e3,3e3"],
        ["singular", "--pattern", "0:1,4:1"],
    ]

    @pytest.mark.parametrize("cell", CELLS, ids=[c[0] for c in CELLS])
    def test_bit_identical_across_threads(self, cell):
        """Re-running with a different --threads value must give the same
        bytes on stdout (full subprocess pipeline)."""
        env = dict(os.environ)
        runs = []
        for threads in ("1", "7"):
            proc = subprocess.run(
                CLI + cell + ["--threads", threads],
                capture_output=True, env=env, timeout=300)
            assert proc.returncode == 0, proc.stderr.decode()
            runs.append(proc.stdout)
        assert runs[0] == runs[1]
