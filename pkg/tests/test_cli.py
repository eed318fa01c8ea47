from __future__ import annotations

import json

import pytest

from mzvkit.cli import main
from mzvkit.sweep import RELATIONS, parse_config


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestStuffleDual:
    @pytest.mark.parametrize(
        "w1, w2, expected",
        [("xy", "xy", "2*xyxy + xxxy"), ("x", "y", "yx"), ("", "xy", "xy"), ("x", "xy", "xyx")],
    )
    def test_stuffle(self, capsys, w1, w2, expected):
        code, out, _ = run(capsys, "stuffle", w1, w2)
        assert code == 0 and out.strip() == expected

    def test_stuffle_bad_word(self, capsys):
        code, _, err = run(capsys, "stuffle", "xz", "y")
        assert code == 2 and "error" in err

    @pytest.mark.parametrize("k, expected", [("3", "2,1"), ("4", "2,1,1"), ("2", "2"), ("3,1", "3,1")])
    def test_dual(self, capsys, k, expected):
        code, out, _ = run(capsys, "dual", k)
        assert code == 0 and out.strip() == expected

    def test_dual_not_admissible(self, capsys):
        assert run(capsys, "dual", "1")[0] == 2


class TestEval:
    def test_zeta2(self, capsys):
        code, out, _ = run(capsys, "eval", "--index", "2", "--json")
        rec = json.loads(out)
        assert code == 0 and rec["value"].startswith("1.6449340668482264")
        assert float(rec["err"]) < 1e-60

    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "eval", "--index", "2,1")
        assert code == 0 and out.startswith("zeta(2,1) = 1.20205690315959")

    def test_poly_and_dn(self, capsys):
        assert run(capsys, "eval", "--poly", "xy - xxy")[0] == 0
        assert run(capsys, "eval", "--index", "2", "--dn", "1")[0] == 0

    def test_biseq(self, capsys):
        code, out, _ = run(capsys, "eval", "--biseq", "1,1", "--lambda", "1/2", "--lambda", "0", "--json")
        lines = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and [r["lambda"] for r in lines] == ["1/2", "0"]
        assert lines[0]["value"].startswith("2.77258872223978")

    def test_bad_lambda(self, capsys):
        assert run(capsys, "eval", "--biseq", "1,1", "--lambda", "2")[0] == 2

    def test_tail_modes_agree(self, capsys):
        values = []
        for mode in ("euler-maclaurin", "richardson", "bound-only"):
            code, out, _ = run(capsys, "eval", "--index", "3", "--tail", mode, "--prec", "64", "--json")
            assert code == 0
            values.append(float(json.loads(out)["value"]))
        assert max(values) - min(values) < 1e-8


class TestCheck:
    def test_negative_lambda(self, capsys):
        code, out, _ = run(capsys, "check", "fg", "--biseq", "1,2", "--lambda", "-1/2", "--lambda", "1/3")
        assert code == 0 and len(out.splitlines()) == 2

    def test_ohno_single(self, capsys):
        code, out, _ = run(capsys, "check", "ohno", "--index", "3", "--shift", "1")
        assert code == 0 and "ohno" in out

    def test_fg_json(self, capsys):
        code, out, _ = run(capsys, "check", "fg", "--biseq", "2,1", "--lambda", "1/3", "--json")
        rec = json.loads(out)
        assert code == 0 and rec["pass"] is True and rec["relation"] == "fg"

    def test_family(self, capsys):
        code, out, err = run(capsys, "check", "duality", "--max-weight", "4")
        assert code == 0 and len(out.splitlines()) == 1 + 2 + 4
        assert "duality" in err

    def test_failing_check_exits_one(self, capsys):
        # residue reconstruction at n_max=2 is far from f
        code, _, _ = run(capsys, "check", "residue", "--biseq", "1,1", "--n-max", "2", "--tol", "1e-8")
        assert code == 1

    def test_missing_input(self, capsys):
        code, _, err = run(capsys, "check", "fg")
        assert code == 2 and "--biseq" in err

    def test_bad_tolerance(self, capsys):
        assert run(capsys, "check", "fg", "--biseq", "2,1", "--tol", "0")[0] == 2

    def test_unknown_relation(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["check", "nope"])
        assert exc.value.code == 2


class TestSweep:
    CONFIG = "# small sweep\nmax_weight = 3\nlambdas = 1/3\nrelations = ohno, fg, duality\nshifts = 1\n"

    def test_runs_and_is_deterministic(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(self.CONFIG)
        first = run(capsys, "sweep", str(cfg))
        second = run(capsys, "sweep", str(cfg))
        assert first[0] == 0 and first[1] == second[1]
        records = [json.loads(line) for line in first[1].splitlines()]
        assert {r["relation"] for r in records} == {"ohno", "fg", "duality"}
        assert all(r["pass"] for r in records)
        assert "relation" in first[2]

    def test_out_file(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(self.CONFIG)
        out = tmp_path / "report.jsonl"
        code, stdout, _ = run(capsys, "sweep", str(cfg), "--out", str(out))
        assert code == 0 and stdout == ""
        assert all(json.loads(line)["pass"] for line in out.read_text().splitlines())

    def test_empty_relations(self, capsys, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("relations =\n")
        code, _, err = run(capsys, "sweep", str(cfg))
        assert code == 2 and "empty" in err

    @pytest.mark.parametrize("text", ["max_weight\n", "max_weight = x\n", "colour = red\n", "tail_mode = simpson\n"])
    def test_malformed(self, capsys, tmp_path, text):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text(text)
        code, _, err = run(capsys, "sweep", str(cfg))
        assert code == 2 and "line 1" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "sweep", str(tmp_path / "absent.cfg"))[0] == 2


def test_config_defaults():
    cfg = parse_config("")
    assert cfg.max_weight == 6 and set(cfg.relations) <= set(RELATIONS)
