import math
import subprocess
import sys

import pytest

from thermoshift.cli import ConfigError, main, parse_config

GOLDEN_THEOREM1 = """
[shift]
system = golden-range2

[experiment]
kind = theorem1
trials = 8
seed = 5
"""


def run_main(args):
    return main(args)


def test_parse_minimal_config():
    cfg = parse_config(GOLDEN_THEOREM1)
    assert cfg.kind == "theorem1"
    assert cfg.seed == 5
    assert cfg.shift.n == 2
    assert cfg.phi.depth == 2


def test_parse_explicit_shift_and_tables():
    cfg = parse_config(
        """
[shift]
states = a b
edges = aa ab ba

[potential]
range = 2
value "aa" = 0.25
value "ab" = -0.4
value "ba" = 0.1

[observable occ]
value "a" = 1.0
default = 0.0

[measure walk]
p "aa" = 0.5
p "ab" = 0.5
p "ba" = 1.0

[experiment]
kind = theorem2
observable = occ
measure = walk
"""
    )
    assert cfg.phi.evaluate((0, 1)) == -0.4
    assert cfg.observables["occ"].evaluate((1,)) == 0.0
    assert cfg.measures["walk"][0] == "fixed"


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[shift]\nbuiltin = golden-mean\nnonsense line\n")
    with pytest.raises(ConfigError, match="line 4.*not admissible"):
        parse_config(
            "[shift]\nbuiltin = golden-mean\n[potential]\n"
            'value "bb" = 1.0\n[experiment]\nkind = pressure\n'
        )
    with pytest.raises(ConfigError, match="unknown experiment kind"):
        parse_config("[shift]\nbuiltin = full-2\n[experiment]\nkind = nope\n")
    with pytest.raises(ConfigError, match="undefined observable"):
        parse_config(
            "[shift]\nbuiltin = full-2\n[experiment]\nkind = corollary3\n"
            "observable = ghost\n"
        )
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config("[shift]\nbuiltin = full-2\n")


def test_parse_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(
            "[shift]\nbuiltin = full-2\nbuiltin = full-2\n[experiment]\nkind = pressure\n"
        )


def test_list_builtins(capsys):
    assert run_main(["--list-builtins"]) == 0
    out = capsys.readouterr().out
    assert "golden-mean" in out
    assert "tribonacci" in out
    assert "full2-bernoulli" in out


def test_missing_config_is_usage_error(tmp_path, capsys):
    assert run_main(["run", str(tmp_path / "missing.cfg")]) == 2


def test_theorem1_csv_contract(tmp_path):
    cfg = tmp_path / "t1.cfg"
    cfg.write_text(GOLDEN_THEOREM1)
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "theorem1.csv").read_text().splitlines()
    assert lines[0] == "trial,seed,pressure_gap,f_norm,lhs,rhs,slack,vacuous"
    assert len(lines) == 9
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "5"
    assert float(first[6]) >= 0.0
    assert first[7] == "false"


def test_determinism_byte_identical(tmp_path):
    cfg = tmp_path / "t1.cfg"
    cfg.write_text(GOLDEN_THEOREM1)
    one, two = tmp_path / "one", tmp_path / "two"
    assert run_main(["run", str(cfg), "--out", str(one)]) == 0
    assert run_main(["run", str(cfg), "--out", str(two)]) == 0
    assert (one / "theorem1.csv").read_bytes() == (two / "theorem1.csv").read_bytes()


def test_seed_override_changes_rows(tmp_path):
    cfg = tmp_path / "t1.cfg"
    cfg.write_text(GOLDEN_THEOREM1)
    one, two = tmp_path / "one", tmp_path / "two"
    assert run_main(["run", str(cfg), "--out", str(one)]) == 0
    assert run_main(["run", str(cfg), "--out", str(two), "--seed", "99"]) == 0
    assert (one / "theorem1.csv").read_bytes() != (two / "theorem1.csv").read_bytes()


def test_pressure_experiment(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("[shift]\nbuiltin = golden-mean\n[experiment]\nkind = pressure\n")
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    rows = dict(
        line.split(",") for line in (out / "pressure.csv").read_text().splitlines()[1:]
    )
    golden = math.log((1.0 + math.sqrt(5.0)) / 2.0)
    assert float(rows["pressure"]) == pytest.approx(golden, abs=1e-10)
    assert float(rows["b"]) == pytest.approx(
        (1.0 / math.sqrt(2.0) + math.sqrt(2.0)) * float(rows["a"]), abs=1e-12
    )


def test_gibbs_experiment(tmp_path):
    cfg = tmp_path / "g.cfg"
    cfg.write_text(
        "[shift]\nsystem = full2-bernoulli\n[experiment]\nkind = gibbs\nn-max = 6\n"
    )
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    row = (out / "gibbs.csv").read_text().splitlines()[1].split(",")
    assert abs(float(row[3]) - 1.0) <= 1e-12


def test_partition_sums_experiment(tmp_path):
    cfg = tmp_path / "ps.cfg"
    cfg.write_text(
        "[shift]\nbuiltin = golden-mean\n[experiment]\nkind = partition-sums\nn = 1..10\n"
    )
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "partition-sums.csv").read_text().splitlines()
    assert lines[0] == "n,enumeration,matrix,rel_err,rate,residual"
    assert len(lines) == 11


def test_corollary1_experiment(tmp_path):
    cfg = tmp_path / "c1.cfg"
    cfg.write_text(
        "[shift]\nmodel = geometric(0.5)\n"
        '[observable occ]\nvalue "1" = 1.0\n'
        "[experiment]\nkind = corollary1\nn = 2..20\nobservable = occ\n"
    )
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    lines = (out / "corollary1.csv").read_text().splitlines()
    assert len(lines) == 20
    for line in lines[1:]:
        n, gap = line.split(",")[:2]
        assert float(gap) == pytest.approx(-math.log(1.0 - 2.0 ** -int(n)), abs=1e-12)


def test_corollary2_needs_short_range(tmp_path, capsys):
    cfg = tmp_path / "c2.cfg"
    cfg.write_text(
        "[shift]\nbuiltin = golden-mean\n"
        "[potential]\nrange = 3\ndefault = 0.1\n"
        "[experiment]\nkind = corollary2\n"
    )
    assert run_main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 2
    assert "range at most 2" in capsys.readouterr().err


def test_identities_experiment(tmp_path, capsys):
    cfg = tmp_path / "id.cfg"
    cfg.write_text("[experiment]\nkind = identities\ntrials = 3\nk-max = 6\nn-max = 6\n")
    out = tmp_path / "out"
    assert run_main(["run", str(cfg), "--out", str(out)]) == 0
    text = (out / "identities.csv").read_text()
    assert text.splitlines()[0] == "system,check,value,tolerance,ok"
    assert "cohomology" in text
    assert "kl-pressure" in text
    assert ",false" not in text
    summary = capsys.readouterr().out
    assert "result: PASS" in summary


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "thermoshift.cli", "--list-builtins"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "golden-mean" in proc.stdout
