from __future__ import annotations

import io
import json

import pytest

from palperm.errors import EXIT_GUARD, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED, ParseError
from palperm.main import build_parser, main, parse_range, resolve_config


def run_cli(config_file, *argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = main([*argv, "--config", str(config_file)], stdout=out, stderr=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


def test_classify_reversal(config_file):
    code, out, _ = run_cli(config_file, "classify", "3,2,1")
    assert code == EXIT_OK
    assert "N_lambda = 123123 = (123)(123)" in out
    assert "rpp=true" in out and "gspp=true" in out


def test_classify_identity(config_file):
    code, out, _ = run_cli(config_file, "classify", "1,2,3")
    assert code == EXIT_OK
    assert "lpp=true" in out and "rpp=false" in out


def test_classify_cycle_syntax(config_file):
    code, out, _ = run_cli(config_file, "classify", "(1 2 4 3)", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["permutation"] == "2,4,1,3"
    assert payload["flags"]["lgspp"] is False and payload["flags"]["rgspp"] is False


def test_classify_parse_error(config_file):
    code, out, err = run_cli(config_file, "classify", "1,x,3")
    assert code == EXIT_USAGE
    assert out == ""
    assert "position 3" in err


def test_census_text(config_file):
    code, out, _ = run_cli(config_file, "census", "-n", "3")
    assert code == EXIT_OK
    assert "gspp_l=4 gspp_r=4 gspp=2" in out


def test_census_json_s2(config_file):
    code, out, _ = run_cli(config_file, "census", "-n", "2", "--format", "json")
    assert code == EXIT_OK
    counts = json.loads(out)["counts"]
    assert (counts["gspp_l"], counts["gspp_r"], counts["gspp"]) == (2, 2, 2)


def test_census_repeat_hits_cache_with_identical_bytes(config_file, tmp_path):
    first = run_cli(config_file, "census", "-n", "6", "--format", "json")
    second = run_cli(config_file, "census", "-n", "6", "--format", "json")
    assert first[0] == second[0] == EXIT_OK
    assert first[1] == second[1]
    assert len(list((tmp_path / "cache").glob("*.json"))) == 1


def test_census_timings_flag(config_file):
    code, out, _ = run_cli(config_file, "census", "-n", "4", "--format", "json", "--timings", "--no-cache")
    assert code == EXIT_OK
    assert "elapsed" in json.loads(out)


def test_census_guard(config_file):
    code, _, err = run_cli(config_file, "census", "-n", "13")
    assert code == EXIT_GUARD
    assert "13" in err


def test_verify_dihedral(config_file):
    code, out, _ = run_cli(config_file, "verify", "dihedral", "3..8")
    assert code == EXIT_OK
    assert sum(line.startswith("dihedral pass") for line in out.splitlines()) == 6


def test_verify_dihedral_rejects_degree_two(config_file):
    code, _, _ = run_cli(config_file, "verify", "dihedral", "2..4")
    assert code == EXIT_USAGE


def test_verify_uniqueness(config_file):
    code, out, _ = run_cli(config_file, "verify", "uniqueness", "2..7")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "uniqueness: all pass"


def test_verify_inverse_reports_right_class_failure(config_file):
    code, out, _ = run_cli(config_file, "verify", "inverse", "2..5", "--format", "json")
    assert code == EXIT_VERIFICATION_FAILED
    payload = json.loads(out)
    failing = {(row["n"], row["class"]) for row in payload["results"] if not row["holds"]}
    assert failing == {(4, "rgspp"), (5, "rgspp")}


def test_verify_inverse_other_classes_pass(config_file):
    code, _, _ = run_cli(config_file, "verify", "inverse", "2..7", "--classes", "lpp,rpp,lgspp")
    assert code == EXIT_OK


def test_verify_inverse_guard(config_file):
    code, _, _ = run_cli(config_file, "verify", "inverse", "10")
    assert code == EXIT_GUARD


def test_verify_klein(config_file):
    code, out, _ = run_cli(config_file, "verify", "klein")
    assert code == EXIT_OK
    assert "permutation=4,3,2,1" in out


def test_sequences_csv(config_file):
    code, out, _ = run_cli(config_file, "sequences", "4", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "n,gspp_r,gspp_l,gspp,residual,holds"
    assert lines[2] == "2,2,2,2,0,true"
    assert lines[3] == "3,4,4,2,0,true"
    assert lines[4] == "4,10,10,2,6,false"


def test_witness_dump(config_file):
    code, out, _ = run_cli(config_file, "witness", "-n", "4")
    assert code == EXIT_OK
    assert "permutation=2,4,1,3" in out
    assert "rpv=12342413" in out


def test_generators(config_file):
    code, out, _ = run_cli(config_file, "generators", "3")
    assert code == EXIT_OK
    assert "sigma=2,3,1 tau=1,3,2" in out


def test_bad_config_path(tmp_path):
    out, err = io.StringIO(), io.StringIO()
    code = main(["census", "-n", "3", "--config", str(tmp_path / "none.yaml")], stdout=out, stderr=err)
    assert code == EXIT_USAGE
    assert "not found" in err.getvalue()


def test_flags_override_environment(config_file):
    args = build_parser().parse_args(["census", "-n", "3", "--config", str(config_file), "--workers", "2"])
    cfg = resolve_config(args, {"PALPERM_WORKERS": "5", "PALPERM_CACHE_DIR": "/tmp/elsewhere"})
    assert cfg.census.workers == 2
    assert cfg.census.cache_dir == "/tmp/elsewhere"


def test_unknown_subcommand_exits_with_usage():
    with pytest.raises(SystemExit) as exc_info:
        build_parser().parse_args(["tabulate"])
    assert exc_info.value.code == EXIT_USAGE


@pytest.mark.parametrize(
    "text, expected",
    [("3..8", (3, 8)), ("5", (5, 5)), (" 2 .. 4 ", (2, 4))],
)
def test_parse_range(text, expected):
    assert parse_range(text) == expected


def test_parse_range_open_start():
    assert parse_range("6", open_start=1) == (1, 6)


@pytest.mark.parametrize("text", ["8..3", "a..b", "0..2", ""])
def test_parse_range_errors(text):
    with pytest.raises(ParseError):
        parse_range(text)


def test_census_survives_unusable_cache_dir(config_file, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code, out, _ = run_cli(config_file, "census", "-n", "3", "--cache-dir", str(blocker / "sub"))
    assert code == EXIT_OK
    assert "gspp_l=4 gspp_r=4 gspp=2" in out
