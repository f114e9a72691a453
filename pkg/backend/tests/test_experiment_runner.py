# backend/tests/test_experiment_runner.py
import json

import pytest

import cli
from models import ExperimentSpec
from services.experiment_runner import HANDLERS, render, run
from storage import parse_kernel_file, parse_rule_file, parse_window_csv, read_text
from constants import COMMANDS, EXIT_DOMAIN_ERROR, EXIT_OK
from workbench.ca_engine import ca_compose, eca
from workbench.shared import error_handler

SUM_OF_NEIGHBOURS = "prime 2\ndim 1\nA: 1\ne: 1\na: 1\n"


@pytest.fixture
def kernel_file(tmp_path):
    path = tmp_path / "kernel.txt"
    path.write_text(SUM_OF_NEIGHBOURS)
    return str(path)


def test_every_command_has_a_handler():
    assert sorted(HANDLERS) == sorted(COMMANDS)
    assert sorted(cli.COMMAND_OPTIONS) == sorted(COMMANDS)


def test_marked_dist():
    result = run(ExperimentSpec(command="marked-dist", group1="cyclic:4", group2="cyclic:6", rmax=8))
    assert result.ok
    assert render(result) == "agreement radius: 3\n"
    assert result.data["radius"] == {"kind": "exactly", "radius": 3}


def test_marked_dist_lower_bound():
    result = run(ExperimentSpec(command="marked-dist", group1="free:1", group2="zd:1", rmax=5))
    assert result.lines == ["agreement radius: >= 5"]


def test_json_is_canonical():
    spec = ExperimentSpec(command="hb-dist", group1="cyclic:8", group2="free:1", rmax=6)
    first, second = render(run(spec), "json"), render(run(spec), "json")
    assert first == second
    data = json.loads(first)
    assert list(data) == sorted(data)
    assert data["radius"] == {"kind": "exactly", "radius": 3}


def test_ca_apply():
    result = run(ExperimentSpec(command="ca-apply", rule="eca:90", config="0,0,0,1", period=4))
    assert render(result) == "1,0,1,0\n"
    assert result.data["output"] == [1, 0, 1, 0]


def test_ca_apply_on_finite_group():
    result = run(ExperimentSpec(command="ca-apply", rule="eca:90", config="0,0,0,1", group="cyclic:4"))
    assert result.lines == ["1,0,1,0"]


def test_ca_apply_period_mismatch():
    result = run(ExperimentSpec(command="ca-apply", rule="eca:90", config="0,0,0,1", period=3))
    assert result.exit_code == 2
    assert "--period" in result.error


def test_ca_compose_dump(tmp_path):
    path = tmp_path / "out" / "composed.rule"
    result = run(ExperimentSpec(command="ca-compose", rule="eca:30", rule2="eca:90", dump=str(path)))
    assert result.ok
    parsed = parse_rule_file(read_text(str(path)))
    expected = ca_compose(eca(30), eca(90))
    assert (parsed.memory, parsed.rule) == (expected.memory, expected.rule)


def test_fix_window_csv_dump(tmp_path):
    path = tmp_path / "fix.csv"
    result = run(ExperimentSpec(command="fix-window", group="cyclic:4", radius=2, dump=str(path)))
    assert result.data["count"] == 16
    assert len(parse_window_csv(read_text(str(path))).patterns) == 16
    assert render(result, "csv").splitlines()[0] == "e,a,A,aa,AA"


def test_nothing_to_dump(tmp_path):
    result = run(ExperimentSpec(command="surj-1d", rule="eca:0", dump=str(tmp_path / "x")))
    assert result.exit_code == 1


def test_ca_synthesize_reports_equivalence():
    result = run(ExperimentSpec(command="ca-synthesize", rule="eca:90", bound=2, minimize=True))
    assert result.data["equivalent"] is True
    assert result.data["memory"] == ["A", "a"]


@pytest.mark.parametrize("rule, surjective, injective", [
    ("eca:0", False, False),
    ("eca:90", True, False),
    ("eca:15", True, True),
])
def test_one_dimensional_deciders(rule, surjective, injective):
    surj = run(ExperimentSpec(command="surj-1d", rule=rule))
    inj = run(ExperimentSpec(command="inj-1d", rule=rule))
    assert surj.lines == [f"surjective: {str(surjective).lower()}"]
    assert inj.data["injective"] is injective


def test_inj_1d_on_memoryless_rule(tmp_path):
    path = tmp_path / "collapse.rule"
    path.write_text("rank 1\nalphabet 2\nmemory e\n0 -> 0\n1 -> 0\n")
    result = run(ExperimentSpec(command="inj-1d", rule=f"file:{path}"))
    assert result.lines == ["injective: false"]


def test_unexpected_errors_become_domain_errors(monkeypatch):
    def broken(spec):
        raise RuntimeError("handler blew up")

    monkeypatch.setitem(HANDLERS, "surj-1d", broken)
    result = run(ExperimentSpec(command="surj-1d", rule="eca:30"))
    assert result.exit_code == EXIT_DOMAIN_ERROR
    assert (result.error, result.error_type) == ("handler blew up", "RuntimeError")
    assert error_handler.get_error_stats()["by_exit_code"] == {1: 1}


def test_lin_decide(kernel_file):
    result = run(ExperimentSpec(command="lin-decide", kernel=kernel_file, group="cyclic:6"))
    assert result.lines == ["verdict: non-injective, non-surjective", "rank: 4/6"]


def test_lin_inverse(kernel_file, tmp_path):
    path = tmp_path / "inverse.txt"
    result = run(ExperimentSpec(command="lin-inverse", kernel=kernel_file, group="cyclic:4", dump=str(path)))
    assert result.ok
    assert parse_kernel_file(read_text(str(path))).p == 2


def test_lin_inverse_of_singular_kernel(kernel_file):
    result = run(ExperimentSpec(command="lin-inverse", kernel=kernel_file, group="cyclic:6"))
    assert result.exit_code == 1
    assert result.error_type == "NotInvertible"
    assert error_handler.get_error_stats()["total_errors"] == 1


def test_stable_finite_trials():
    result = run(ExperimentSpec(command="stable-finite", group="sym:3", trials=5, seed=1))
    assert result.lines == ["confirmed: 5/5"]


def test_stable_finite_needs_input():
    assert run(ExperimentSpec(command="stable-finite", group="sym:3")).exit_code == 2


def test_gromov_radius():
    result = run(ExperimentSpec(command="gromov-radius", rule="eca:15"))
    assert result.lines[-1] == "radius: 2"


def test_transfer_check_on_fix_subshift():
    result = run(ExperimentSpec(command="transfer-check", rule="eca:15", subshift="fix:cyclic:4", max_period=4))
    assert result.ok
    assert result.lines[-1] == "counterexamples: 0"
    assert render(result, "csv").splitlines()[0] == "family,contained,injective,status"


def test_unknown_subshift():
    result = run(ExperimentSpec(command="gromov-radius", rule="eca:15", subshift="sofic"))
    assert result.exit_code == 2


def test_converge_downgrade():
    result = run(ExperimentSpec(command="converge", groups=["cyclic:6", "cyclic:24"], limit="free:1", rule="eca:90"))
    assert result.lines[0] == "mode: surjectivity-only"
    assert result.lines[-1].startswith("verdict: ")


def test_psi_bounds_default_groups():
    result = run(ExperimentSpec(command="psi-bounds"))
    assert result.data["violations"] == 0
    assert result.lines[-1] == "violations: 0"


@pytest.mark.parametrize("spec, code", [
    (dict(command="marked-dist", group1="cyclic:4"), 2),
    (dict(command="marked-dist", group1="cyclic:x", group2="cyclic:6"), 2),
    (dict(command="ca-apply", rule="eca:300", config="0,1"), 1),
    (dict(command="fix-window", group="cyclic:4", radius=2, cap=1), 3),
    (dict(command="stable-finite", group="sym:9", trials=1), 3),
    (dict(command="stable-finite", group="sym:1", trials=1), 2),
])
def test_exit_codes(spec, code):
    result = run(ExperimentSpec(**spec))
    assert result.exit_code == code
    assert result.error
    assert render(result) == ""


# ===== CLI =====

def test_cli_marked_dist(capsys):
    code = cli.main(["marked-dist", "--group1", "cyclic:4", "--group2", "cyclic:6", "--rmax", "8"])
    assert code == 0
    assert capsys.readouterr().out == "agreement radius: 3\n"


def test_cli_ca_apply(capsys):
    code = cli.main(["ca-apply", "--rule", "eca:90", "--config", "0,0,0,1", "--period", "4"])
    assert code == 0
    assert capsys.readouterr().out == "1,0,1,0\n"


def test_cli_surj_1d(capsys):
    assert cli.main(["surj-1d", "--rule", "eca:0"]) == 0
    assert capsys.readouterr().out == "surjective: false\n"


def test_cli_json_format(capsys):
    assert cli.main(["inj-1d", "--rule", "eca:51", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["injective"] is True


def test_cli_errors_go_to_stderr(capsys):
    assert cli.main(["marked-dist", "--group1", "cyclic:4"]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "error: marked-dist needs --group2" in captured.err


def test_cli_parse_errors(capsys):
    assert cli.main(["bogus"]) == 2
    assert cli.main(["marked-dist", "--rmax", "many"]) == 2
    assert cli.main(["marked-dist", "--group1", "a", "--group2", "b", "--rmax", "-1"]) == 2
    assert "rmax" in capsys.readouterr().err


def test_cli_help_exits_cleanly(capsys):
    assert cli.main(["--help"]) == EXIT_OK


def test_cli_metrics_summary(capsys):
    assert cli.main(["--metrics", "surj-1d", "--rule", "eca:30"]) == 0
    err = capsys.readouterr().err
    summary = json.loads(err[err.index("{"):])
    assert "runner.command,command=surj-1d" in summary["metrics"]["events"]
    assert summary["errors"]["total_errors"] == 0
