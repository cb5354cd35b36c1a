"""Command-line interface: subcommands, outputs, exit codes."""

import json

import pytest

from ludilite import Prediction, save_instances, save_predictions
from ludilite.cli import EXIT_INPUT, EXIT_OK, main


@pytest.fixture()
def ttt_file(tmp_path, ttt_text):
    path = tmp_path / "ttt.lud"
    path.write_text(ttt_text, encoding="utf-8")
    return str(path)


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_validate_shipped_game(capsys, ttt_file):
    code, out = run(capsys, ["validate", ttt_file])
    assert code == EXIT_OK
    assert "grammar reward: 1" in out
    assert "accepted: True" in out


def test_validate_reports_failure_offset(capsys, tmp_path, ttt_text):
    path = tmp_path / "bad.lud"
    path.write_text(ttt_text.replace("players", "playerz"), encoding="utf-8")
    code, out = run(capsys, ["validate", str(path)])
    assert code == EXIT_OK
    assert "first failure at offset" in out


def test_validate_missing_file(capsys):
    assert main(["validate", "/nonexistent.lud"]) == EXIT_INPUT


def test_compile_and_probe(capsys, ttt_file):
    code, out = run(capsys, ["compile", ttt_file])
    assert code == EXIT_OK
    assert "'Tic-Tac-Toe'" in out
    assert "functional: yes" in out


def test_compile_failure_reason(capsys, tmp_path, ttt_text):
    path = tmp_path / "bad.lud"
    path.write_text(ttt_text.replace("(players 2)", "(players 0)"), encoding="utf-8")
    code, out = run(capsys, ["compile", str(path)])
    assert code == EXIT_INPUT
    assert "players must be >= 1" in out


def test_playout_deterministic_output(capsys, ttt_file):
    code1, out1 = run(capsys, ["playout", ttt_file, "-n", "3", "--seed", "5"])
    code2, out2 = run(capsys, ["playout", ttt_file, "-n", "3", "--seed", "5"])
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    assert out1.count("seed ") == 3


def test_concepts_json(capsys, ttt_file):
    code, out = run(capsys, ["concepts", ttt_file, "-n", "10", "--seed", "0"])
    assert code == EXIT_OK
    concepts = json.loads(out)
    assert set(concepts) == {
        "decision_moves", "coverage", "timeout_rate", "balance", "completion", "extended",
    }


def test_reward_table(capsys, tmp_path, ttt_file):
    bad = tmp_path / "bad.lud"
    bad.write_text("xyz", encoding="utf-8")
    code, out = run(
        capsys,
        ["reward", ttt_file, ttt_file, str(bad),
         "--playouts-gt", "12", "--playouts-pred", "6"],
    )
    assert code == EXIT_OK
    assert "r_g" in out and "advantages:" in out
    assert "compile-error" in out


def test_reward_json_mode(capsys, ttt_file):
    code, out = run(
        capsys,
        ["reward", ttt_file, ttt_file, "--json",
         "--playouts-gt", "12", "--playouts-pred", "6"],
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["breakdowns"][0]["r_g"] == 1.0
    assert payload["advantages"] == [0.0]


def test_eval_table_and_report(capsys, tmp_path, corpus):
    instances = [inst for inst in corpus if inst.id in ("tic-tac-toe", "quad-draw")]
    inst_path = tmp_path / "instances.jsonl"
    save_instances(instances, inst_path)
    predictions = [Prediction(i.id, "0", i.description) for i in instances]
    pred_path = tmp_path / "predictions.jsonl"
    save_predictions(predictions, pred_path)
    report_path = tmp_path / "report.json"
    code, out = run(
        capsys,
        ["eval", "--instances", str(inst_path), "--predictions", str(pred_path),
         "--out", str(report_path),
         "--playouts-gt", "12", "--playouts-pred", "6"],
    )
    assert code == EXIT_OK
    assert "Compilability" in out and "NCD" in out
    report = json.loads(report_path.read_text())
    assert report["compilability"]["mean"] == 100.0
    assert report["config"]["playouts_gt"] == 12
    assert len(report["rows"]) == 2


def test_eval_unknown_id(capsys, tmp_path, corpus):
    instances = [corpus[0]]
    inst_path = tmp_path / "instances.jsonl"
    save_instances(instances, inst_path)
    pred_path = tmp_path / "predictions.jsonl"
    save_predictions([Prediction("ghost", "0", "x")], pred_path)
    code, out = run(
        capsys,
        ["eval", "--instances", str(inst_path), "--predictions", str(pred_path)],
    )
    assert code == EXIT_INPUT
    assert "ghost" in out


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["no-such-command"])
    assert err.value.code == 2
