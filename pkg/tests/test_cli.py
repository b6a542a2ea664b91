import json
from importlib import resources
from pathlib import Path

from phonesim.cli import main

DATA = Path(str(resources.files("phonesim").joinpath("data")))
SCENARIOS = DATA / "scenarios"
SCRIPTS = DATA / "scripts"


def test_validate_pack_exits_zero(capsys):
    assert main(["validate", "--scenarios", str(SCENARIOS)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_validate_broken_scenario_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 1\nid: bad\napps: [EmailApp]\n"
                   "start_time: '2025-01-01 08'\nvalidation: []\n", "utf-8")
    assert main(["validate", "--scenarios", str(bad)]) == 1


def test_run_and_report_roundtrip(tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "run",
        "--scenarios", str(SCENARIOS / "apartment_budget.yaml"),
        "--user-policy", f"scripted:{SCRIPTS / 'apartment_user.yaml'}",
        "--assistant-policy", f"scripted:{SCRIPTS / 'apartment_assistant.yaml'}",
        "--runs", "4", "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    records_path = next(out.rglob("records.jsonl"))
    records = [json.loads(line) for line in records_path.read_text().splitlines()]
    assert len(records) == 4
    assert all(r["success"] for r in records)
    assert {r["run_index"] for r in records} == {0, 1, 2, 3}
    manifest = json.loads((records_path.parent / "manifest.json").read_text())
    assert manifest["runs"] == 4

    assert main(["report", "--records", str(out), "--runs", "4"]) == 0
    report = json.loads((out / "report.json").read_text())
    cell = report["cells"][0]
    assert cell["success_rate"] == 1.0
    assert cell["acceptance_rate"] == 1.0
    assert (out / "report.txt").exists() and (out / "report.csv").exists()


def test_run_is_deterministic_across_invocations(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        main(["run",
              "--scenarios", str(SCENARIOS / "apartment_budget.yaml"),
              "--user-policy", f"scripted:{SCRIPTS / 'apartment_user.yaml'}",
              "--assistant-policy", f"scripted:{SCRIPTS / 'apartment_assistant.yaml'}",
              "--runs", "2", "--seed", "5", "--out", str(out)])
        outs.append(next(out.rglob("records.jsonl")).read_text())
    assert outs[0] == outs[1]


def test_sweep_creates_one_directory_per_cell(tmp_path):
    out = tmp_path / "sweep"
    code = main(["run",
                 "--scenarios", str(SCENARIOS / "reject_path.yaml"),
                 "--user-policy", "noop", "--assistant-policy", "noop",
                 "--runs", "1", "--noise-rate", "0,2", "--failure-prob", "0,0.1",
                 "--jobs", "2", "--out", str(out)])
    assert code == 0
    cells = sorted(p.name for p in out.iterdir() if p.is_dir())
    assert cells == ["cell_noise0_fail0", "cell_noise0_fail0.1",
                     "cell_noise2_fail0", "cell_noise2_fail0.1"]
    for cell in cells:
        records = [json.loads(line) for line in
                   (out / cell / "records.jsonl").read_text().splitlines()]
        assert records[0]["noise_rate"] in (0.0, 2.0)
        assert records[0]["failure_prob"] in (0.0, 0.1)


def test_oracle_run_writes_event_logs(tmp_path):
    out = tmp_path / "oracle"
    code = main(["run", "--oracle",
                 "--scenarios", str(SCENARIOS / "email_reply.yaml"),
                 "--out", str(out)])
    assert code == 0
    records = [json.loads(line) for line in
               (out / "oracle_records.jsonl").read_text().splitlines()]
    assert records[0]["success"] is True
    assert (out / "oracle_email_reply.eventlog.jsonl").exists()


def test_report_uneven_counts_exits_one(tmp_path, capsys):
    out = tmp_path / "r"
    out.mkdir()
    with open(out / "records.jsonl", "w") as fh:
        for i, sid in enumerate(["a", "a", "b"]):
            fh.write(json.dumps({
                "scenario_id": sid, "run_index": i % 2, "seed": 0, "success": True,
                "proposals": [], "read_actions_observe": 0, "read_actions_total": 0,
                "turns_used": 1, "model": "m", "noise_rate": 0, "failure_prob": 0,
            }) + "\n")
    assert main(["report", "--records", str(out), "--runs", "2"]) == 1
