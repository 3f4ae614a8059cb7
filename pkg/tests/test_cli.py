import json

from isinglab.cli import build_parser, main
from isinglab.errors import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_SCHEMA
from isinglab.lab.report import make_report


def test_parser_reads_shapes_and_window():
    args = build_parser().parse_args(
        ["spectral", "--shapes", "2x2", "2X3", "--window", "1", "4", "-j", "2"]
    )

    assert args.shapes == [[2, 2], [2, 3]]
    assert args.window == [1.0, 4.0]
    assert args.workers == 2


def test_arm_small_sizes(tmp_path, capsys):
    out = tmp_path / "arm"
    assert main(["arm", "-L", "0", "1", "-o", str(out)]) == EXIT_OK
    assert "arm: 1 records" in capsys.readouterr().out
    assert (out / "arm.csv").read_text().splitlines()[0] == "L,m,m_err"


def test_autocorr_plot_data(tmp_path, capsys):
    out = tmp_path / "autocorr"
    code = main(
        ["autocorr", "-L", "1", "--replicas", "200", "--t-max", "2", "--ratio", "1.5",
         "--seed", "2", "-o", str(out)]
    )
    assert code == EXIT_OK
    capsys.readouterr()

    assert main(["plot-data", str(out)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,C,C_err,series"
    assert lines[1].startswith("0.0,1.0,0.0,autocorr_torus-2x2")


def test_plot_data_selector(tmp_path, capsys):
    out = tmp_path / "shell"
    assert main(["shellsum", "-L", "10", "100", "1000", "--delta", "0.25", "-o", str(out)]) == 0
    capsys.readouterr()

    main(["plot-data", str(out), "--select", "nothing-matches"])
    assert capsys.readouterr().out.splitlines() == ["abscissa,value,stderr,series"]
    main(["plot-data", str(out), "--select", "shellsum"])
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_invalid_configurations_exit_2(tmp_path):
    out = str(tmp_path / "never")
    assert main(["verify", "-L", "-1", "-o", out]) == EXIT_INVALID
    assert main(["autocorr", "--replicas", "1", "-o", out]) == EXIT_INVALID
    assert main(["verify", "--family", "kawasaki", "-o", out]) == EXIT_INVALID
    assert main(["fit", "-o", out]) == EXIT_INVALID


def test_missing_config_file_exits_3(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "absent.toml")]) == EXIT_IO


def test_schema_mismatch_exits_4(tmp_path, capsys):
    good = tmp_path / "good"
    assert main(["shellsum", "-L", "10", "100", "-o", str(good)]) == 0
    stale = tmp_path / "stale"
    stale.mkdir()
    line = json.loads((good / "records.jsonl").read_text().splitlines()[0])
    line["schema_version"] = 0
    (stale / "records.jsonl").write_text(json.dumps(line) + "\n")
    capsys.readouterr()

    assert main(["plot-data", str(good), str(stale)]) == EXIT_SCHEMA
    assert "schema mismatch" in capsys.readouterr().err


def test_runs_are_deterministic(tmp_path):
    payloads = []
    for name in ("one", "two"):
        out = tmp_path / name
        assert main(["arm", "-L", "0", "1", "--seed", "4", "-o", str(out)]) == 0
        record = json.loads((out / "records.jsonl").read_text())
        payloads.append((record["config_digest"], record["payload"]))
    assert payloads[0] == payloads[1]


def test_lab_seed_overrides_flag(tmp_path, monkeypatch):
    monkeypatch.setenv("LAB_SEED", "21")
    out = tmp_path / "seeded"
    assert main(["shellsum", "-L", "10", "100", "--seed", "3", "-o", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 21


def test_failed_check_exits_1(tmp_path, capsys, monkeypatch):
    def broken_check(d, delta, L_list):
        return [make_report("shell_sum_bounded", 2.0, 1.0)]

    monkeypatch.setattr("isinglab.lab.core.experiments.shell_sum_check", broken_check)
    out = tmp_path / "broken"

    assert main(["shellsum", "-L", "10", "100", "-o", str(out)]) == EXIT_CHECK_FAILED
    assert "FAIL  shell_sum_bounded" in capsys.readouterr().err
    assert json.loads((out / "manifest.json").read_text())["status"] == EXIT_CHECK_FAILED
