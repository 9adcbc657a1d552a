import pytest

from specscan import __version__
from specscan.cli import build_parser, config_from_args, main

QUICK = """
spectrum.radius = 30
spectrum.min_separation = 5
spectrum.max_separation = 8
measurement.step = 0.01
"""


@pytest.fixture
def config_file(tmpdir):
    path = tmpdir.join("quick.conf")
    path.write_text(QUICK, encoding="utf-8")
    return str(path)


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == "specscan " + __version__


def test_mode_required():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_overrides(config_file, tmpdir):
    args = build_parser().parse_args([
        "music", "--config", config_file, "--seed", "5", "--reps", "3",
        "--out", str(tmpdir), "--archive",
    ])
    config = config_from_args(args)
    assert config.mode == "music"
    assert config["run.seed"] == 5
    assert config["run.repetitions"] == 3
    assert config["run.output"] == str(tmpdir)
    assert config["run.archive"] is True
    assert config["spectrum.radius"] == 30.0


def test_synth(config_file, tmpdir):
    out = tmpdir.join("out")
    status = main([
        "synth", "--config", config_file, "--out", str(out), "--quiet",
    ])
    assert status == 0
    assert out.join("trials.jsonl").check()
    assert out.join("measurement_0000.json").check()


def test_bad_config(tmpdir):
    path = tmpdir.join("bad.conf")
    path.write_text("scan.lambda = fast\n", encoding="utf-8")
    assert main(["scan", "--config", str(path), "--quiet"]) == 2


def test_missing_config(tmpdir):
    path = str(tmpdir.join("missing.conf"))
    assert main(["scan", "--config", path, "--quiet"]) == 2


def test_infeasible(tmpdir):
    path = tmpdir.join("coarse.conf")
    path.write_text(
        "spectrum.radius = 30\nmeasurement.step = 0.5\n", encoding="utf-8"
    )
    out = str(tmpdir.join("out"))
    assert main([
        "scan", "--config", str(path), "--out", out, "--quiet",
    ]) == 2
