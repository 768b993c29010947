import json

import pytest
import yaml

import main as cli


def writeConfig(path, **model):
    with open(path, "w") as f:
        yaml.safe_dump({"model": model, "output": {"plots": False}}, f)
    return str(path)


def testInvalidConfigurationIsAUsageError(tmp_path):
    config = writeConfig(tmp_path / "config.yaml", gamma=2.5)
    errMsg = "gamma outside (1, 2) should exit with status 2"
    assert cli.main(["validate", "--config", config, "--out", str(tmp_path)]) == cli.EXIT_USAGE, errMsg
    assert not (tmp_path / "manifest.json").exists(), errMsg


def testUnknownCommandIsRejected():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["train"])
    assert excinfo.value.code == 2, "argparse should reject unknown experiments with status 2"


@pytest.mark.slow
def testProfileTableRun(tmp_path):
    config = writeConfig(tmp_path / "config.yaml", gamma=1.5, alpha=0.2, beta=0.8)
    out = tmp_path / "results"
    code = cli.main(["profile-table", "--config", config, "--out", str(out), "--seed", "7"])
    errMsg = "profile-table should succeed and write its table and manifest"
    assert code == cli.EXIT_OK, errMsg
    assert (out / "profile_table.csv").exists(), errMsg
    with open(out / "manifest.json") as f:
        manifest = json.load(f)
    assert manifest["exitCode"] == 0 and manifest["config"]["seed"] == 7, errMsg
