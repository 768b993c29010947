import pytest
import yaml
from pydantic import ValidationError

from utils.configLoader import SEED_ENV_VAR, ConfigLoader, ExperimentConfig, loadExperimentConfig


def writeConfig(path, **sections):
    with open(path, "w") as f:
        yaml.safe_dump(sections, f)
    return str(path)


def testSectionsAreFlattened(tmp_path):
    path = writeConfig(
        tmp_path / "config.yaml",
        model={"gamma": 1.3, "alpha": 0.1, "beta": 0.9},
        lattice={"nList": [8, 32, 128]},
        simulation={"seed": 17, "replicas": 2},
    )
    loader = ConfigLoader(path)
    errMsg = "section getters should return the raw YAML sections"
    assert loader.getModelConfig()["gamma"] == 1.3 and loader.getOutputConfig() == {}, errMsg

    config = loadExperimentConfig(path, environ={})
    errMsg = "flattened config did not pick up the YAML values"
    assert config.gamma == 1.3 and config.nList == [8, 32, 128], errMsg
    assert config.seed == 17 and config.replicas == 2 and config.numBatches == 32, errMsg


def testSeedPrecedence(tmp_path):
    path = writeConfig(tmp_path / "config.yaml", simulation={"seed": 17})
    fromEnv = loadExperimentConfig(path, environ={SEED_ENV_VAR: "99"})
    fromFlag = loadExperimentConfig(path, overrides={"seed": 5, "outDir": None}, environ={SEED_ENV_VAR: "99"})
    errMsg = "the environment overrides the file and explicit overrides win over both"
    assert fromEnv.seed == 99 and fromFlag.seed == 5, errMsg
    assert fromFlag.outDir == "results", errMsg


def testDefaultTimes():
    config = ExperimentConfig()
    errMsg = "default burn-in and measurement times follow the configured factors"
    assert config.measureTime(64) == pytest.approx(50.0 * 64**1.5), errMsg
    assert config.burnTime(64, 2.0) == pytest.approx(10.0 * 64 * 64 / 2.0), errMsg
    fixed = ExperimentConfig(tBurn=3.0, tMeasure=7.0)
    assert fixed.burnTime(64, 2.0) == 3.0 and fixed.measureTime(64) == 7.0, errMsg


@pytest.mark.parametrize(
    "values",
    [
        {"gamma": 2.0},
        {"gamma": 1.0},
        {"alpha": 0.0},
        {"beta": 1.5},
        {"nList": [16, 8]},
        {"nList": [2, 8]},
        {"kind": "train"},
        {"convergenceList": [8, 16], "convergenceA": 0.2},
        {"exactMaxN": 20},
    ],
)
def testInvalidValuesAreRejected(values):
    with pytest.raises(ValidationError):
        ExperimentConfig(**values)


def testLoaderSectionsFeedTheExperimentConfig(tmp_path, monkeypatch):
    path = writeConfig(tmp_path / "config.yaml", simulation={"replicas": 2}, output={"plots": True})
    monkeypatch.setattr(ConfigLoader, "getSimulationConfig", lambda self: {"replicas": 9})
    monkeypatch.setattr(ConfigLoader, "getOutputConfig", lambda self: None)
    config = loadExperimentConfig(path, environ={})
    errMsg = "loadExperimentConfig should read each section through the loader getters"
    assert config.replicas == 9 and config.plots is True, errMsg
