import os
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

SEED_ENV_VAR = "LONGJUMP_SEED"
EXPERIMENT_KINDS = (
    "hydrostatics",
    "fick-scaling",
    "operator-convergence",
    "validate",
    "profile-table",
    "fick-constant",
)


class ConfigLoader:
    def __init__(self, configPath="config/config.yaml"):
        self.configPath = Path(configPath)
        self.config = self._loadConfig()

    def _loadConfig(self):
        with open(self.configPath, "r") as file:
            return yaml.safe_load(file) or {}

    def getExperimentConfig(self):
        return self.config.get("experiment", {})

    def getModelConfig(self):
        return self.config.get("model", {})

    def getLatticeConfig(self):
        return self.config.get("lattice", {})

    def getSimulationConfig(self):
        return self.config.get("simulation", {})

    def getQuadratureConfig(self):
        return self.config.get("quadrature", {})

    def getOutputConfig(self):
        return self.config.get("output", {})


class ExperimentConfig(BaseModel):
    kind: str = "validate"
    gamma: float = 1.5
    alpha: float = 0.2
    beta: float = 0.8
    kMax: int = Field(default=2**20, ge=4)

    nList: List[int] = Field(default_factory=lambda: [8, 16, 32, 64, 128, 256, 512])
    exactMaxN: int = Field(default=12, ge=2, le=14)
    convergenceList: List[int] = Field(default_factory=lambda: [2**k for k in range(6, 13)])
    convergenceA: float = Field(default=0.2, gt=0.0, lt=0.5)

    tBurn: Optional[float] = Field(default=None, ge=0.0)
    tMeasure: Optional[float] = Field(default=None, ge=0.0)
    burnFactor: float = Field(default=10.0, gt=0.0)
    measureFactor: float = Field(default=50.0, gt=0.0)
    numBatches: int = Field(default=32, ge=1)
    replicas: int = Field(default=4, ge=1)
    threads: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    resyncEvery: int = Field(default=2**16, ge=1)

    epsSplit: float = Field(default=1e-3, gt=0.0)
    hFloor: float = Field(default=1e-5, gt=0.0)
    epsAbs: float = Field(default=1e-10, gt=0.0)
    chebyshevNodes: int = Field(default=129, ge=8)
    mcWalkers: int = Field(default=10**6, ge=1)

    outDir: str = "results"
    plots: bool = True

    @field_validator("kind")
    @classmethod
    def _knownKind(cls, value):
        if value not in EXPERIMENT_KINDS:
            raise ValueError(f"experiment kind must be one of {EXPERIMENT_KINDS}, got {value!r}")
        return value

    @field_validator("gamma")
    @classmethod
    def _gammaRange(cls, value):
        if not 1.0 < value < 2.0:
            raise ValueError(f"gamma must lie in (1, 2), got {value}")
        return value

    @field_validator("alpha", "beta")
    @classmethod
    def _densityRange(cls, value):
        if not 0.0 < value < 1.0:
            raise ValueError(f"reservoir densities must lie in (0, 1), got {value}")
        return value

    @field_validator("nList", "convergenceList")
    @classmethod
    def _sortedSizes(cls, value):
        if not value:
            raise ValueError("N list must not be empty")
        if any(n < 4 for n in value):
            raise ValueError(f"every N must be at least 4, got {value}")
        if list(value) != sorted(value):
            raise ValueError(f"N list must be sorted ascending, got {value}")
        return value

    @model_validator(mode="after")
    def _convergenceResolvesA(self):
        if min(self.convergenceList) * self.convergenceA < 2.0:
            raise ValueError(
                f"convergenceA={self.convergenceA} needs N >= {2.0 / self.convergenceA:.0f}"
            )
        return self

    def burnTime(self, N: int, pairTotalRate: float) -> float:
        if self.tBurn is not None:
            return self.tBurn
        return self.burnFactor * N * N / pairTotalRate

    def measureTime(self, N: int) -> float:
        if self.tMeasure is not None:
            return self.tMeasure
        return self.measureFactor * float(N) ** self.gamma


def loadExperimentConfig(
    configPath: Optional[str] = None, overrides: Optional[Dict] = None, environ: Optional[Dict] = None
) -> ExperimentConfig:
    """Flatten the YAML sections, then apply LONGJUMP_SEED and explicit overrides in that order."""
    values: Dict = {}
    if configPath is not None:
        loader = ConfigLoader(configPath)
        for section in (
            loader.getExperimentConfig(),
            loader.getModelConfig(),
            loader.getLatticeConfig(),
            loader.getSimulationConfig(),
            loader.getQuadratureConfig(),
            loader.getOutputConfig(),
        ):
            values.update(section or {})

    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR):
        values["seed"] = int(environ[SEED_ENV_VAR])

    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    return ExperimentConfig(**values)
