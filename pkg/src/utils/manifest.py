import json
import platform
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import scipy
from pydantic import BaseModel, Field

from utils.configLoader import ExperimentConfig

CODE_VERSION = "1.0.0"


class RunManifest(BaseModel):
    """Everything needed to rerun an experiment; written as manifest.json next to the outputs."""

    command: str
    config: ExperimentConfig
    codeVersion: str = CODE_VERSION
    cGamma: float
    replicaSeeds: List[Dict[str, int]] = Field(default_factory=list)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    burnIn: Dict[str, float] = Field(default_factory=dict)
    numbaAvailable: bool = False
    versions: Dict[str, str] = Field(
        default_factory=lambda: {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        }
    )
    startedAt: datetime = Field(default_factory=datetime.now)
    finishedAt: Optional[datetime] = None
    wallClockSeconds: Optional[float] = None
    exitCode: Optional[int] = None

    def recordSeed(self, N: int, replicaId: int, seed: int):
        self.replicaSeeds.append({"N": int(N), "replicaId": int(replicaId), "seed": int(seed)})

    def finish(self, exitCode: int):
        self.finishedAt = datetime.now()
        self.wallClockSeconds = (self.finishedAt - self.startedAt).total_seconds()
        self.exitCode = exitCode

    def save(self, outDir) -> Path:
        path = Path(outDir) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(json.loads(self.model_dump_json()), f, indent=2, sort_keys=True)
        return path
