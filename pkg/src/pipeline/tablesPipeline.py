import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from continuum.fickLaw import FickConstant, computeFickConstant
from continuum.profile import buildProfile
from jumps.convergence import convergenceReport, decayRatios
from jumps.jumpLaw import buildJumpLaw
from utils.configLoader import ExperimentConfig

logger = logging.getLogger(__name__)


class TablesPipeline:
    """Deterministic tables: operator convergence, the profile on its node grid, the Fick constant."""

    def __init__(self, config: ExperimentConfig, outDir: Optional[str] = None):
        self.config = config
        self.outDir = Path(outDir or config.outDir)

    def operatorConvergence(self) -> pd.DataFrame:
        print("=" * 70)
        print(f"OPERATOR CONVERGENCE  gamma={self.config.gamma} a={self.config.convergenceA}")
        print("=" * 70)
        law = buildJumpLaw(self.config.gamma, self.config.kMax)
        report = convergenceReport(law, self.config.convergenceList, self.config.convergenceA,
                                   epsSplit=self.config.epsSplit)
        self.outDir.mkdir(parents=True, exist_ok=True)
        report.to_csv(self.outDir / "convergence.csv", index=False)
        print(report.to_string(index=False))
        if len(report) > 1:
            ratios = decayRatios(report)
            print(f"Tail-error decay per doubling: {np.array2string(ratios, precision=3)}")
        return report

    def profileTable(self) -> pd.DataFrame:
        print("=" * 70)
        print(f"PROFILE TABLE  gamma={self.config.gamma} alpha={self.config.alpha} beta={self.config.beta}")
        print("=" * 70)
        profile = buildProfile(self.config.gamma, self.config.alpha, self.config.beta, self.config.chebyshevNodes)
        table = profile.nodeTable()
        self.outDir.mkdir(parents=True, exist_ok=True)
        table.to_csv(self.outDir / "profile_table.csv", index=False)
        print(f"{len(table)} nodes written; rho_bar(1/2) = {profile(0.5):.10f}")
        return table

    def fickConstant(self) -> FickConstant:
        print("=" * 70)
        print(f"FICK CONSTANT  gamma={self.config.gamma} alpha={self.config.alpha} beta={self.config.beta}")
        print("=" * 70)
        constant = computeFickConstant(self.config.gamma, self.config.alpha, self.config.beta,
                                       nodes=self.config.chebyshevNodes)
        self.outDir.mkdir(parents=True, exist_ok=True)
        with open(self.outDir / "fick_constant.json", "w") as f:
            json.dump(constant.toRecord(), f, indent=2, sort_keys=True)
        print(f"J_infinity = {constant.jInfinity:.10f}  phi route = {constant.routePhi:.10f}  "
              f"x-spread = {constant.spread:.2e}")
        return constant
