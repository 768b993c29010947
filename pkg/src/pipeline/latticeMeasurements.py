import logging
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from jobs.replicaJob import ReplicaJobRunner, ReplicaTask
from jumps.jumpLaw import JumpLaw
from lattice.exactGenerator import buildExactGenerator, solveStationary
from lattice.rateCatalog import buildRateCatalog
from observables.current import CurrentEvaluator
from observables.empiricalMeasures import EmpiricalMeasures
from observables.estimates import (
    ProfileEstimate,
    RunEstimate,
    mergeEstimates,
    mergeOutputs,
    profileEstimate,
    stationaryCurrentEstimate,
)
from utils.configLoader import ExperimentConfig
from utils.manifest import RunManifest

logger = logging.getLogger(__name__)


class LatticeMeasurement(BaseModel):
    """Stationary means at one N, either exact (zero stderr) or from merged KMC replicas."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    N: int
    method: str
    meanOccupation: np.ndarray
    stderrOccupation: np.ndarray
    w1: RunEstimate
    w1Flux: RunEstimate
    weakForms: Dict[str, RunEstimate] = {}
    twoPoint: Optional[np.ndarray] = None

    @property
    def positions(self) -> np.ndarray:
        return np.arange(1, self.N) / self.N


def _exactEstimate(name: str, value: float) -> RunEstimate:
    return RunEstimate(observable=name, mean=value, stderr=0.0, totalTime=float("inf"), numBatches=0)


def measureExact(law: JumpLaw, N: int, alpha: float, beta: float,
                 testFunctions: Optional[Dict[str, Callable]] = None, nExactMax: int = 14) -> LatticeMeasurement:
    gen = buildExactGenerator(N, law, alpha, beta, nExactMax)
    mu = solveStationary(gen)
    means = gen.meanOccupations(mu)
    w1 = CurrentEvaluator(law, N, alpha, beta).w1(means)
    positions = np.arange(1, N) / N
    weakForms = {
        name: _exactEstimate(f"pi_N[{name}]", float(np.dot(means, H(positions))) / (N - 1))
        for name, H in (testFunctions or {}).items()
    }
    return LatticeMeasurement(
        N=N,
        method="exact",
        meanOccupation=means,
        stderrOccupation=np.zeros_like(means),
        w1=_exactEstimate("W1", w1),
        w1Flux=_exactEstimate("W1_flux", w1),
        weakForms=weakForms,
        twoPoint=gen.twoPointMatrix(mu),
    )


def replicaTasks(config: ExperimentConfig, law: JumpLaw, N: int, tMeasure: Optional[float] = None,
                 useJit: Optional[bool] = None) -> List[ReplicaTask]:
    catalog = buildRateCatalog(law, N, config.alpha, config.beta)
    tBurn = config.burnTime(N, catalog.pairTotalRate)
    tMeasure = config.measureTime(N) if tMeasure is None else tMeasure
    return [
        ReplicaTask(
            N=N,
            gamma=config.gamma,
            alpha=config.alpha,
            beta=config.beta,
            kMax=config.kMax,
            seed=config.seed,
            replicaId=replicaId,
            tBurn=tBurn,
            tMeasure=tMeasure,
            numBatches=config.numBatches,
            blockSize=config.resyncEvery,
            useJit=useJit,
        )
        for replicaId in range(config.replicas)
    ]


def measureKmc(config: ExperimentConfig, law: JumpLaw, N: int, runner: ReplicaJobRunner,
               testFunctions: Optional[Dict[str, Callable]] = None, manifest: Optional[RunManifest] = None,
               tMeasure: Optional[float] = None, useJit: Optional[bool] = None) -> LatticeMeasurement:
    tasks = replicaTasks(config, law, N, tMeasure, useJit)
    if manifest is not None:
        manifest.burnIn[f"N={N}"] = tasks[0].tBurn
        for task in tasks:
            manifest.recordSeed(N, task.replicaId, task.seed)

    outputs = runner.run(tasks)
    currents = [stationaryCurrentEstimate(output) for output in outputs]
    merged = mergeOutputs(outputs)
    profile: ProfileEstimate = profileEstimate(merged, testFunctions)
    drift = max(output.maxW1Drift for output in outputs)
    logger.info(f"N={N}: {len(outputs)} replicas, max W1 resync drift {drift:.2e}")
    return LatticeMeasurement(
        N=N,
        method="kmc",
        meanOccupation=profile.means,
        stderrOccupation=profile.stderrs,
        w1=mergeEstimates([functional for functional, _ in currents]),
        w1Flux=mergeEstimates([flux for _, flux in currents]),
        weakForms=profile.weakForms,
    )


def measureLattice(config: ExperimentConfig, law: JumpLaw, N: int, runner: ReplicaJobRunner,
                   testFunctions: Optional[Dict[str, Callable]] = None,
                   manifest: Optional[RunManifest] = None) -> LatticeMeasurement:
    """Exact solve up to exactMaxN, KMC above."""
    if N <= config.exactMaxN:
        return measureExact(law, N, config.alpha, config.beta, testFunctions, config.exactMaxN)
    return measureKmc(config, law, N, runner, testFunctions, manifest)


def agreementScore(exact: LatticeMeasurement, kmc: LatticeMeasurement) -> float:
    """Largest |kmc - exact| / sigma over every site mean and W_1."""
    sigmas = np.maximum(kmc.stderrOccupation, 1e-300)
    siteScore = float(np.max(np.abs(kmc.meanOccupation - exact.meanOccupation) / sigmas))
    currentScore = abs(kmc.w1.mean - exact.w1.mean) / max(kmc.w1.stderr, 1e-300)
    return max(siteScore, currentScore)


def pairDefect(measurement: LatticeMeasurement, H: Callable, G: Callable) -> float:
    """<pi_hat^N, H x G> - <pi^N, H><pi^N, G> from the stationary two-point function."""
    if measurement.twoPoint is None:
        raise ValueError(f"N={measurement.N} {measurement.method} measurement carries no two-point function")
    return EmpiricalMeasures(measurement.meanOccupation, measurement.N, measurement.twoPoint).pairDefect(H, G)
