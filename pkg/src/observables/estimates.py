import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from lattice.kmcSimulator import EventCounters, TrajectoryOutput
from observables.empiricalMeasures import EmpiricalMeasures

logger = logging.getLogger(__name__)

MIN_CONFIDENT_BATCHES = 20


class RunEstimate(BaseModel):
    observable: str
    mean: float
    stderr: float
    totalTime: float
    numBatches: int
    replicaId: int = 0
    lowConfidence: bool = False
    valid: bool = True

    def within(self, target: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.stderr

    def spansZero(self, sigmas: float = 3.0) -> bool:
        return abs(self.mean) <= sigmas * self.stderr


def batchMeansEstimate(
    observable: str, batchValues: np.ndarray, totalTime: float, replicaId: int = 0
) -> RunEstimate:
    """Mean and batch-means standard error from equal-length batch averages."""
    batchValues = np.asarray(batchValues, dtype=np.float64)
    count = batchValues.size
    if count == 0 or totalTime <= 0.0:
        return RunEstimate(
            observable=observable,
            mean=float("nan"),
            stderr=float("nan"),
            totalTime=float(totalTime),
            numBatches=count,
            replicaId=replicaId,
            lowConfidence=True,
            valid=False,
        )

    mean = float(batchValues.mean())
    stderr = float(batchValues.std(ddof=1) / math.sqrt(count)) if count > 1 else float("inf")
    lowConfidence = count < MIN_CONFIDENT_BATCHES
    if lowConfidence:
        logger.warning(f"{observable}: only {count} batches, estimate flagged low-confidence")
    return RunEstimate(
        observable=observable,
        mean=mean,
        stderr=stderr,
        totalTime=float(totalTime),
        numBatches=count,
        replicaId=replicaId,
        lowConfidence=lowConfidence,
    )


def stationaryCurrentEstimate(output: TrajectoryOutput) -> Tuple[RunEstimate, RunEstimate]:
    """Time average of W_1 and, as a cross-check, the net left-reservoir particle flux."""
    functional = batchMeansEstimate("W1", output.batchW1, output.tMeasure, output.replicaId)
    flux = batchMeansEstimate("W1_flux", output.batchFlux, output.tMeasure, output.replicaId)
    return functional, flux


def currentsAgree(functional: RunEstimate, flux: RunEstimate, sigmas: float = 3.0) -> bool:
    joint = math.sqrt(functional.stderr**2 + flux.stderr**2)
    return abs(functional.mean - flux.mean) <= sigmas * joint


class ProfileEstimate:
    def __init__(self, sites: List[RunEstimate], weakForms: Dict[str, RunEstimate], N: int):
        self.sites = sites
        self.weakForms = weakForms
        self.N = N

    @property
    def means(self) -> np.ndarray:
        return np.array([estimate.mean for estimate in self.sites])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([estimate.stderr for estimate in self.sites])

    @property
    def positions(self) -> np.ndarray:
        return np.arange(1, self.N) / self.N


def profileEstimate(
    output: TrajectoryOutput, testFunctions: Optional[Dict[str, Callable]] = None
) -> ProfileEstimate:
    """Per-site time averages of eta_z and the weak forms <pi^N, H> for the given H."""
    batches = output.batchOccupation
    sites = [
        batchMeansEstimate(f"eta_{z}", batches[:, z - 1], output.tMeasure, output.replicaId)
        for z in range(1, output.N)
    ]

    weakForms = {}
    for name, H in (testFunctions or {}).items():
        perBatch = np.array([EmpiricalMeasures(row, output.N).integrate(H) for row in batches])
        weakForms[name] = batchMeansEstimate(f"pi_N[{name}]", perBatch, output.tMeasure, output.replicaId)
    return ProfileEstimate(sites, weakForms, output.N)


def mergeEstimates(estimates: Sequence[RunEstimate]) -> RunEstimate:
    """Pool independent replicas of equal measurement time."""
    usable = [e for e in estimates if e.valid]
    if not usable:
        first = estimates[0] if estimates else None
        return RunEstimate(
            observable=first.observable if first else "empty",
            mean=float("nan"),
            stderr=float("nan"),
            totalTime=0.0,
            numBatches=0,
            lowConfidence=True,
            valid=False,
        )
    k = len(usable)
    mean = math.fsum(e.mean for e in usable) / k
    stderr = math.sqrt(math.fsum(e.stderr**2 for e in usable)) / k
    return RunEstimate(
        observable=usable[0].observable,
        mean=mean,
        stderr=stderr,
        totalTime=math.fsum(e.totalTime for e in usable),
        numBatches=sum(e.numBatches for e in usable),
        replicaId=-1,
        lowConfidence=any(e.lowConfidence for e in usable),
    )


def mergeOutputs(outputs: Sequence[TrajectoryOutput]) -> TrajectoryOutput:
    """Stack the batches of replicas run with identical parameters and times."""
    if not outputs:
        raise ValueError("no trajectory outputs to merge")
    first = outputs[0]
    ordered = sorted(outputs, key=lambda o: o.replicaId)
    merged = TrajectoryOutput(
        N=first.N,
        gamma=first.gamma,
        alpha=first.alpha,
        beta=first.beta,
        seed=first.seed,
        replicaId=-1,
        tBurn=first.tBurn,
        tMeasure=math.fsum(o.tMeasure for o in ordered),
        batchOccupation=np.vstack([o.batchOccupation for o in ordered]),
        batchW1=np.concatenate([o.batchW1 for o in ordered]),
        batchFlux=np.concatenate([o.batchFlux for o in ordered]),
        counters=EventCounters.fromArray(sum(o.counters.toArray() for o in ordered)),
        maxW1Drift=max(o.maxW1Drift for o in ordered),
    )
    return merged


def fitPowerLaw(nValues: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """Least-squares fit of log|values| = slope * log N + intercept."""
    slope, intercept = np.polyfit(np.log(np.asarray(nValues, dtype=np.float64)),
                                  np.log(np.abs(np.asarray(values, dtype=np.float64))), 1)
    return float(slope), float(intercept)
