import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from jumps.jumpLaw import JumpLaw
from lattice.configuration import Configuration
from lattice.rateCatalog import RateCatalog
from observables.current import CurrentEvaluator

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

logger = logging.getLogger(__name__)

BLOCK_SIZE = 2**16
DEFAULT_BATCHES = 32
EVENT_KINDS = ("pair", "flipLeft", "flipRight", "truncated")
AUTOCORRELATION_WARNING = 0.3


class EventRecord(NamedTuple):
    holdingTime: float
    kind: str
    sites: Tuple[int, ...]
    accepted: bool
    fluxIncrement: int = 0


class EventCounters(BaseModel):
    pairAccepted: int = 0
    pairRejected: int = 0
    flipLeftAccepted: int = 0
    flipLeftRejected: int = 0
    flipRightAccepted: int = 0
    flipRightRejected: int = 0

    @classmethod
    def fromArray(cls, counts: np.ndarray) -> "EventCounters":
        names = list(cls.model_fields)
        return cls(**{name: int(value) for name, value in zip(names, counts)})

    def toArray(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in type(self).model_fields], dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.toArray().sum())

    def acceptanceFraction(self) -> float:
        total = self.total
        if total == 0:
            return 0.0
        return (self.pairAccepted + self.flipLeftAccepted + self.flipRightAccepted) / total


class TrajectoryCheckpoint(BaseModel):
    N: int
    gamma: float
    alpha: float
    beta: float
    seed: int
    replicaId: int = 0
    clock: float
    occupancyHex: str
    counters: EventCounters = Field(default_factory=EventCounters)
    rngState: Dict[str, Any] = Field(default_factory=dict)


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    return value


@lru_cache(maxsize=2)
def _buildKernels(useJit: bool = True):
    """Event kernels, numba-compiled when available, otherwise plain Python."""
    passthrough = lambda *args, **kwargs: (lambda f: f)  # noqa: E731
    njit = nb.njit if (useJit and HAVE_NUMBA) else passthrough
    options = dict(nogil=True) if (useJit and HAVE_NUMBA) else {}

    @njit(**options)
    def executeEvent(
        occ, u0, u1, u2, u3, pairFraction, gapProb, gapAlias, siteProb, siteAlias, leftFraction, alpha, beta, tails
    ):
        n = occ.shape[0]
        if u0 < pairFraction:
            nGaps = gapProb.shape[0]
            scaled = u1 * nGaps
            k = int(scaled)
            if k >= nGaps:
                k = nGaps - 1
            if scaled - k >= gapProb[k]:
                k = gapAlias[k]
            gap = k + 1
            positions = n - gap
            a = int(u2 * positions)
            if a >= positions:
                a = positions - 1
            b = a + gap
            ea = occ[a]
            eb = occ[b]
            if ea == eb:
                return 0, a, b, False, 0.0, 0
            occ[a] = eb
            occ[b] = ea
            return 0, a, b, True, (ea - eb) * (tails[a] - tails[b]), 0

        nSites = siteProb.shape[0]
        scaled = u1 * nSites
        z = int(scaled)
        if z >= nSites:
            z = nSites - 1
        if scaled - z >= siteProb[z]:
            z = siteAlias[z]
        old = occ[z]
        if u2 < leftFraction[z]:
            kind = 1
            rho = alpha
        else:
            kind = 2
            rho = beta
        new = 1 if u3 < rho else 0
        if new == old:
            return kind, z, -1, False, 0.0, 0
        occ[z] = new
        flux = (new - old) if kind == 1 else 0
        return kind, z, -1, True, -tails[z] * (new - old), flux

    @njit(**options)
    def advance(
        occ, clock, tStop, w1, exps, unif, pos, grandTotal, pairFraction, gapProb, gapAlias,
        siteProb, siteAlias, leftFraction, alpha, beta, tails, accumulate, siteIntegral, lastTouch, sums, counters,
    ):
        B = exps.shape[0]
        while pos < B:
            hold = exps[pos] / grandTotal
            if clock + hold >= tStop:
                # memoryless: the residual holding time past tStop is redrawn
                if accumulate:
                    sums[0] += w1 * (tStop - clock)
                pos += 1
                return tStop, w1, pos, True
            if accumulate:
                sums[0] += w1 * hold
            clock += hold
            kind, a, b, accepted, dW1, flux = executeEvent(
                occ, unif[pos, 0], unif[pos, 1], unif[pos, 2], unif[pos, 3], pairFraction,
                gapProb, gapAlias, siteProb, siteAlias, leftFraction, alpha, beta, tails,
            )
            pos += 1
            if accepted:
                counters[2 * kind] += 1
                w1 += dW1
                if accumulate:
                    if kind == 0:
                        siteIntegral[a] += occ[b] * (clock - lastTouch[a])
                        siteIntegral[b] += occ[a] * (clock - lastTouch[b])
                        lastTouch[b] = clock
                    else:
                        siteIntegral[a] += (1 - occ[a]) * (clock - lastTouch[a])
                    lastTouch[a] = clock
                    sums[1] += flux
            else:
                counters[2 * kind + 1] += 1
        return clock, w1, pos, False

    return executeEvent, advance


class TrajectoryState:
    """One replica's mutable simulation state; confined to a single thread.

    Randomness comes from a Philox stream keyed by (seed, replicaId), drawn in
    blocks of one exponential and four uniforms per event.
    """

    def __init__(
        self,
        config: Configuration,
        seed: int,
        replicaId: int = 0,
        clock: float = 0.0,
        counters: Optional[EventCounters] = None,
        blockSize: int = BLOCK_SIZE,
    ):
        self.config = config
        self.seed = int(seed)
        self.replicaId = int(replicaId)
        self.clock = float(clock)
        self.counters = (counters or EventCounters()).toArray()
        self.blockSize = int(blockSize)
        self.seedSequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.replicaId,))
        self.rng = np.random.Generator(np.random.Philox(self.seedSequence))
        self.w1: Optional[float] = None
        self._exps = np.empty(0)
        self._unif = np.empty((0, 4))
        self._pos = 0

    @property
    def eventCounters(self) -> EventCounters:
        return EventCounters.fromArray(self.counters)

    def refill(self):
        self._exps = self.rng.standard_exponential(self.blockSize)
        self._unif = self.rng.random((self.blockSize, 4))
        self._pos = 0

    def nextDraws(self) -> Tuple[float, np.ndarray]:
        if self._pos >= self._exps.size:
            self.refill()
        draw = (float(self._exps[self._pos]), self._unif[self._pos])
        self._pos += 1
        return draw

    def toCheckpoint(self, gamma: float) -> TrajectoryCheckpoint:
        return TrajectoryCheckpoint(
            N=self.config.N,
            gamma=gamma,
            alpha=self.config.alpha,
            beta=self.config.beta,
            seed=self.seed,
            replicaId=self.replicaId,
            clock=self.clock,
            occupancyHex=self.config.toHex(),
            counters=self.eventCounters,
            rngState=_jsonable(self.rng.bit_generator.state),
        )

    @classmethod
    def fromCheckpoint(cls, checkpoint: TrajectoryCheckpoint) -> "TrajectoryState":
        config = Configuration.fromHex(checkpoint.N, checkpoint.occupancyHex, checkpoint.alpha, checkpoint.beta)
        state = cls(config, checkpoint.seed, checkpoint.replicaId, checkpoint.clock, checkpoint.counters)
        if checkpoint.rngState:
            state.rng.bit_generator.state = checkpoint.rngState
        return state

    def saveCheckpoint(self, path, gamma: float):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.toCheckpoint(gamma).model_dump(mode="json"), f, indent=2)
        logger.info(f"Saved checkpoint: {path}")

    @classmethod
    def loadCheckpoint(cls, path) -> Tuple["TrajectoryState", float]:
        with open(path, "r") as f:
            checkpoint = TrajectoryCheckpoint.model_validate(json.load(f))
        return cls.fromCheckpoint(checkpoint), checkpoint.gamma


class TrajectoryOutput:
    """Equal-time batch averages collected over the measurement window."""

    def __init__(
        self,
        N: int,
        gamma: float,
        alpha: float,
        beta: float,
        seed: int,
        replicaId: int,
        tBurn: float,
        tMeasure: float,
        batchOccupation: np.ndarray,
        batchW1: np.ndarray,
        batchFlux: np.ndarray,
        counters: EventCounters,
        maxW1Drift: float,
    ):
        self.N = N
        self.gamma = gamma
        self.alpha = alpha
        self.beta = beta
        self.seed = seed
        self.replicaId = replicaId
        self.tBurn = tBurn
        self.tMeasure = tMeasure
        self.batchOccupation = batchOccupation
        self.batchW1 = batchW1
        self.batchFlux = batchFlux
        self.counters = counters
        self.maxW1Drift = maxW1Drift

    @property
    def numBatches(self) -> int:
        return int(self.batchW1.size)

    @property
    def batchLength(self) -> float:
        return self.tMeasure / self.numBatches if self.numBatches else 0.0

    def lag1Autocorrelation(self) -> float:
        values = self.batchW1
        if values.size < 3:
            return float("nan")
        centered = values - values.mean()
        denominator = float(np.dot(centered, centered))
        if denominator == 0.0:
            return 0.0
        return float(np.dot(centered[:-1], centered[1:]) / denominator)


def _checkCompatible(state: TrajectoryState, catalog: RateCatalog, law: JumpLaw):
    config = state.config
    if config.N != catalog.N or config.alpha != catalog.alpha or config.beta != catalog.beta:
        raise ValueError(
            f"catalog (N={catalog.N}, alpha={catalog.alpha}, beta={catalog.beta}) does not match "
            f"state (N={config.N}, alpha={config.alpha}, beta={config.beta})"
        )
    if law.gamma != catalog.gamma:
        raise ValueError(f"catalog built for gamma={catalog.gamma}, law has gamma={law.gamma}")


def kmcStep(
    state: TrajectoryState,
    catalog: RateCatalog,
    law: JumpLaw,
    tStop: float = np.inf,
    useJit: Optional[bool] = None,
) -> EventRecord:
    """One event of the constant-rate construction.

    If the holding time would carry the clock past tStop the clock stops at
    tStop and no event is executed (kind "truncated").
    """
    _checkCompatible(state, catalog, law)
    executeEvent, _ = _buildKernels(HAVE_NUMBA if useJit is None else useJit)

    exponential, u = state.nextDraws()
    hold = exponential / catalog.grandTotal
    if state.clock + hold >= tStop:
        held = tStop - state.clock
        state.clock = float(tStop)
        return EventRecord(held, "truncated", (), False)

    state.clock += hold
    gapProb, gapAlias, siteProb, siteAlias, leftFraction, tails = catalog.kernelArrays()
    kind, a, b, accepted, dW1, flux = executeEvent(
        state.config.occ, u[0], u[1], u[2], u[3], catalog.pairFraction, gapProb, gapAlias,
        siteProb, siteAlias, leftFraction, catalog.alpha, catalog.beta, tails,
    )
    kind = int(kind)
    state.counters[2 * kind + (0 if accepted else 1)] += 1
    if accepted and state.w1 is not None:
        state.w1 += dW1

    sites = (int(a) + 1, int(b) + 1) if kind == 0 else (int(a) + 1,)
    return EventRecord(hold, EVENT_KINDS[kind], sites, bool(accepted), int(flux))


class _MeasurementBuffers:
    def __init__(self, n: int, numBatches: int, tStart: float):
        self.siteIntegral = np.zeros(n)
        self.lastTouch = np.full(n, tStart)
        self.sums = np.zeros(2)
        self.batchOccupation = np.zeros((numBatches, n))
        self.batchW1 = np.zeros(numBatches)
        self.batchFlux = np.zeros(numBatches)

    def close(self, batch: int, occ: np.ndarray, tEnd: float, length: float):
        self.siteIntegral += occ * (tEnd - self.lastTouch)
        self.lastTouch[:] = tEnd
        self.batchOccupation[batch] = self.siteIntegral / length
        self.batchW1[batch] = self.sums[0] / length
        self.batchFlux[batch] = self.sums[1] / length
        self.siteIntegral[:] = 0.0
        self.sums[:] = 0.0


def _runUntil(state, catalog, evaluator, advance, tStop, accumulate, buffers, drift):
    gapProb, gapAlias, siteProb, siteAlias, leftFraction, tails = catalog.kernelArrays()
    siteIntegral = buffers.siteIntegral if accumulate else np.zeros(0)
    lastTouch = buffers.lastTouch if accumulate else np.zeros(0)
    sums = buffers.sums if accumulate else np.zeros(2)

    while True:
        if state._pos >= state._exps.size:
            if state._exps.size:
                exact = evaluator.w1(state.config.occ)
                drift[0] = max(drift[0], abs(state.w1 - exact))
                state.w1 = exact
            state.refill()
        clock, w1, pos, reached = advance(
            state.config.occ, state.clock, float(tStop), state.w1, state._exps, state._unif, state._pos,
            catalog.grandTotal, catalog.pairFraction, gapProb, gapAlias, siteProb, siteAlias, leftFraction,
            catalog.alpha, catalog.beta, tails, accumulate, siteIntegral, lastTouch, sums, state.counters,
        )
        state.clock = float(clock)
        state.w1 = float(w1)
        state._pos = int(pos)
        if reached:
            return


def _observedRun(state, catalog, law, evaluator, tStop, buffers, observers, useJit):
    while True:
        pre = state.config.copy()
        w1Before = evaluator.w1(pre.occ)
        record = kmcStep(state, catalog, law, tStop=tStop, useJit=useJit)
        buffers.siteIntegral += pre.occ * record.holdingTime
        buffers.sums[0] += w1Before * record.holdingTime
        buffers.sums[1] += record.fluxIncrement
        for observer in observers:
            observer(record.holdingTime, pre, record)
        if record.kind == "truncated":
            buffers.lastTouch[:] = tStop
            return


def runTrajectory(
    state: TrajectoryState,
    catalog: RateCatalog,
    law: JumpLaw,
    tBurn: Optional[float],
    tMeasure: float,
    observers: Sequence[Callable] = (),
    numBatches: int = DEFAULT_BATCHES,
    useJit: Optional[bool] = None,
) -> TrajectoryOutput:
    """Burn in for tBurn, then measure for tMeasure split into numBatches equal-time batches.

    Without observers the compiled block kernel runs the trajectory. Observers
    are called as observer(holdingTime, preEventConfiguration, eventRecord) for
    every event in the measurement window and force the event-by-event path.
    """
    _checkCompatible(state, catalog, law)
    tBurn = catalog.defaultBurnIn() if tBurn is None else float(tBurn)
    if tBurn < 0.0 or tMeasure < 0.0:
        raise ValueError(f"times must be non-negative, got tBurn={tBurn}, tMeasure={tMeasure}")
    if numBatches < 1:
        raise ValueError(f"numBatches must be positive, got {numBatches}")

    useJit = HAVE_NUMBA if useJit is None else useJit
    _, advance = _buildKernels(useJit)
    evaluator = CurrentEvaluator(law, catalog.N, catalog.alpha, catalog.beta)
    state.w1 = evaluator.w1(state.config.occ)
    drift = [0.0]
    n = catalog.N - 1

    burnBuffers = _MeasurementBuffers(n, 0, state.clock)
    _runUntil(state, catalog, evaluator, advance, state.clock + tBurn, False, burnBuffers, drift)

    if tMeasure == 0.0:
        logger.warning("Zero measurement time: returning an empty trajectory output")
        numBatches = 0

    tStart = state.clock
    buffers = _MeasurementBuffers(n, numBatches, tStart)
    length = tMeasure / numBatches if numBatches else 0.0
    for batch in range(numBatches):
        tEnd = tStart + tMeasure if batch == numBatches - 1 else tStart + (batch + 1) * length
        if observers:
            _observedRun(state, catalog, law, evaluator, tEnd, buffers, observers, useJit)
        else:
            _runUntil(state, catalog, evaluator, advance, tEnd, True, buffers, drift)
        buffers.close(batch, state.config.occ, tEnd, length)

    exact = evaluator.w1(state.config.occ)
    drift[0] = max(drift[0], abs(state.w1 - exact))
    state.w1 = exact

    output = TrajectoryOutput(
        N=catalog.N,
        gamma=law.gamma,
        alpha=catalog.alpha,
        beta=catalog.beta,
        seed=state.seed,
        replicaId=state.replicaId,
        tBurn=tBurn,
        tMeasure=float(tMeasure),
        batchOccupation=buffers.batchOccupation,
        batchW1=buffers.batchW1,
        batchFlux=buffers.batchFlux,
        counters=state.eventCounters,
        maxW1Drift=drift[0],
    )

    rho = output.lag1Autocorrelation()
    if rho > AUTOCORRELATION_WARNING:
        logger.warning(
            f"N={catalog.N} replica {state.replicaId}: lag-1 batch autocorrelation {rho:.2f}; "
            "burn-in or batch length may be too short"
        )
    logger.debug(
        f"N={catalog.N} replica {state.replicaId}: {output.counters.total} events, "
        f"max W1 drift {output.maxW1Drift:.2e}"
    )
    return output
