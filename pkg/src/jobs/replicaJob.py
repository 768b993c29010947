import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

import argparse
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from jumps.jumpLaw import buildJumpLaw
from lattice.configuration import Configuration
from lattice.kmcSimulator import TrajectoryOutput, TrajectoryState, runTrajectory
from lattice.rateCatalog import buildRateCatalog
from observables.estimates import stationaryCurrentEstimate

logger = logging.getLogger(__name__)


class ReplicaTask(BaseModel):
    N: int
    gamma: float
    alpha: float
    beta: float
    kMax: int
    seed: int
    replicaId: int
    tBurn: Optional[float] = None
    tMeasure: float
    numBatches: int = 32
    blockSize: int = 2**16
    useJit: Optional[bool] = None


def initialConfiguration(task: ReplicaTask) -> Configuration:
    stream = np.random.SeedSequence(entropy=task.seed, spawn_key=(task.replicaId, 1))
    return Configuration.random(task.N, task.alpha, task.beta, np.random.Generator(np.random.Philox(stream)))


def runReplica(task: ReplicaTask) -> TrajectoryOutput:
    """Worker entry point; rebuilds the law and catalog so nothing mutable crosses processes."""
    law = buildJumpLaw(task.gamma, task.kMax)
    catalog = buildRateCatalog(law, task.N, task.alpha, task.beta)
    state = TrajectoryState(initialConfiguration(task), task.seed, task.replicaId, blockSize=task.blockSize)
    return runTrajectory(
        state, catalog, law, task.tBurn, task.tMeasure, numBatches=task.numBatches, useJit=task.useJit
    )


class ReplicaJobRunner:
    """Fans independent KMC replicas out over a process pool and collects their outputs in replica order."""

    def __init__(self, threads: int = 1, showProgress: bool = True):
        if threads < 1:
            raise ValueError(f"threads must be positive, got {threads}")
        self.threads = int(threads)
        self.showProgress = showProgress

    def run(self, tasks: List[ReplicaTask]) -> List[TrajectoryOutput]:
        if not tasks:
            return []
        label = f"N={tasks[0].N} replicas"
        if self.threads == 1:
            outputs = [runReplica(task) for task in tqdm(tasks, desc=label, disable=not self.showProgress)]
        else:
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                outputs = list(
                    tqdm(pool.map(runReplica, tasks), total=len(tasks), desc=label, disable=not self.showProgress)
                )
        return sorted(outputs, key=lambda output: output.replicaId)


def main():
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    parser = argparse.ArgumentParser(description="Run KMC replicas of the long-jump exclusion process")
    parser.add_argument("--task-file", type=str, required=True, help="JSON list of replica tasks")
    parser.add_argument("--threads", type=int, default=1, help="Worker processes")
    args = parser.parse_args()

    try:
        with open(args.task_file, "r") as f:
            tasks = [ReplicaTask.model_validate(item) for item in json.load(f)]
        outputs = ReplicaJobRunner(args.threads).run(tasks)
    except Exception as e:
        logger.error(f"Replica job failed: {e}", exc_info=True)
        return 1

    summary = []
    for output in outputs:
        functional, flux = stationaryCurrentEstimate(output)
        summary.append({
            "N": output.N,
            "replicaId": output.replicaId,
            "W1_mean": functional.mean,
            "W1_stderr": functional.stderr,
            "W1_flux_mean": flux.mean,
            "events": output.counters.total,
        })
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
