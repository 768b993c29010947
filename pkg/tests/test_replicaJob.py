import numpy as np

from jobs.replicaJob import ReplicaJobRunner, ReplicaTask, initialConfiguration, runReplica


def makeTasks(count, **fields):
    base = dict(N=8, gamma=1.5, alpha=0.2, beta=0.8, kMax=2**12, seed=42, tBurn=5.0, tMeasure=50.0,
                numBatches=8, blockSize=512, useJit=False)
    base.update(fields)
    return [ReplicaTask(replicaId=replicaId, **base) for replicaId in range(count)]


def testReplicasAreReproducibleAndDistinct():
    first, second = (ReplicaJobRunner(showProgress=False).run(makeTasks(2)) for _ in range(2))
    errMsg = "the same (seed, replicaId) should give the same trajectory"
    assert np.array_equal(first[0].batchW1, second[0].batchW1), errMsg
    errMsg = "different replicas should follow different streams"
    assert not np.array_equal(first[0].batchW1, first[1].batchW1), errMsg
    assert [output.replicaId for output in first] == [0, 1], errMsg


def testInitialConfigurationDependsOnReplica():
    tasks = makeTasks(2, N=64)
    errMsg = "initial configurations should be drawn per replica"
    assert initialConfiguration(tasks[0]) == initialConfiguration(tasks[0]), errMsg
    assert initialConfiguration(tasks[0]) != initialConfiguration(tasks[1]), errMsg


def testReplicaOutputShape():
    output = runReplica(makeTasks(1)[0])
    errMsg = "a replica should report one row per batch and site"
    assert output.batchOccupation.shape == (8, 7) and output.batchW1.shape == (8,), errMsg
    assert output.counters.total > 0 and output.tMeasure == 50.0, errMsg


def testEmptyTaskList():
    assert ReplicaJobRunner(showProgress=False).run([]) == [], "no tasks should give no outputs"
