import numpy as np

from observables.estimates import (
    RunEstimate,
    batchMeansEstimate,
    currentsAgree,
    fitPowerLaw,
    mergeEstimates,
)


def testBatchMeansStandardError():
    batches = np.array([1.0, 2.0, 3.0, 4.0] * 8)
    estimate = batchMeansEstimate("x", batches, totalTime=32.0)
    errMsg = "batch-means mean or standard error is wrong"
    assert np.isclose(estimate.mean, 2.5), errMsg
    assert np.isclose(estimate.stderr, batches.std(ddof=1) / np.sqrt(32)), errMsg
    assert estimate.valid and not estimate.lowConfidence, errMsg


def testEmptyAndShortRuns():
    empty = batchMeansEstimate("x", np.array([]), totalTime=0.0)
    errMsg = "an empty run should be reported invalid, not raise"
    assert not empty.valid and np.isnan(empty.mean), errMsg
    short = batchMeansEstimate("x", np.arange(5.0), totalTime=5.0)
    errMsg = "fewer than 20 batches should be flagged low-confidence"
    assert short.valid and short.lowConfidence, errMsg


def testMergeEstimatesPoolsReplicas():
    estimates = [
        RunEstimate(observable="W1", mean=m, stderr=0.1, totalTime=10.0, numBatches=32, replicaId=i)
        for i, m in enumerate([1.0, 2.0, 3.0, 4.0])
    ]
    estimates.append(batchMeansEstimate("W1", np.array([]), 0.0))
    merged = mergeEstimates(estimates)
    errMsg = "merged estimate should average valid replicas and shrink the error by sqrt(k)"
    assert np.isclose(merged.mean, 2.5) and np.isclose(merged.stderr, 0.05), errMsg
    assert merged.numBatches == 128 and np.isclose(merged.totalTime, 40.0), errMsg


def testIntervalHelpers():
    estimate = RunEstimate(observable="W1", mean=0.01, stderr=0.004, totalTime=1.0, numBatches=32)
    errMsg = "interval helpers disagree with their definitions"
    assert estimate.spansZero(sigmas=3.0) and not estimate.spansZero(sigmas=2.0), errMsg
    assert estimate.within(0.02, sigmas=3.0) and not estimate.within(0.03, sigmas=3.0), errMsg
    other = RunEstimate(observable="W1_flux", mean=0.02, stderr=0.003, totalTime=1.0, numBatches=32)
    assert currentsAgree(estimate, other, sigmas=3.0), errMsg


def testPowerLawFit():
    n = np.array([16.0, 32.0, 64.0, 128.0])
    slope, intercept = fitPowerLaw(n, -0.7 * n**-0.5)
    errMsg = "power-law fit should recover slope and prefactor of |values|"
    assert np.isclose(slope, -0.5) and np.isclose(np.exp(intercept), 0.7), errMsg
