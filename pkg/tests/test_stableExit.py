import numpy as np
import pytest

from continuum.poissonKernel import exitProbabilityClosedForm
from continuum.stableExit import stableExitProbability, symmetricStableDraws


def testWalkOnSpheresMatchesExitProbability():
    target = exitProbabilityClosedForm(1.5, 0.25)
    estimate = stableExitProbability(1.5, 0.25, walkers=200_000, seed=5)
    errMsg = f"walk-on-spheres estimate {estimate.probability:.5f} is more than 4 sigma from {target:.5f}"
    assert estimate.within(target, sigmas=4.0), errMsg
    assert estimate.stranded == 0 and estimate.meanSteps >= 1.0, errMsg


def testSameSeedSameEstimate():
    first = stableExitProbability(1.3, 0.6, walkers=5000, seed=9, chunk=1024)
    second = stableExitProbability(1.3, 0.6, walkers=5000, seed=9, chunk=1024)
    errMsg = "a fixed seed should reproduce the estimate exactly"
    assert first.probability == second.probability and first.meanSteps == second.meanSteps, errMsg


def testStableDrawsHaveTheRightScale(rng):
    draws = symmetricStableDraws(rng, 1.5, 400_000)
    # characteristic function exp(-|t|^gamma) at t = 1
    empirical = np.mean(np.cos(draws))
    errMsg = f"E cos(X) = {empirical:.4f} should be exp(-1)"
    assert abs(empirical - np.exp(-1.0)) <= 4.0 * np.sqrt(0.5 / draws.size), errMsg


@pytest.mark.slow
def testSteppingChainIsClose():
    target = exitProbabilityClosedForm(1.5, 0.25)
    estimate = stableExitProbability(1.5, 0.25, walkers=100_000, seed=5, method="cms", stepScale=0.1)
    errMsg = f"stable-step chain estimate {estimate.probability:.4f} too far from {target:.4f}"
    assert abs(estimate.probability - target) <= 0.02, errMsg


def testRejectsBadArguments():
    with pytest.raises(ValueError):
        stableExitProbability(2.5, 0.5, walkers=10)
    with pytest.raises(ValueError):
        stableExitProbability(1.5, 1.0, walkers=10)
    with pytest.raises(ValueError):
        stableExitProbability(1.5, 0.5, walkers=10, method="euler")
    with pytest.raises(ValueError):
        stableExitProbability(1.5, 0.5, walkers=0)
