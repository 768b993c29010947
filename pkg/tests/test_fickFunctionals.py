import numpy as np
import pytest

from continuum.fickLaw import phiLimit, thetaLimit
from lattice.exactGenerator import buildExactGenerator, solveStationary
from observables.current import CurrentEvaluator
from observables.fickFunctionals import phiNTable, phiRoute, scaledThetaN, thetaN, wwwDecomposition


def testDecompositionSumsToMeanCurrent(law15, rng):
    for N in (5, 12, 30):
        eta = rng.random(N - 1)
        parts = wwwDecomposition(law15, N, 0.2, 0.8, eta)
        currents = CurrentEvaluator(law15, N, 0.2, 0.8).profile(eta)
        errMsg = f"left + right + bulk should equal the mean of W_1..W_(N-1) at N={N}"
        assert np.isclose(parts["total"], currents[: N - 1].mean(), atol=1e-12), errMsg
        assert np.isclose(parts["left"] + parts["right"] + parts["bulk"], parts["total"]), errMsg


@pytest.mark.parametrize("N", [6, 8, 10])
def testPhiRouteEqualsScaledCurrent(law15, N):
    gen = buildExactGenerator(N, law15, 0.2, 0.8)
    eta = gen.meanOccupations(solveStationary(gen))
    w1 = CurrentEvaluator(law15, N, 0.2, 0.8).w1(eta)
    errMsg = f"<pi^N, phi_N> + N^(gamma-1) theta_N should equal N^(gamma-1) <W_1> at N={N}"
    assert abs(phiRoute(law15, N, 0.2, 0.8, eta) - N ** (law15.gamma - 1.0) * w1) <= 1e-9, errMsg


def testThetaApproachesItsLimit(law15):
    limit = thetaLimit(1.5, 0.2, 0.8)
    gaps = [abs(scaledThetaN(law15, N, 0.2, 0.8) - limit) for N in (64, 256, 1024, 4096)]
    errMsg = f"N^(gamma-1) theta_N should approach its limit, gaps {gaps}"
    assert gaps[-1] < gaps[0], errMsg
    assert gaps[-1] < 0.02, errMsg


def testRejectsTinySystems(law15):
    with pytest.raises(ValueError):
        thetaN(law15, 3, 0.2, 0.8)
    with pytest.raises(ValueError):
        wwwDecomposition(law15, 6, 0.2, 0.8, np.zeros(4))


def testPhiTableConvergesUniformly(law15):
    a = 0.25
    errors = []
    for N in (64, 128, 256, 512):
        q = np.arange(1, N) / N
        window = (q >= a - 1e-12) & (q <= 1.0 - a + 1e-12)
        errors.append(np.max(np.abs(phiNTable(law15, N)[window] - phiLimit(1.5, q[window]))))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    errMsg = f"sup |phi_N - phi| on [a, 1-a] should halve per doubling, ratios {ratios}"
    assert np.all((ratios > 2.0 / 1.5) & (ratios < 2.0 * 1.5)), errMsg
