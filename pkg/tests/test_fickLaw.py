import numpy as np
import pytest

from continuum.fickLaw import (
    INDEPENDENCE_TOLERANCE,
    ROUTE_TOLERANCE,
    computeFickConstant,
    fickRhs,
    fickViaPhi,
    phiLimit,
    thetaLimit,
)


def testThetaLimitValue():
    errMsg = "theta_infinity at gamma = 1.5, alpha = 0.2, beta = 0.8 is about -0.29816"
    assert np.isclose(thetaLimit(1.5, 0.2, 0.8), -0.29816, atol=1e-4), errMsg


def testPhiIntegratesToZero():
    from scipy.integrate import quad

    value, _ = quad(lambda q: phiLimit(1.5, q), 0.0, 1.0, limit=200)
    errMsg = "phi should integrate to zero over (0, 1)"
    assert abs(value) <= 1e-8, errMsg


@pytest.mark.slow
def testCutIndependenceAndRouteAgreement():
    constant = computeFickConstant(1.5, 0.2, 0.8)
    errMsg = f"fick_rhs should not depend on the cut x, spread {constant.spread:.2e}"
    assert constant.spread <= INDEPENDENCE_TOLERANCE, errMsg
    errMsg = f"double-integral and phi routes disagree by {constant.routeGap:.2e}"
    assert constant.routeGap <= ROUTE_TOLERANCE, errMsg
    errMsg = "particles flow from the denser right reservoir to the left"
    assert constant.jInfinity < 0.0, errMsg
    record = constant.toRecord()
    assert set(record) >= {"J_infinity", "route_double_integral", "route_phi", "per_x", "tolerances"}, errMsg


def testAntisymmetryInTheReservoirs():
    forward = fickRhs(1.5, 0.2, 0.8, 0.5)
    backward = fickRhs(1.5, 0.8, 0.2, 0.5)
    errMsg = "swapping alpha and beta should flip the sign of the current"
    assert np.isclose(forward, -backward, rtol=1e-8), errMsg
    errMsg = "the current should scale with beta - alpha"
    assert np.isclose(fickRhs(1.5, 0.2, 0.5, 0.5), 0.5 * forward, rtol=1e-6), errMsg


def testEqualReservoirsCarryNoCurrent():
    errMsg = "alpha == beta should give zero current"
    assert fickRhs(1.5, 0.4, 0.4, 0.3) == 0.0, errMsg
    assert fickViaPhi(1.5, 0.4, 0.4) == 0.0, errMsg


def testRejectsCutsOutsideTheInterval():
    with pytest.raises(ValueError):
        fickRhs(1.5, 0.2, 0.8, 0.0)
    with pytest.raises(ValueError):
        fickRhs(1.5, 0.2, 0.8, 1.2)


def testConfiguredNodeCountReachesTheProfile(monkeypatch):
    import continuum.fickLaw as fickLaw

    seen = []
    build = fickLaw.buildProfile

    def recordingBuild(gamma, alpha, beta, nodes):
        seen.append(nodes)
        return build(gamma, alpha, beta, nodes)

    monkeypatch.setattr(fickLaw, "buildProfile", recordingBuild)
    fickRhs(1.5, 0.2, 0.8, 0.5, nodes=65)
    fickViaPhi(1.5, 0.2, 0.8, nodes=65)
    errMsg = "both Fick routes should build the profile on the requested node count"
    assert seen == [65, 65], errMsg
