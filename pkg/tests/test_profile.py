import numpy as np
import pytest
from scipy.integrate import trapezoid

from continuum.poissonKernel import exitProbabilityClosedForm
from continuum.profile import (
    buildProfile,
    checkWeakSolution,
    holderExponentFit,
    interiorHarmonicity,
    profileRhoBar,
)
from jumps.bumps import MollifierBump, standardBumpCorpus


@pytest.fixture(scope="module")
def profile():
    return buildProfile(1.5, 0.2, 0.8)


def testShapeOfTheProfile(profile):
    q = np.linspace(0.0, 1.0, 401)
    values = profile(q)
    errMsg = "rho_bar should rise monotonically from alpha to beta"
    assert np.all(np.diff(values) >= -1e-12), errMsg
    assert np.isclose(values[0], 0.2) and np.isclose(values[-1], 0.8), errMsg
    assert np.all((values >= 0.2 - 1e-12) & (values <= 0.8 + 1e-12)), errMsg
    errMsg = "rho_bar(1/2) should be the reservoir mean"
    assert abs(profile(0.5) - 0.5) <= 1e-10, errMsg
    errMsg = "rho_bar(q) + rho_bar(1-q) should equal alpha + beta"
    assert np.allclose(values + values[::-1], 1.0, atol=1e-10), errMsg


def testExtensionOutsideTheInterval(profile):
    errMsg = "the profile is extended by the reservoir densities"
    assert np.isclose(profile(-0.3), 0.2) and np.isclose(profile(1.7), 0.8), errMsg


def testInterpolantMatchesDirectQuadratureAndClosedForm(profile):
    q = np.array([0.001, 0.02, 0.13, 0.37, 0.5, 0.61, 0.9, 0.995])
    direct = np.array([profileRhoBar(1.5, 0.2, 0.8, value) for value in q])
    closed = 0.2 + 0.6 * exitProbabilityClosedForm(1.5, q)
    errMsg = "Chebyshev profile disagrees with direct quadrature"
    assert np.allclose(profile(q), direct, atol=1e-9), errMsg
    errMsg = "Chebyshev profile disagrees with the incomplete-beta closed form"
    assert np.allclose(profile(q), closed, atol=1e-9), errMsg


def testPchipAlternativeIsClose(profile):
    pchip = buildProfile(1.5, 0.2, 0.8, method="pchip")
    q = np.linspace(0.01, 0.99, 97)
    errMsg = "pchip profile should track the Chebyshev profile"
    assert np.max(np.abs(pchip(q) - profile(q))) <= 1e-4, errMsg


def testAntiderivative(profile):
    errMsg = "P(1) should be 1/2 by the reflection symmetry of Psi"
    assert np.isclose(profile.antiderivative(1.0), 0.5, atol=1e-10), errMsg
    for t in (0.1, 0.5, 0.8):
        q = np.linspace(0.0, t, 20001)
        reference = trapezoid(exitProbabilityClosedForm(1.5, q), q)
        errMsg = f"P({t}) disagrees with a fine trapezoid rule"
        assert abs(profile.antiderivative(t) - reference) <= 1e-6, errMsg


def testEqualReservoirsGiveConstantProfile():
    flat = buildProfile(1.5, 0.35, 0.35)
    errMsg = "alpha == beta should give a constant profile"
    assert np.allclose(flat(np.linspace(0.0, 1.0, 11)), 0.35), errMsg
    assert profileRhoBar(1.5, 0.35, 0.35, 0.4) == 0.35, errMsg


def testInteriorHarmonicity(profile):
    values = interiorHarmonicity(profile)
    errMsg = f"(-Delta)^(gamma/2) rho_bar should vanish inside (0, 1): {values}"
    assert max(abs(v) for v in values.values()) <= 1e-4, errMsg


def testHolderExponentNearTheBoundary():
    slope = holderExponentFit(1.5, 0.2, 0.8)
    errMsg = f"rho_bar - alpha should scale like q^(gamma/2), fitted {slope:.4f}"
    assert abs(slope - 0.75) <= 0.01, errMsg
    with pytest.raises(ValueError):
        holderExponentFit(1.5, 0.4, 0.4)


@pytest.mark.slow
def testWeakFormulationHolds(profile):
    for bump in standardBumpCorpus():
        residual = checkWeakSolution(profile, bump)
        errMsg = f"weak-solution residual {residual:.2e} too large for {bump!r}"
        assert abs(residual) <= 1e-5, errMsg


def testWeakFormulationNeedsCompactSupport(profile):
    with pytest.raises(ValueError):
        checkWeakSolution(profile, np.sin)
    with pytest.raises(ValueError):
        checkWeakSolution(profile, MollifierBump(0.1, 0.2))


def testRejectsBadParameters():
    with pytest.raises(ValueError):
        buildProfile(2.0, 0.2, 0.8)
    with pytest.raises(ValueError):
        buildProfile(1.5, -0.1, 0.8)
    with pytest.raises(ValueError):
        buildProfile(1.5, 0.2, 0.8, method="linear")
