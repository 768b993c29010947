import numpy as np
import pytest
from scipy.integrate import quad

from continuum.poissonKernel import (
    exitProbability,
    exitProbabilityClosedForm,
    kernelConstant,
    kernelMass,
    poissonKernel,
    rightExitIntegral,
)


@pytest.mark.parametrize("gamma", [1.25, 1.5, 1.75])
def testKernelHasUnitMass(gamma):
    for q in np.linspace(0.05, 0.95, 20):
        errMsg = f"exit kernel from q={q:.3f} should carry unit mass (gamma={gamma})"
        assert abs(kernelMass(gamma, q) - 1.0) <= 1e-8, errMsg


@pytest.mark.parametrize("gamma", [1.25, 1.5, 1.75])
def testQuadratureMatchesIncompleteBeta(gamma):
    q = np.array([1e-4, 0.01, 0.1, 0.25, 0.5, 0.8, 0.99])
    quadrature = np.array([exitProbability(gamma, value) for value in q])
    errMsg = f"kernel quadrature disagrees with I_q(gamma/2, gamma/2) at gamma={gamma}"
    assert np.allclose(quadrature, exitProbabilityClosedForm(gamma, q), atol=1e-9), errMsg


def testEdgeFactorAgainstPlainKernelIntegral():
    gamma, q = 1.5, 0.3
    direct, _ = quad(lambda y: poissonKernel(gamma, q, y), 1.0, np.inf, limit=200)
    errMsg = "substituted edge integral disagrees with integrating the kernel directly"
    assert np.isclose((q * (1 - q)) ** (gamma / 2) * rightExitIntegral(gamma, q), direct, atol=1e-7), errMsg


def testKernelShape():
    gamma = 1.5
    errMsg = "kernel should vanish on [0, 1] and mirror under q -> 1 - q, y -> 1 - y"
    assert poissonKernel(gamma, 0.3, 0.5) == 0.0, errMsg
    assert np.isclose(poissonKernel(gamma, 0.3, 1.4), poissonKernel(gamma, 0.7, -0.4)), errMsg
    errMsg = "C_gamma should reduce to sin(pi gamma / 2) / pi"
    assert np.isclose(kernelConstant(gamma), np.sin(0.75 * np.pi) / np.pi), errMsg
    errMsg = "Psi should be 0 and 1 at the endpoints and 1/2 at the center"
    assert exitProbability(gamma, 0.0) == 0.0 and exitProbability(gamma, 1.0) == 1.0, errMsg
    assert np.isclose(exitProbability(gamma, 0.5), 0.5, atol=1e-10), errMsg


def testRejectsBoundaryStart():
    with pytest.raises(ValueError):
        poissonKernel(1.5, 0.0, 2.0)
    with pytest.raises(ValueError):
        kernelMass(1.5, 1.0)
    with pytest.raises(ValueError):
        rightExitIntegral(1.5, 1.0)
