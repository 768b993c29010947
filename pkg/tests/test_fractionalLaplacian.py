import math

import numpy as np
import pytest

from jumps.bumps import MollifierBump
from jumps.fractionalLaplacian import fracLaplacian1d
from jumps.jumpLaw import normalizationConstant


def spectralFractionalLaplacian(F, gamma, length=256.0, points=2**20):
    """Periodic FFT evaluation with symbol c_gamma kappa |xi|^gamma on [0, length)."""
    step = length / points
    x = np.arange(points) * step
    xi = 2.0 * np.pi * np.fft.fftfreq(points, d=step)
    kappa = -2.0 * math.gamma(-gamma) * math.cos(math.pi * gamma / 2.0)
    symbol = normalizationConstant(gamma) * kappa * np.abs(xi) ** gamma
    return x, np.real(np.fft.ifft(symbol * np.fft.fft(F(x))))


def testAgreesWithSpectralOracle():
    bump = MollifierBump(0.5, 0.2)
    for gamma in (1.25, 1.5, 1.75):
        x, values = spectralFractionalLaplacian(bump, gamma)
        errMsg = f"quadrature and spectral fractional Laplacian disagree at gamma={gamma}"
        assert np.allclose(fracLaplacian1d(bump, 0.5, gamma), values[2048], atol=1e-6), errMsg


def testOffSupportValueIsNegativeIntegral():
    bump = MollifierBump(0.6, 0.1)
    value = fracLaplacian1d(bump, 0.2, 1.5)
    errMsg = "outside supp F the fractional Laplacian should be negative"
    assert value < 0.0, errMsg


def testExteriorDataMakesConstantsHarmonic():
    errMsg = "a constant with matching exterior should be harmonic"
    value = fracLaplacian1d(lambda q: 0.4, 0.3, 1.5, epsSplit=0.05, exterior=(0.4, 0.4))
    assert np.allclose(value, 0.0, atol=1e-12), errMsg


def testRichardsonDeltaIsSmall():
    value, delta = fracLaplacian1d(MollifierBump(0.5, 0.2), 0.45, 1.5, returnCheck=True)
    errMsg = "halving epsSplit should barely move the value"
    assert delta < 1e-7, errMsg
    assert np.isfinite(value), errMsg


def testRejectsBadArguments():
    bump = MollifierBump(0.5, 0.2)
    with pytest.raises(ValueError):
        fracLaplacian1d(bump, 0.0, 1.5)
    with pytest.raises(ValueError):
        fracLaplacian1d(bump, 0.01, 1.5, epsSplit=0.05)
