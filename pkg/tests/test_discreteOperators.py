import numpy as np
import pytest

from jumps.bumps import MollifierBump, sampleOnGrid, standardBumpCorpus
from jumps.discreteOperators import buildDiscreteOperators


def testVectorizedMatchesSiteBySite(law15):
    N = 64
    table = buildDiscreteOperators(law15, N)
    F = sampleOnGrid(MollifierBump(0.45, 0.25), N)
    allSites = table.applyKNAll(F)
    single = np.array([table.applyKN(F, x) for x in range(1, N)])
    errMsg = "FFT convolution disagrees with the direct sum"
    assert np.allclose(allSites, single, atol=1e-13), errMsg


def testInLatticeOperatorKillsConstants(law15):
    table = buildDiscreteOperators(law15, 32)
    errMsg = "L_N of a constant should vanish"
    assert np.allclose([table.applyLN(np.full(33, 0.7), x) for x in range(1, 32)], 0.0, atol=1e-15), errMsg


def testReservoirTablesMirror(law15):
    N = 40
    table = buildDiscreteOperators(law15, N)
    errMsg = "r_N^+ should be r_N^- reflected"
    assert np.allclose(table.rPlusN[1:N], table.rMinusN[1:N][::-1]), errMsg
    assert np.allclose(table.rMinusN[1], 0.5), errMsg


def testKNRejectsNonVanishingEndpoints(law15):
    table = buildDiscreteOperators(law15, 16)
    F = np.ones(17)
    with pytest.raises(ValueError):
        table.applyKN(F, 3)
    with pytest.raises(ValueError):
        table.applyKNAll(np.zeros(10))
    with pytest.raises(ValueError):
        table.applyKN(np.zeros(17), 16)


def testScaledOperatorApproachesFractionalLaplacian(law15):
    from jumps.fractionalLaplacian import fracLaplacian1d

    bump = standardBumpCorpus()[0]
    reference = fracLaplacian1d(bump, 0.5, 1.5)
    errors = []
    for N in (64, 256, 1024):
        values = buildDiscreteOperators(law15, N).applyKNAll(sampleOnGrid(bump, N))
        errors.append(abs(N**1.5 * values[N // 2 - 1] + reference))
    errMsg = f"N^gamma K_N F should approach -(-Delta)^(gamma/2) F, errors {errors}"
    assert errors[0] > errors[1] > errors[2], errMsg


def rawTwoSidedSum(law, F, x, cutoff):
    """sum over |y - x| <= cutoff of p(y - x)[F(y) - F(x)] with F = 0 off the lattice, plus the exact remainder."""
    N = F.size - 1
    y = np.arange(x - cutoff, x + cutoff + 1)
    extended = np.where((y >= 0) & (y <= N), F[np.clip(y, 0, N)], 0.0)
    truncated = float(np.sum(law.jumpProbability(y - x) * (extended - F[x])))
    return truncated - 2.0 * law.tail(cutoff + 1) * F[x]


def testKNMatchesTheRawTwoSidedSum(smallLaw):
    N = 24
    table = buildDiscreteOperators(smallLaw, N)
    F = sampleOnGrid(MollifierBump(0.45, 0.3), N)
    for x in range(1, N):
        expected = rawTwoSidedSum(smallLaw, F, x, cutoff=5000)
        errMsg = f"K_N F({x}) disagrees with the two-sided sum over Z"
        assert np.isclose(table.applyKN(F, x), expected, rtol=0.0, atol=1e-12), errMsg
        assert np.isclose(table.applyKNAll(F)[x - 1], expected, rtol=0.0, atol=1e-12), errMsg


def testKNOnAPlateau(law15):
    N = 20
    table = buildDiscreteOperators(law15, N)
    F = np.full(N + 1, 0.6)
    F[0] = F[-1] = 0.0
    expected = -(table.rMinusN[1:N] + table.rPlusN[1:N]) * 0.6
    errMsg = "where F is constant on the lattice K_N F reduces to -(r^- + r^+) F"
    assert np.allclose(table.applyKNAll(F), expected, rtol=0.0, atol=1e-13), errMsg
    assert np.allclose([table.applyKN(F, x) for x in range(1, N)], expected, rtol=0.0, atol=1e-13), errMsg
