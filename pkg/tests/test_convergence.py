import numpy as np
import pytest

from jumps.bumps import standardBumpCorpus
from jumps.convergence import REPORT_COLUMNS, convergenceReport, decayRatios, operatorErrors


@pytest.mark.slow
def testReportBoundsAndDecay(law15):
    report = convergenceReport(law15, [64, 128, 256, 512], 0.2)
    errMsg = "report columns changed"
    assert list(report.columns) == REPORT_COLUMNS, errMsg

    errMsg = "tail errors exceed the first-order bound"
    assert (report["bound_ratio"] <= 1.0).all(), errMsg

    ratios = decayRatios(report)
    errMsg = f"tail errors should halve per doubling, got ratios {ratios}"
    assert np.all((ratios > 2.0 / 1.2) & (ratios < 2.0 * 1.2)), errMsg

    errMsg = "K_N error on the bump corpus should not increase"
    assert np.all(np.diff(report["sup_err_K_N"].to_numpy()) <= 0.0), errMsg


def testRejectsUnresolvedWindow(law15):
    with pytest.raises(ValueError):
        convergenceReport(law15, [], 0.2)
    with pytest.raises(ValueError):
        convergenceReport(law15, [8, 16], 0.1)
    with pytest.raises(ValueError):
        convergenceReport(law15, [64], 0.6)


def testSizesWithoutGridPointsAreRejected(law15):
    with pytest.raises(ValueError, match="grid"):
        convergenceReport(law15, [11, 64], 0.2)

    bump = standardBumpCorpus()[0]
    lo, hi = bump.support
    offGrid = next(k for k in range(1, 64) if lo < k / 64 < hi and k % 2)
    with pytest.raises(ValueError, match="grid"):
        operatorErrors(law15, 32, [bump], {0: {offGrid: 0.0}})
    errMsg = "a k/64 point on the grid should give a finite error"
    assert np.isfinite(operatorErrors(law15, 32, [bump], {0: {offGrid + 1: 0.0}})), errMsg
