import numpy as np

from lattice.rateCatalog import buildRateCatalog


def testPairRateCountsEveryUnorderedPair(law15):
    N = 10
    catalog = buildRateCatalog(law15, N, 0.2, 0.8)
    direct = sum(law15.jumpProbability(y - x) for x in range(1, N) for y in range(x + 1, N))
    errMsg = "pair total rate should be the sum of p over unordered pairs"
    assert np.allclose(catalog.pairTotalRate, direct, rtol=1e-14), errMsg


def testChannelProbabilitiesSumToOne(law15):
    catalog = buildRateCatalog(law15, 16, 0.3, 0.6)
    channels = catalog.channelProbabilities()
    errMsg = "channel probabilities should sum to one"
    assert np.allclose(sum(channels.values()), 1.0), errMsg
    errMsg = "reservoir channels should be symmetric"
    assert np.allclose(channels["flipLeft"], channels["flipRight"]), errMsg


def testSiteSamplerFollowsReservoirRates(law15):
    catalog = buildRateCatalog(law15, 12, 0.2, 0.8)
    implied = catalog.siteSampler.impliedProbabilities()
    errMsg = "site sampler should be proportional to T(z) + T(N-z)"
    assert np.allclose(implied, catalog.flipBoundRates / catalog.flipBoundTotal, atol=1e-14), errMsg


def testTwoSiteSystemHasNoPairs(law15):
    catalog = buildRateCatalog(law15, 2, 0.2, 0.8)
    errMsg = "N=2 has no pair clocks"
    assert catalog.gapSampler is None and catalog.pairTotalRate == 0.0, errMsg
    assert catalog.defaultBurnIn() > 0.0, errMsg
