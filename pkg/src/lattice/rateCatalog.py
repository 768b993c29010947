import logging
import math

import numpy as np

from jumps.jumpLaw import JumpLaw
from lattice.aliasSampler import AliasSampler

logger = logging.getLogger(__name__)


class RateCatalog:
    """Constant total event rate: pair clocks on every unordered pair plus one reservoir clock per site.

    A pair clock with gap k rings at rate p(k) and swaps the two sites. A site
    clock at z rings at T(z) + T(N-z), picks the reservoir in proportion to
    T(z) : T(N-z) and resamples eta_z from Bernoulli(reservoir density).
    """

    def __init__(self, law: JumpLaw, N: int, alpha: float, beta: float):
        if N < 2:
            raise ValueError(f"N must be at least 2, got {N}")
        for name, value in (("alpha", alpha), ("beta", beta)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

        self.N = int(N)
        self.gamma = law.gamma
        self.alpha = float(alpha)
        self.beta = float(beta)

        gaps = np.arange(1, self.N - 1)
        self.gapWeights = (self.N - 1 - gaps) * law.jumpProbability(gaps) if gaps.size else np.zeros(0)
        self.pairTotalRate = math.fsum(self.gapWeights)
        self.gapSampler = AliasSampler(self.gapWeights) if gaps.size else None

        sites = np.arange(1, self.N)
        self.leftRates = np.atleast_1d(law.tail(sites))
        self.rightRates = np.atleast_1d(law.tail(self.N - sites))
        self.flipBoundRates = self.leftRates + self.rightRates
        self.flipBoundTotal = math.fsum(self.flipBoundRates)
        self.siteSampler = AliasSampler(self.flipBoundRates)
        self.leftFraction = self.leftRates / self.flipBoundRates

        self.grandTotal = self.pairTotalRate + self.flipBoundTotal
        self.pairFraction = self.pairTotalRate / self.grandTotal

        logger.debug(
            f"Rate catalog N={self.N}: pair rate {self.pairTotalRate:.6g}, "
            f"reservoir rate {self.flipBoundTotal:.6g}"
        )

    def kernelArrays(self):
        """Flat arrays consumed by the compiled event loop."""
        if self.gapSampler is None:
            gapProb = np.ones(1)
            gapAlias = np.zeros(1, dtype=np.int64)
        else:
            gapProb = self.gapSampler.probabilities
            gapAlias = self.gapSampler.aliases
        return (
            gapProb,
            gapAlias,
            self.siteSampler.probabilities,
            self.siteSampler.aliases,
            self.leftFraction,
            self.leftRates,
        )

    def channelProbabilities(self) -> dict:
        """Per-event probabilities of the three channels."""
        return {
            "pair": self.pairFraction,
            "flipLeft": math.fsum(self.leftRates) / self.grandTotal,
            "flipRight": math.fsum(self.rightRates) / self.grandTotal,
        }

    def defaultBurnIn(self, factor: float = 10.0) -> float:
        if self.pairTotalRate <= 0.0:
            return factor / self.flipBoundTotal
        return factor * self.N**2 / self.pairTotalRate


def buildRateCatalog(law: JumpLaw, N: int, alpha: float, beta: float) -> RateCatalog:
    return RateCatalog(law, N, alpha, beta)
