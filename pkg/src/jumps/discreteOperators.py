import logging

import numpy as np
from scipy.signal import fftconvolve

from jumps.jumpLaw import JumpLaw

logger = logging.getLogger(__name__)


class DiscreteOperatorTable:
    """Site tables of r_N^-, r_N^+ and their moment tails on {0, 1/N, ..., 1}.

    Arrays are indexed by z = 0..N; the endpoints copy the nearest interior value.
    """

    def __init__(self, law: JumpLaw, N: int):
        if N < 2:
            raise ValueError(f"N must be at least 2, got {N}")

        self.law = law
        self.N = int(N)

        sites = np.arange(1, self.N)
        self.rMinusN = self._withEndpoints(law.tail(sites))
        self.rPlusN = self._withEndpoints(law.tail(self.N - sites))
        self.rtMinusN = self._withEndpoints(law.momentTail(sites))
        self.rtPlusN = self._withEndpoints(law.momentTail(self.N - sites))

        offsets = np.arange(-(self.N - 2), self.N - 1)
        self.kernel = law.jumpProbability(offsets) if offsets.size > 1 else np.zeros(1)

    @staticmethod
    def _withEndpoints(interior) -> np.ndarray:
        interior = np.atleast_1d(np.asarray(interior, dtype=np.float64))
        table = np.concatenate(([interior[0]], interior, [interior[-1]]))
        table.flags.writeable = False
        return table

    def _checkSampled(self, F: np.ndarray, compact: bool) -> np.ndarray:
        F = np.asarray(F, dtype=np.float64)
        if F.shape != (self.N + 1,):
            raise ValueError(f"F must be sampled on N+1 = {self.N + 1} points, got shape {F.shape}")
        if compact and (F[0] != 0.0 or F[-1] != 0.0):
            raise ValueError(
                f"F must vanish at the endpoints for K_N, got F(0)={F[0]}, F(1)={F[-1]}"
            )
        return F

    def _checkSite(self, x: int):
        if not 1 <= x <= self.N - 1:
            raise ValueError(f"site {x} outside 1..{self.N - 1}")

    def applyLN(self, F: np.ndarray, x: int) -> float:
        F = self._checkSampled(F, compact=False)
        self._checkSite(x)
        sites = np.arange(1, self.N)
        weights = self.law.jumpProbability(sites - x)
        return float(np.sum(weights * (F[sites] - F[x])))

    def applyKN(self, F: np.ndarray, x: int) -> float:
        F = self._checkSampled(F, compact=True)
        self._checkSite(x)
        return self.applyLN(F, x) - (self.rMinusN[x] + self.rPlusN[x]) * F[x]

    def applyKNAll(self, F: np.ndarray) -> np.ndarray:
        """K_N F at sites 1..N-1 as one FFT convolution; uses 2 sum_k p(k) = 1."""
        F = self._checkSampled(F, compact=True)
        inner = F[1 : self.N]
        n = inner.size
        full = fftconvolve(inner, self.kernel)
        return full[n - 1 : 2 * n - 1] - inner


def buildDiscreteOperators(law: JumpLaw, N: int) -> DiscreteOperatorTable:
    return DiscreteOperatorTable(law, N)
