import logging
import math
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import zeta

logger = logging.getLogger(__name__)

DEFAULT_K_MAX = 2**20

ArrayLike = Union[int, float, np.ndarray]


def normalizationConstant(gamma: float) -> float:
    return 1.0 / (2.0 * float(zeta(1.0 + gamma)))


def eulerMaclaurinTail(k: ArrayLike, s: float) -> np.ndarray:
    """Sum_{j>=k} j^{-s} for s > 1, accurate once k is in the thousands."""
    k = np.asarray(k, dtype=np.float64)
    return (
        k ** (1.0 - s) / (s - 1.0)
        + 0.5 * k ** (-s)
        + s * k ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * k ** (-s - 3.0) / 720.0
    )


def partialSumNormalization(gamma: float, terms: int = 10**7, chunk: int = 2**20) -> float:
    chunkSums = []
    start = 1
    while start <= terms:
        stop = min(start + chunk, terms + 1)
        k = np.arange(start, stop, dtype=np.float64)
        chunkSums.append(float(np.sum(k ** (-(1.0 + gamma)))))
        start = stop
    chunkSums.append(float(eulerMaclaurinTail(terms + 1, 1.0 + gamma)))
    return 1.0 / (2.0 * math.fsum(chunkSums))


class JumpLaw:
    """Symmetric heavy-tailed step law p(z) = c |z|^{-(1+gamma)} with tail tables.

    tailTable[k-1] = T(k) = sum_{j>=k} p(j) and momentTailTable[k-1] = sum_{j>=k} j p(j)
    for k = 1..kMax. Queries past kMax use the Euler-Maclaurin continuation.
    """

    def __init__(self, gamma: float, kMax: int = DEFAULT_K_MAX):
        if not 1.0 < gamma < 2.0:
            raise ValueError(
                f"gamma must lie in (1, 2), got {gamma}: gamma >= 2 is diffusive, "
                "gamma <= 1 makes the current non-summable"
            )
        if kMax < 4:
            raise ValueError(f"kMax must be at least 4, got {kMax}")

        self.gamma = float(gamma)
        self.kMax = int(kMax)
        self.cGamma = normalizationConstant(self.gamma)

        k = np.arange(1, self.kMax + 1, dtype=np.float64)
        self.tailTable = self.cGamma * zeta(1.0 + self.gamma, k)
        self.momentTailTable = self.cGamma * zeta(self.gamma, k)
        self.tailTable.flags.writeable = False
        self.momentTailTable.flags.writeable = False

    def jumpProbability(self, z: ArrayLike) -> ArrayLike:
        distance = np.abs(np.asarray(z, dtype=np.float64))
        safe = np.where(distance >= 1.0, distance, 1.0)
        result = np.where(distance >= 1.0, self.cGamma * safe ** (-(1.0 + self.gamma)), 0.0)
        return float(result) if result.ndim == 0 else result

    def _lookup(self, table: np.ndarray, k: ArrayLike, s: float) -> ArrayLike:
        kArr = np.asarray(k)
        if np.any(kArr < 1):
            raise ValueError(f"tail index must be >= 1, got min {kArr.min()}")
        inside = kArr <= self.kMax
        index = np.clip(kArr, 1, self.kMax).astype(np.int64) - 1
        beyond = self.cGamma * eulerMaclaurinTail(np.maximum(kArr, self.kMax + 1), s)
        result = np.where(inside, table[index], beyond)
        return float(result) if result.ndim == 0 else result

    def tail(self, k: ArrayLike) -> ArrayLike:
        return self._lookup(self.tailTable, k, 1.0 + self.gamma)

    def momentTail(self, k: ArrayLike) -> ArrayLike:
        return self._lookup(self.momentTailTable, k, self.gamma)

    def rMinus(self, q: ArrayLike) -> ArrayLike:
        return self.cGamma / self.gamma * np.asarray(q, dtype=np.float64) ** (-self.gamma)

    def rPlus(self, q: ArrayLike) -> ArrayLike:
        return self.rMinus(1.0 - np.asarray(q, dtype=np.float64))

    def normalizationError(self) -> float:
        return abs(2.0 * self.tail(1) - 1.0)

    def __repr__(self):
        return f"JumpLaw(gamma={self.gamma}, cGamma={self.cGamma:.12g}, kMax={self.kMax})"


@lru_cache(maxsize=16)
def buildJumpLaw(gamma: float, kMax: int = DEFAULT_K_MAX) -> JumpLaw:
    law = JumpLaw(gamma, kMax)
    logger.info(f"Built jump law gamma={law.gamma} c_gamma={law.cGamma:.12g} kMax={law.kMax}")
    return law
