from typing import Union

import numpy as np

from jumps.jumpLaw import JumpLaw
from lattice.configuration import Configuration


class CurrentEvaluator:
    """W_x in its all-finite form, with O(1) updates of W_1 along a trajectory.

    W_x = sum_{1<=y<=x-1<z<=N-1} p(z-y)(eta_y - eta_z) + sum_{z=x}^{N-1} T(z)(alpha - eta_z)
          - sum_{y=1}^{x-1} T(N-y)(beta - eta_y)
    """

    def __init__(self, law: JumpLaw, N: int, alpha: float, beta: float):
        if N < 2:
            raise ValueError(f"N must be at least 2, got {N}")
        self.law = law
        self.N = int(N)
        self.alpha = float(alpha)
        self.beta = float(beta)
        sites = np.arange(1, self.N)
        self.tails = np.atleast_1d(law.tail(sites)).astype(np.float64)
        self.mirrorTails = np.atleast_1d(law.tail(self.N - sites)).astype(np.float64)
        self.pairKernel = law.jumpProbability(sites[None, :] - sites[:, None])

    def w1(self, occ) -> float:
        return float(np.dot(self.tails, self.alpha - np.asarray(occ, dtype=np.float64)))

    def swapDelta(self, etaX: float, etaY: float, x: int, y: int) -> float:
        return (etaX - etaY) * (self.tails[x - 1] - self.tails[y - 1])

    def flipDelta(self, z: int, old: float, new: float) -> float:
        return -self.tails[z - 1] * (new - old)

    def profile(self, eta) -> np.ndarray:
        """W_x for x = 1..N; eta may be a 0/1 configuration or a mean-density profile."""
        eta = np.asarray(eta, dtype=np.float64)
        n = self.N - 1
        pairs = np.triu(self.pairKernel * (eta[:, None] - eta[None, :]), k=1)
        fromRight = np.cumsum(pairs[:, ::-1], axis=1)[:, ::-1]
        bulk = np.append(np.triu(fromRight, k=1).sum(axis=0), 0.0)

        left = self.tails * (self.alpha - eta)
        leftFromX = np.append(np.cumsum(left[::-1])[::-1], 0.0)
        right = self.mirrorTails * (self.beta - eta)
        rightBeforeX = np.concatenate(([0.0], np.cumsum(right)))[: n + 1]

        return bulk + leftFromX - rightBeforeX

    def directProfile(self, eta) -> np.ndarray:
        """W_x with the reservoir sums rebuilt from p and the normalization alone.

        Independent of the tail tables: sum_{j>=k} p(j) = 1/2 - sum_{j<k} p(j).
        """
        eta = np.asarray(eta, dtype=np.float64)
        n = self.N - 1
        steps = self.law.jumpProbability(np.arange(1, self.N))
        partial = np.concatenate(([0.0], np.cumsum(steps)))
        directTails = 0.5 - partial[:n]
        mirror = directTails[::-1]

        values = np.zeros(n + 1)
        for x in range(1, self.N + 1):
            bulk = 0.0
            for y in range(1, x):
                z = np.arange(x, self.N)
                bulk += float(np.sum(self.law.jumpProbability(z - y) * (eta[y - 1] - eta[z - 1])))
            reservoirLeft = float(np.sum(directTails[x - 1 :] * (self.alpha - eta[x - 1 :])))
            reservoirRight = float(np.sum(mirror[: x - 1] * (self.beta - eta[: x - 1])))
            values[x - 1] = bulk + reservoirLeft - reservoirRight
        return values


def currentW(config: Configuration, law: JumpLaw, x: int) -> float:
    if not 1 <= x <= config.N:
        raise ValueError(f"x must lie in 1..{config.N}, got {x}")
    evaluator = CurrentEvaluator(law, config.N, config.alpha, config.beta)
    return float(evaluator.profile(config.occ)[x - 1])


def currentProfile(source: Union[Configuration, np.ndarray], law: JumpLaw, N: int = None,
                   alpha: float = None, beta: float = None) -> np.ndarray:
    if isinstance(source, Configuration):
        config = source
        return CurrentEvaluator(law, config.N, config.alpha, config.beta).profile(config.occ)
    if N is None or alpha is None or beta is None:
        raise ValueError("N, alpha and beta are required for a density profile")
    return CurrentEvaluator(law, N, alpha, beta).profile(source)
