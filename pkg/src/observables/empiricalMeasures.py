from typing import Callable

import numpy as np


class EmpiricalMeasures:
    """pi^N = (N-1)^{-1} sum_x eta_x delta_{x/N} and the pair measure (N-1)^{-2} eta_x eta_y.

    eta may be a configuration or a vector of mean occupations; twoPoint, when
    given, holds E[eta_x eta_y] and feeds the pair measure.
    """

    def __init__(self, eta, N: int, twoPoint: np.ndarray = None):
        eta = np.asarray(eta, dtype=np.float64)
        if eta.shape != (N - 1,):
            raise ValueError(f"expected {N - 1} site values, got shape {eta.shape}")
        self.N = int(N)
        self.eta = eta
        self.positions = np.arange(1, self.N) / self.N
        self.twoPoint = np.outer(eta, eta) if twoPoint is None else np.asarray(twoPoint, dtype=np.float64)

    @property
    def siteWeights(self) -> np.ndarray:
        return self.eta / (self.N - 1)

    @property
    def totalMass(self) -> float:
        return float(self.siteWeights.sum())

    def integrate(self, H: Callable) -> float:
        return float(np.dot(self.siteWeights, np.asarray(H(self.positions), dtype=np.float64)))

    def integratePair(self, H: Callable, G: Callable) -> float:
        h = np.asarray(H(self.positions), dtype=np.float64)
        g = np.asarray(G(self.positions), dtype=np.float64)
        return float(h @ self.twoPoint @ g) / (self.N - 1) ** 2

    def pairDefect(self, H: Callable, G: Callable) -> float:
        """<pi_hat, H x G> - <pi, H><pi, G>."""
        return self.integratePair(H, G) - self.integrate(H) * self.integrate(G)
