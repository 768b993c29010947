from typing import Callable, List, Tuple

import numpy as np


class MollifierBump:
    """exp(-1/(1-t^2)) with t = (q - center)/halfWidth, zero for |t| >= 1."""

    def __init__(self, center: float, halfWidth: float, height: float = 1.0):
        if halfWidth <= 0.0:
            raise ValueError(f"halfWidth must be positive, got {halfWidth}")
        self.center = float(center)
        self.halfWidth = float(halfWidth)
        self.height = float(height)

    @property
    def support(self) -> Tuple[float, float]:
        return (self.center - self.halfWidth, self.center + self.halfWidth)

    def __call__(self, q):
        t = (np.asarray(q, dtype=np.float64) - self.center) / self.halfWidth
        inside = np.abs(t) < 1.0
        tSafe = np.where(inside, t, 0.0)
        value = np.where(inside, self.height * np.exp(-1.0 / (1.0 - tSafe * tSafe)), 0.0)
        return float(value) if value.ndim == 0 else value

    def reflected(self) -> "MollifierBump":
        return MollifierBump(1.0 - self.center, self.halfWidth, self.height)

    def __repr__(self):
        return f"MollifierBump(center={self.center}, halfWidth={self.halfWidth})"


def standardBumpCorpus() -> List[MollifierBump]:
    return [
        MollifierBump(0.5, 0.2),
        MollifierBump(0.4, 0.2),
        MollifierBump(0.55, 0.3),
    ]


def sampleOnGrid(F: Callable, N: int) -> np.ndarray:
    return np.asarray(F(np.arange(N + 1) / N), dtype=np.float64)
