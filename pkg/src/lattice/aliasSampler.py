import numpy as np


class AliasSampler:
    """Vose alias table over indices 0..n-1 with probability proportional to weights."""

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a non-empty 1-d array")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)) or weights.sum() <= 0:
            raise ValueError("weights must be finite, non-negative and not all zero")

        n = weights.size
        self.size = n
        self.total = float(weights.sum())
        self.probabilities = np.ones(n, dtype=np.float64)
        self.aliases = np.arange(n, dtype=np.int64)

        scaled = weights * n / self.total
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]

        while small and large:
            lo = small.pop()
            hi = large.pop()
            self.probabilities[lo] = scaled[lo]
            self.aliases[lo] = hi
            scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
            if scaled[hi] < 1.0:
                small.append(hi)
            else:
                large.append(hi)

        for leftover in small + large:
            self.probabilities[leftover] = 1.0
            self.aliases[leftover] = leftover

    def draw(self, u: float) -> int:
        """One uniform: the integer part picks the column, the fraction tosses the coin."""
        scaled = u * self.size
        column = min(int(scaled), self.size - 1)
        if scaled - column < self.probabilities[column]:
            return column
        return int(self.aliases[column])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        columns = rng.integers(0, self.size, size=size)
        keep = rng.random(size) < self.probabilities[columns]
        return np.where(keep, columns, self.aliases[columns])

    def impliedProbabilities(self) -> np.ndarray:
        implied = self.probabilities.copy()
        np.add.at(implied, self.aliases, 1.0 - self.probabilities)
        return implied / self.size
