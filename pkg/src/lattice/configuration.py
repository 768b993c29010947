from typing import Optional

import numpy as np


class Configuration:
    """Occupations eta_z for z = 1..N-1 with reservoir densities alpha (left), beta (right).

    occ[z - 1] holds eta_z. Sites z <= 0 read as alpha and z >= N as beta.
    """

    def __init__(self, occ, alpha: float, beta: float):
        occ = np.asarray(occ)
        if occ.ndim != 1 or occ.size < 1:
            raise ValueError(f"occupation vector must be 1-d and non-empty, got shape {occ.shape}")
        if not np.all((occ == 0) | (occ == 1)):
            raise ValueError("occupations must be 0 or 1")
        for name, value in (("alpha", alpha), ("beta", beta)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

        self.occ = occ.astype(np.int8)
        self.alpha = float(alpha)
        self.beta = float(beta)

    @property
    def N(self) -> int:
        return self.occ.size + 1

    def eta(self, z: int) -> float:
        if z <= 0:
            return self.alpha
        if z >= self.N:
            return self.beta
        return float(self.occ[z - 1])

    def copy(self) -> "Configuration":
        return Configuration(self.occ.copy(), self.alpha, self.beta)

    def swapped(self, x: int, y: int) -> "Configuration":
        other = self.copy()
        other.occ[x - 1], other.occ[y - 1] = self.occ[y - 1], self.occ[x - 1]
        return other

    def flipped(self, z: int) -> "Configuration":
        other = self.copy()
        other.occ[z - 1] = 1 - self.occ[z - 1]
        return other

    def toIndex(self) -> int:
        return int(np.sum(self.occ.astype(np.int64) << np.arange(self.occ.size, dtype=np.int64)))

    def toHex(self) -> str:
        return np.packbits(self.occ.astype(np.uint8), bitorder="little").tobytes().hex()

    @classmethod
    def fromIndex(cls, N: int, index: int, alpha: float, beta: float) -> "Configuration":
        bits = (int(index) >> np.arange(N - 1, dtype=np.int64)) & 1
        return cls(bits, alpha, beta)

    @classmethod
    def fromHex(cls, N: int, hexString: str, alpha: float, beta: float) -> "Configuration":
        raw = np.frombuffer(bytes.fromhex(hexString), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[: N - 1]
        if bits.size != N - 1:
            raise ValueError(f"hex string too short for N={N}")
        return cls(bits, alpha, beta)

    @classmethod
    def random(
        cls,
        N: int,
        alpha: float,
        beta: float,
        rng: np.random.Generator,
        density: Optional[float] = None,
    ) -> "Configuration":
        if N < 2:
            raise ValueError(f"N must be at least 2, got {N}")
        density = 0.5 * (alpha + beta) if density is None else density
        return cls((rng.random(N - 1) < density).astype(np.int8), alpha, beta)

    @classmethod
    def full(cls, N: int, alpha: float, beta: float, value: int = 1) -> "Configuration":
        return cls(np.full(N - 1, value, dtype=np.int8), alpha, beta)

    def __eq__(self, other):
        return (
            isinstance(other, Configuration)
            and np.array_equal(self.occ, other.occ)
            and self.alpha == other.alpha
            and self.beta == other.beta
        )

    def __repr__(self):
        return f"Configuration(N={self.N}, alpha={self.alpha}, beta={self.beta}, occ={''.join(map(str, self.occ))})"
