import logging
from typing import Callable, Iterable

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from jumps.jumpLaw import JumpLaw
from lattice.configuration import Configuration

logger = logging.getLogger(__name__)

N_EXACT_MAX = 14
DENSE_STATE_LIMIT = 4096
RESIDUAL_TOLERANCE = 1e-10
NEGATIVE_TOLERANCE = 1e-12

GENERATOR_PARTS = ("bulk", "left", "right")


class StationarySolveError(RuntimeError):
    pass


def applyGenerator(
    config: Configuration,
    law: JumpLaw,
    f: Callable[[Configuration], float],
    parts: Iterable[str] = GENERATOR_PARTS,
) -> float:
    """(L_N f)(eta) by enumerating every single transition out of eta.

    Each unordered pair {x, y} exchanges at rate p(y - x); the left (right)
    reservoir flips site x at rate T(x) (T(N - x)) times the probability that
    a Bernoulli(alpha) (Bernoulli(beta)) draw differs from eta_x.
    """
    parts = set(parts)
    unknown = parts - set(GENERATOR_PARTS)
    if unknown:
        raise ValueError(f"unknown generator parts {sorted(unknown)}")

    N = config.N
    occ = config.occ
    base = f(config)
    total = 0.0

    if "bulk" in parts:
        for x in range(1, N):
            for y in range(x + 1, N):
                if occ[x - 1] != occ[y - 1]:
                    total += law.jumpProbability(y - x) * (f(config.swapped(x, y)) - base)

    for x in range(1, N):
        eta = occ[x - 1]
        rate = 0.0
        if "left" in parts:
            rate += law.tail(x) * (eta * (1.0 - config.alpha) + (1 - eta) * config.alpha)
        if "right" in parts:
            rate += law.tail(N - x) * (eta * (1.0 - config.beta) + (1 - eta) * config.beta)
        if rate:
            total += rate * (f(config.flipped(x)) - base)

    return total


def generatorOnOccupation(config: Configuration, law: JumpLaw, x: int) -> float:
    """Closed form of L_N eta_x."""
    N = config.N
    sites = np.arange(1, N)
    occ = config.occ.astype(np.float64)
    eta = occ[x - 1]
    bulk = float(np.sum(law.jumpProbability(sites - x) * (occ - eta)))
    return bulk + law.tail(x) * (config.alpha - eta) + law.tail(N - x) * (config.beta - eta)


def productIdentityResidual(config: Configuration, law: JumpLaw, j: int, k: int) -> float:
    """Largest violation of the product rules for eta_j eta_k over the three generator parts.

    The bulk part satisfies L(eta_j eta_k) = eta_j L eta_k + eta_k L eta_j - p(k-j)(eta_k-eta_j)^2;
    both reservoir parts act as derivations.
    """
    if j == k:
        raise ValueError("the product identities need j != k")

    def product(c):
        return c.eta(j) * c.eta(k)

    def single(site):
        return lambda c: c.eta(site)

    etaJ, etaK = config.eta(j), config.eta(k)
    worst = 0.0
    for part in GENERATOR_PARTS:
        lhs = applyGenerator(config, law, product, parts=(part,))
        rhs = etaJ * applyGenerator(config, law, single(k), parts=(part,)) + etaK * applyGenerator(
            config, law, single(j), parts=(part,)
        )
        if part == "bulk":
            rhs -= law.jumpProbability(k - j) * (etaK - etaJ) ** 2
        worst = max(worst, abs(lhs - rhs))
    return worst


class ExactGenerator:
    """Rate matrix of the process on {0,1}^{N-1}; state index bit i holds eta_{i+1}."""

    def __init__(self, N: int, law: JumpLaw, alpha: float, beta: float, nExactMax: int = N_EXACT_MAX):
        if N < 2:
            raise ValueError(f"N must be at least 2, got {N}")
        if N > nExactMax:
            raise ValueError(
                f"N={N} exceeds the exact-solve limit {nExactMax}; use the KMC simulator for larger systems"
            )
        for name, value in (("alpha", alpha), ("beta", beta)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

        self.N = int(N)
        self.law = law
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.numSites = self.N - 1
        self.numStates = 1 << self.numSites
        self.states = np.arange(self.numStates, dtype=np.int64)
        self.bits = ((self.states[:, None] >> np.arange(self.numSites, dtype=np.int64)) & 1).astype(np.float64)
        self.matrix = self._assemble()

    def _assemble(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        states = self.states

        for i in range(self.numSites):
            for j in range(i + 1, self.numSites):
                differ = ((states >> i) & 1) != ((states >> j) & 1)
                source = states[differ]
                rows.append(source)
                cols.append(source ^ ((1 << i) | (1 << j)))
                vals.append(np.full(source.size, self.law.jumpProbability(j - i)))

        for i in range(self.numSites):
            z = i + 1
            eta = self.bits[:, i]
            rate = self.law.tail(z) * (eta * (1.0 - self.alpha) + (1.0 - eta) * self.alpha)
            rate = rate + self.law.tail(self.N - z) * (eta * (1.0 - self.beta) + (1.0 - eta) * self.beta)
            positive = rate > 0.0
            rows.append(states[positive])
            cols.append(states[positive] ^ (1 << i))
            vals.append(rate[positive])

        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        vals = np.concatenate(vals) if vals else np.zeros(0)

        offDiagonal = sp.coo_matrix((vals, (rows, cols)), shape=(self.numStates, self.numStates)).tocsr()
        exitRates = np.asarray(offDiagonal.sum(axis=1)).ravel()
        return (offDiagonal - sp.diags(exitRates)).tocsr()

    def denseMatrix(self) -> np.ndarray:
        return self.matrix.toarray()

    def rowSums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def bernoulliVector(self, rho: float) -> np.ndarray:
        ones = self.bits.sum(axis=1)
        return rho**ones * (1.0 - rho) ** (self.numSites - ones)

    def leftResidual(self, mu: np.ndarray) -> float:
        return float(np.max(np.abs(self.matrix.T @ mu)))

    def meanOccupations(self, mu: np.ndarray) -> np.ndarray:
        return self.bits.T @ mu

    def twoPointMatrix(self, mu: np.ndarray) -> np.ndarray:
        """E[eta_x eta_y] for x, y in 1..N-1."""
        return self.bits.T @ (self.bits * mu[:, None])

    def expectation(self, mu: np.ndarray, f: Callable[[Configuration], float]) -> float:
        values = np.array(
            [f(Configuration.fromIndex(self.N, s, self.alpha, self.beta)) for s in range(self.numStates)]
        )
        return float(values @ mu)


def buildExactGenerator(
    N: int, law: JumpLaw, alpha: float, beta: float, nExactMax: int = N_EXACT_MAX
) -> ExactGenerator:
    return ExactGenerator(N, law, alpha, beta, nExactMax)


def solveStationary(gen: ExactGenerator) -> np.ndarray:
    """Normalized left null vector of the rate matrix, by a bordered linear solve."""
    n = gen.numStates
    rhs = np.zeros(n)
    rhs[-1] = 1.0

    try:
        if n <= DENSE_STATE_LIMIT:
            system = gen.denseMatrix().T
            system[-1, :] = 1.0
            mu = scipy.linalg.solve(system, rhs)
        else:
            transposed = gen.matrix.T.tocsr()
            system = sp.vstack([transposed[:-1, :], sp.csr_matrix(np.ones((1, n)))]).tocsc()
            mu = spsolve(system, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as error:
        raise StationarySolveError(f"stationary solve failed for N={gen.N}: {error}") from error

    if not np.all(np.isfinite(mu)):
        raise StationarySolveError(f"stationary solve for N={gen.N} returned non-finite entries (rank anomaly)")
    if mu.min() < -NEGATIVE_TOLERANCE:
        raise StationarySolveError(f"stationary solve for N={gen.N} returned negative mass {mu.min():.3e}")

    residual = gen.leftResidual(mu)
    if residual > RESIDUAL_TOLERANCE:
        raise StationarySolveError(f"stationary residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.0e} for N={gen.N}")

    logger.info(f"Solved stationary law N={gen.N} ({n} states), residual {residual:.2e}")
    return mu
