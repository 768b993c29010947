import math
from typing import Dict

import numpy as np

from jumps.jumpLaw import JumpLaw


def phiNTable(law: JumpLaw, N: int) -> np.ndarray:
    """phi_N(z/N) for z = 1..N-1.

    phi_N(z/N) = -(z/N) N^gamma T(z) + (1 - 1/N - z/N) N^gamma T(N-z) + N^{gamma-1} (Tt(z) - Tt(N-z))
    with T the tail and Tt the moment tail of the jump law.
    """
    if N < 4:
        raise ValueError(f"N must be at least 4, got {N}")
    z = np.arange(1, N)
    q = z / N
    scale = float(N) ** law.gamma
    return (
        -q * scale * law.tail(z)
        + (1.0 - 1.0 / N - q) * scale * law.tail(N - z)
        + scale / N * (law.momentTail(z) - law.momentTail(N - z))
    )


def thetaN(law: JumpLaw, N: int, alpha: float, beta: float) -> float:
    """theta_N = alpha/(N-1) sum_z z T(z) - beta/(N-1) sum_y (N-1-y) T(N-y)."""
    if N < 4:
        raise ValueError(f"N must be at least 4, got {N}")
    z = np.arange(1, N)
    left = math.fsum(z * law.tail(z))
    right = math.fsum((N - 1 - z) * law.tail(N - z))
    return (alpha * left - beta * right) / (N - 1)


def scaledThetaN(law: JumpLaw, N: int, alpha: float, beta: float) -> float:
    return float(N) ** (law.gamma - 1.0) * thetaN(law, N, alpha, beta)


def wwwDecomposition(law: JumpLaw, N: int, alpha: float, beta: float, meanOccupation) -> Dict[str, float]:
    """Split (N-1)^{-1} sum_{x=1}^{N-1} <W_x> into left-reservoir, right-reservoir and bulk parts."""
    eta = np.asarray(meanOccupation, dtype=np.float64)
    if eta.shape != (N - 1,):
        raise ValueError(f"expected {N - 1} mean occupations, got shape {eta.shape}")
    z = np.arange(1, N)
    leftPart = float(np.sum(z * (alpha - eta) * law.tail(z))) / (N - 1)
    rightPart = float(np.sum((N - 1 - z) * (eta - beta) * law.tail(N - z))) / (N - 1)

    gaps = z[None, :] - z[:, None]
    upper = gaps > 0
    weights = np.where(upper, law.jumpProbability(gaps) * gaps, 0.0)
    bulkPart = float(np.sum(weights * (eta[:, None] - eta[None, :]))) / (N - 1)

    return {
        "left": leftPart,
        "right": rightPart,
        "bulk": bulkPart,
        "total": leftPart + rightPart + bulkPart,
    }


def phiRoute(law: JumpLaw, N: int, alpha: float, beta: float, meanOccupation) -> float:
    """<pi^N, phi_N> + N^{gamma-1} theta_N; equals N^{gamma-1} <W_1> under the stationary law."""
    eta = np.asarray(meanOccupation, dtype=np.float64)
    return float(np.dot(phiNTable(law, N), eta)) / (N - 1) + scaledThetaN(law, N, alpha, beta)
