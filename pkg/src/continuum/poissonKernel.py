import logging
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import betainc

logger = logging.getLogger(__name__)

RADIUS = 0.5
CENTER = 0.5
EDGE_SPLIT = 2.0


def kernelConstant(gamma: float) -> float:
    """C_gamma = Gamma(1/2) pi^{-3/2} sin(pi gamma / 2)."""
    return math.gamma(0.5) * math.pi ** (-1.5) * math.sin(math.pi * gamma / 2.0)


def _checkInterior(q: float):
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}; use rho_bar(0) = alpha, rho_bar(1) = beta")


def poissonKernel(gamma: float, q: float, y: float) -> float:
    """Exit density from (0, 1) of the symmetric gamma-stable process started at q."""
    _checkInterior(q)
    if 0.0 <= y <= 1.0:
        return 0.0
    inside = RADIUS**2 - (q - CENTER) ** 2
    outside = (y - CENTER) ** 2 - RADIUS**2
    return kernelConstant(gamma) * (inside / outside) ** (gamma / 2.0) / abs(q - y)


def rightExitIntegral(gamma: float, q: float, epsAbs: float = 1e-13) -> float:
    """K(q) = C_gamma int_1^inf (y(y-1))^{-gamma/2} / (y - q) dy, finite for q in [0, 1).

    Near y = 1 the substitution y - 1 = u^{1/s}, s = 1 - gamma/2, cancels the
    (y-1)^{-gamma/2} singularity exactly.
    """
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q}")
    s = 1.0 - gamma / 2.0

    def nearEdge(u: float) -> float:
        y = 1.0 + u ** (1.0 / s)
        return y ** (-gamma / 2.0) / (y - q) / s

    def farField(y: float) -> float:
        return (y * (y - 1.0)) ** (-gamma / 2.0) / (y - q)

    near, _ = quad(nearEdge, 0.0, (EDGE_SPLIT - 1.0) ** s, epsabs=epsAbs, epsrel=1e-12, limit=200)
    far, _ = quad(farField, EDGE_SPLIT, np.inf, epsabs=epsAbs, epsrel=1e-12, limit=200)
    return kernelConstant(gamma) * (near + far)


def exitProbability(gamma: float, q: float) -> float:
    """Psi(q): probability of leaving (0, 1) to the right, as a kernel integral over y > 1."""
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    return (q * (1.0 - q)) ** (gamma / 2.0) * rightExitIntegral(gamma, q)


def exitProbabilityClosedForm(gamma, q):
    """Regularized incomplete beta I_q(gamma/2, gamma/2)."""
    q = np.clip(np.asarray(q, dtype=np.float64), 0.0, 1.0)
    value = betainc(gamma / 2.0, gamma / 2.0, q)
    return float(value) if value.ndim == 0 else value


def kernelMass(gamma: float, q: float) -> float:
    _checkInterior(q)
    return exitProbability(gamma, q) + exitProbability(gamma, 1.0 - q)
