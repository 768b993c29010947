import logging
from functools import lru_cache
from typing import Callable, Dict, Iterable, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial.chebyshev import Chebyshev, chebpts2
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from continuum.poissonKernel import exitProbability, rightExitIntegral
from jumps.fractionalLaplacian import fracLaplacian1d
from jumps.jumpLaw import normalizationConstant

logger = logging.getLogger(__name__)

DEFAULT_NODES = 129
PROFILE_METHODS = ("chebyshev", "pchip")


def _checkParameters(gamma: float, alpha: float, beta: float):
    if not 1.0 < gamma < 2.0:
        raise ValueError(f"gamma must lie in (1, 2), got {gamma}")
    for name, value in (("alpha", alpha), ("beta", beta)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}")


@lru_cache(maxsize=16)
def _exitFactorNodes(gamma: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Chebyshev points of the second kind on [0, 1/2] and K at those points."""
    half = 0.25 * (chebpts2(nodes) + 1.0)
    values = np.array([rightExitIntegral(gamma, q) for q in half])
    half.flags.writeable = False
    values.flags.writeable = False
    logger.info(f"Tabulated exit factor K for gamma={gamma} on {nodes} nodes")
    return half, values


def profileRhoBar(gamma: float, alpha: float, beta: float, q: float) -> float:
    """rho_bar(q) = alpha + (beta - alpha) Psi(q) by direct kernel quadrature."""
    _checkParameters(gamma, alpha, beta)
    if q <= 0.0:
        return float(alpha)
    if q >= 1.0:
        return float(beta)
    if alpha == beta:
        return float(alpha)
    return alpha + (beta - alpha) * exitProbability(gamma, q)


class Profile:
    """Cached stationary profile rho_bar on (0, 1), extended by alpha and beta outside.

    The default representation fits the smooth factor K of
    Psi(q) = (q(1-q))^{gamma/2} K(q) by Chebyshev interpolation on [0, 1/2] and
    mirrors it through Psi(q) = 1 - Psi(1-q). method="pchip" instead
    interpolates Psi itself, monotonically, on the mirrored node set.
    """

    def __init__(self, gamma: float, alpha: float, beta: float, nodes: int = DEFAULT_NODES,
                 method: str = "chebyshev"):
        _checkParameters(gamma, alpha, beta)
        if method not in PROFILE_METHODS:
            raise ValueError(f"method must be one of {PROFILE_METHODS}, got {method!r}")
        if nodes < 8:
            raise ValueError(f"need at least 8 nodes, got {nodes}")
        self.gamma = float(gamma)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.method = method
        self.nodes = int(nodes)

        half, values = _exitFactorNodes(self.gamma, self.nodes)
        self.exitFactor = Chebyshev.fit(half, values, deg=self.nodes - 1, domain=[0.0, 0.5])
        self.grid = np.concatenate((half, 1.0 - half[::-1][1:]))

        self._pchip = None
        if method == "pchip":
            left = (half * (1.0 - half)) ** (self.gamma / 2.0) * values
            psiValues = np.concatenate((left, 1.0 - left[::-1][1:]))
            self._pchip = PchipInterpolator(self.grid, psiValues)
            self._pchipIntegral = self._pchip.antiderivative()

    def psi(self, q):
        q = np.asarray(q, dtype=np.float64)
        if self._pchip is not None:
            value = self._pchip(np.clip(q, 0.0, 1.0))
        else:
            near = np.clip(np.minimum(q, 1.0 - q), 0.0, 0.5)
            edge = (near * (1.0 - near)) ** (self.gamma / 2.0) * self.exitFactor(near)
            value = np.where(q <= 0.5, edge, 1.0 - edge)
        value = np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, value))
        return float(value) if value.ndim == 0 else value

    def __call__(self, q):
        value = self.alpha + (self.beta - self.alpha) * np.asarray(self.psi(q))
        return float(value) if value.ndim == 0 else value

    def _halfAntiderivative(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        value, _ = quad(
            lambda q: (1.0 - q) ** (self.gamma / 2.0) * self.exitFactor(q),
            0.0, t, weight="alg", wvar=(self.gamma / 2.0, 0.0), epsabs=1e-13, limit=200,
        )
        return value

    def antiderivative(self, t: float) -> float:
        """P(t) = int_0^t Psi(q) dq for t in [0, 1]."""
        t = min(max(float(t), 0.0), 1.0)
        if self._pchip is not None:
            return float(self._pchipIntegral(t))
        if t <= 0.5:
            return self._halfAntiderivative(t)
        return t - 0.5 + self._halfAntiderivative(1.0 - t)

    def integrateAgainst(self, H: Callable) -> float:
        """int_0^1 H(q) rho_bar(q) dq."""
        value, _ = quad(lambda q: float(H(q)) * self(q), 0.0, 1.0, epsabs=1e-11, limit=200)
        return value

    def nodeTable(self) -> pd.DataFrame:
        return pd.DataFrame({"q": self.grid, "rho_bar": self(self.grid)})

    def __repr__(self):
        return (f"Profile(gamma={self.gamma}, alpha={self.alpha}, beta={self.beta}, "
                f"method={self.method!r}, nodes={self.nodes})")


@lru_cache(maxsize=32)
def buildProfile(gamma: float, alpha: float, beta: float, nodes: int = DEFAULT_NODES,
                 method: str = "chebyshev") -> Profile:
    return Profile(gamma, alpha, beta, nodes, method)


def checkWeakSolution(profile: Profile, H: Callable, epsSplit: float = 1e-3, epsAbs: float = 1e-11) -> float:
    """-int_0^1 rho_bar (-Delta)^{gamma/2} H + int_0^1 (alpha r^- + beta r^+) H.

    H must expose support = (a, b) with 0 < a < b < 1. Off the support the
    fractional Laplacian reduces to -c_gamma int H(y) |y - q|^{-1-gamma} dy.
    """
    support = getattr(H, "support", None)
    if support is None:
        raise ValueError("test function must expose a compact support (a, b) inside (0, 1)")
    a, b = support
    if not 0.0 < a < b < 1.0:
        raise ValueError(f"support {support} is not compact in (0, 1)")

    gamma = profile.gamma
    c = normalizationConstant(gamma)

    def fracH(q: float) -> float:
        if a < q < b:
            split = min(epsSplit, 0.5 * min(q, 1.0 - q))
            return fracLaplacian1d(H, q, gamma, epsSplit=split, cGamma=c, epsAbs=epsAbs * 0.1)
        value, _ = quad(lambda y: float(H(y)) * abs(y - q) ** (-1.0 - gamma), a, b,
                        epsabs=epsAbs * 0.1, limit=200)
        return -c * value

    bulk = 0.0
    for lo, hi in ((0.0, a), (a, b), (b, 1.0)):
        piece, _ = quad(lambda q: profile(q) * fracH(q), lo, hi, epsabs=epsAbs, limit=200)
        bulk += piece

    def reservoirs(q: float) -> float:
        rMinus = c / gamma * q ** (-gamma)
        rPlus = c / gamma * (1.0 - q) ** (-gamma)
        return (profile.alpha * rMinus + profile.beta * rPlus) * float(H(q))

    boundary, _ = quad(reservoirs, a, b, epsabs=epsAbs, limit=200)
    residual = -bulk + boundary
    logger.debug(f"weak-solution residual for {H!r}: {residual:.3e}")
    return residual


def interiorHarmonicity(profile: Profile, points: Iterable[float] = (0.3, 0.5, 0.7),
                        epsSplit: float = 0.05, hFloor: float = 1e-3) -> Dict[float, float]:
    """(-Delta)^{gamma/2} rho_bar at interior points, with the alpha/beta exterior."""
    return {
        float(q): fracLaplacian1d(profile, q, profile.gamma, epsSplit=epsSplit,
                                  exterior=(profile.alpha, profile.beta), hFloor=hFloor)
        for q in points
    }


def holderExponentFit(gamma: float, alpha: float, beta: float, exponents: Iterable[int] = range(8, 21)) -> float:
    """Log-log slope of rho_bar(eps) - alpha against eps = 2^-k."""
    if alpha == beta:
        raise ValueError("the boundary layer is flat when alpha == beta")
    eps = np.array([2.0 ** (-k) for k in exponents])
    gaps = np.array([profileRhoBar(gamma, alpha, beta, e) - alpha for e in eps])
    slope, _ = np.polyfit(np.log(eps), np.log(np.abs(gaps)), 1)
    return float(slope)
