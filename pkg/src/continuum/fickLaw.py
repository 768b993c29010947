import logging
from typing import Dict, Sequence

from pydantic import BaseModel, Field
from scipy.integrate import quad

from continuum.profile import DEFAULT_NODES, buildProfile
from jumps.jumpLaw import normalizationConstant

logger = logging.getLogger(__name__)

FICK_POINTS = (0.25, 0.5, 0.75)
INDEPENDENCE_TOLERANCE = 2e-5
ROUTE_TOLERANCE = 1e-4


def thetaLimit(gamma: float, alpha: float, beta: float) -> float:
    return normalizationConstant(gamma) * (alpha - beta) / (gamma * (2.0 - gamma))


def fickRhs(gamma: float, alpha: float, beta: float, x: float, epsAbs: float = 1e-12,
            nodes: int = DEFAULT_NODES) -> float:
    """Right-hand side of the fractional Fick's law at the cut x.

    With rho the profile extended by alpha/beta and P its exit-probability
    antiderivative, integrating the double integral by parts in the jump
    length t gives
        (c/gamma) [ -int_0^1 (rho(x+t) - rho(x-t)) (t^{-gamma} - 1) dt
                    + (beta - alpha)(2 P(x) - x - 1/2) ].
    The t-integral runs in u = t^{2-gamma}, where the integrand stays bounded.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    if alpha == beta:
        return 0.0
    profile = buildProfile(gamma, alpha, beta, nodes)
    c = normalizationConstant(gamma)
    power = 2.0 - gamma

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        t = u ** (1.0 / power)
        jump = profile(x + t) - profile(x - t)
        return jump * (1.0 - t**gamma) / t / power

    kinks = sorted({min(x, 1.0 - x) ** power, max(x, 1.0 - x) ** power})
    kinks = [k for k in kinks if 0.0 < k < 1.0]
    jumpPart, _ = quad(integrand, 0.0, 1.0, points=kinks or None, epsabs=epsAbs, limit=400)
    local = (beta - alpha) * (2.0 * profile.antiderivative(x) - x - 0.5)
    return c / gamma * (-jumpPart + local)


def phiLimit(gamma: float, q):
    """phi(q) = c/(gamma(1-gamma)) ((1-q)^{1-gamma} - q^{1-gamma})."""
    c = normalizationConstant(gamma)
    return c / (gamma * (1.0 - gamma)) * ((1.0 - q) ** (1.0 - gamma) - q ** (1.0 - gamma))


def fickViaPhi(gamma: float, alpha: float, beta: float, epsAbs: float = 1e-13,
               nodes: int = DEFAULT_NODES) -> float:
    """int_0^1 rho_bar phi + thetaLimit.

    phi integrates to zero, so only (beta - alpha) int Psi phi survives. Folding
    (1/2, 1) onto (0, 1/2) with Psi(q) = 1 - Psi(1-q) leaves two weighted
    integrals of the smooth exit factor K with algebraic endpoint weights.
    """
    if alpha == beta:
        return 0.0
    profile = buildProfile(gamma, alpha, beta, nodes)
    K = profile.exitFactor
    half = gamma / 2.0
    weightA, _ = quad(lambda u: (1.0 - u) ** (1.0 - half) * K(u), 0.0, 0.5,
                      weight="alg", wvar=(half, 0.0), epsabs=epsAbs, limit=200)
    weightB, _ = quad(lambda u: (1.0 - u) ** half * K(u), 0.0, 0.5,
                      weight="alg", wvar=(1.0 - half, 0.0), epsabs=epsAbs, limit=200)
    edge = 2.0 ** (gamma - 2.0)
    k = normalizationConstant(gamma) / (gamma * (1.0 - gamma))
    psiPhi = k * (2.0 * weightA - 2.0 * weightB + edge / (2.0 - gamma) - (1.0 - edge) / (2.0 - gamma))
    return (beta - alpha) * psiPhi + thetaLimit(gamma, alpha, beta)


class FickConstant(BaseModel):
    gamma: float
    alpha: float
    beta: float
    jInfinity: float
    routeDoubleIntegral: float
    routePhi: float
    perX: Dict[str, float] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)

    @property
    def spread(self) -> float:
        values = list(self.perX.values())
        return max(values) - min(values) if values else 0.0

    @property
    def routeGap(self) -> float:
        return abs(self.routeDoubleIntegral - self.routePhi)

    def toRecord(self) -> dict:
        return {
            "gamma": self.gamma,
            "alpha": self.alpha,
            "beta": self.beta,
            "J_infinity": self.jInfinity,
            "route_double_integral": self.routeDoubleIntegral,
            "route_phi": self.routePhi,
            "per_x": self.perX,
            "tolerances": self.tolerances,
        }


def computeFickConstant(gamma: float, alpha: float, beta: float,
                        points: Sequence[float] = FICK_POINTS, nodes: int = DEFAULT_NODES) -> FickConstant:
    perX = {f"{x:g}": fickRhs(gamma, alpha, beta, x, nodes=nodes) for x in points}
    routeDouble = perX["0.5"] if "0.5" in perX else fickRhs(gamma, alpha, beta, 0.5, nodes=nodes)
    routePhi = fickViaPhi(gamma, alpha, beta, nodes=nodes)
    constant = FickConstant(
        gamma=gamma,
        alpha=alpha,
        beta=beta,
        jInfinity=routeDouble,
        routeDoubleIntegral=routeDouble,
        routePhi=routePhi,
        perX=perX,
        tolerances={
            "independence": INDEPENDENCE_TOLERANCE,
            "route": ROUTE_TOLERANCE,
            "chebyshevNodes": nodes,
        },
    )
    logger.info(
        f"Fick constant gamma={gamma} alpha={alpha} beta={beta}: J={routeDouble:.8f} "
        f"phi-route={routePhi:.8f} spread={constant.spread:.2e}"
    )
    return constant
