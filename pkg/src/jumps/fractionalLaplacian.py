import logging
from typing import Callable, Optional, Tuple, Union

from scipy.integrate import quad

from jumps.jumpLaw import normalizationConstant

logger = logging.getLogger(__name__)


def _extendedEvaluator(F: Callable, exterior: Tuple[float, float]) -> Callable:
    leftValue, rightValue = exterior

    def evaluate(y: float) -> float:
        if y <= 0.0:
            return leftValue
        if y >= 1.0:
            return rightValue
        return float(F(y))

    return evaluate


def _splitIntegral(
    evaluate: Callable,
    q: float,
    gamma: float,
    epsSplit: float,
    exterior: Tuple[float, float],
    hFloor: float,
    epsAbs: float,
) -> float:
    center = evaluate(q)
    hMax = max(q, 1.0 - q)
    power = 2.0 - gamma

    # u = h^(2-gamma) turns the h^(1-gamma) weight into du/(2-gamma)
    def inner(u: float) -> float:
        h = max(u ** (1.0 / power), hFloor)
        return (2.0 * center - evaluate(q + h) - evaluate(q - h)) / (h * h) / power

    innerValue, _ = quad(inner, 0.0, epsSplit**power, epsabs=epsAbs, limit=200)

    def outer(h: float) -> float:
        return (2.0 * center - evaluate(q + h) - evaluate(q - h)) * h ** (-1.0 - gamma)

    breaks = [p for p in (min(q, 1.0 - q),) if epsSplit < p < hMax]
    outerValue, _ = quad(
        outer, epsSplit, hMax, points=breaks or None, epsabs=epsAbs, limit=200
    )

    farValue = (2.0 * center - exterior[0] - exterior[1]) * hMax ** (-gamma) / gamma
    return innerValue + outerValue + farValue


def fracLaplacian1d(
    F: Callable,
    q: float,
    gamma: float,
    epsSplit: float = 1e-3,
    exterior: Tuple[float, float] = (0.0, 0.0),
    hFloor: float = 1e-5,
    epsAbs: float = 1e-10,
    cGamma: Optional[float] = None,
    returnCheck: bool = False,
) -> Union[float, Tuple[float, float]]:
    """(-Delta)^{gamma/2} F(q) = c_gamma int_0^inf (2F(q) - F(q+h) - F(q-h)) h^{-1-gamma} dh.

    F is evaluated inside (0, 1) only; outside it takes the exterior values
    (zero for compactly supported F). Below epsSplit the symmetrized second
    difference removes the principal value. With returnCheck the result is
    paired with the change observed when epsSplit is halved.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not 0.0 < epsSplit < min(q, 1.0 - q):
        raise ValueError(f"epsSplit={epsSplit} must be positive and below dist(q, boundary)")

    c = normalizationConstant(gamma) if cGamma is None else cGamma
    evaluate = _extendedEvaluator(F, exterior)
    value = c * _splitIntegral(evaluate, q, gamma, epsSplit, exterior, hFloor, epsAbs)

    if not returnCheck:
        return value

    halved = c * _splitIntegral(evaluate, q, gamma, 0.5 * epsSplit, exterior, hFloor, epsAbs)
    delta = abs(halved - value)
    logger.debug(f"fractional Laplacian at q={q}: value={value:.12g} split-halving delta={delta:.3g}")
    return value, delta
