import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from jumps.bumps import MollifierBump, sampleOnGrid, standardBumpCorpus
from jumps.discreteOperators import buildDiscreteOperators
from jumps.fractionalLaplacian import fracLaplacian1d
from jumps.jumpLaw import JumpLaw

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["N", "sup_err_minus", "sup_err_plus", "bound_ratio", "sup_err_K_N"]

PROBE_DENOMINATOR = 64


def _bumpProbes(bump: MollifierBump) -> np.ndarray:
    lo, hi = bump.support
    k = np.arange(1, PROBE_DENOMINATOR)
    q = k / PROBE_DENOMINATOR
    return k[(q > lo) & (q < hi)]


def tailErrors(law: JumpLaw, N: int, a: float) -> Dict[str, float]:
    z = np.arange(1, N)
    q = z / N
    window = (q >= a - 1e-12) & (q <= 1.0 - a + 1e-12)
    z, q = z[window], q[window]

    scale = N**law.gamma
    errMinus = np.abs(scale * law.tail(z) - law.rMinus(q))
    errPlus = np.abs(scale * law.tail(N - z) - law.rPlus(q))
    boundMinus = law.cGamma / N * q ** (-law.gamma - 1.0)
    boundPlus = law.cGamma / N * (1.0 - q) ** (-law.gamma - 1.0)

    return {
        "sup_err_minus": float(errMinus.max()),
        "sup_err_plus": float(errPlus.max()),
        "bound_ratio": float(max((errMinus / boundMinus).max(), (errPlus / boundPlus).max())),
    }


def _onGrid(k: int, N: int) -> bool:
    return (k * N) % PROBE_DENOMINATOR == 0


def operatorErrors(
    law: JumpLaw,
    N: int,
    corpus: Sequence[MollifierBump],
    reference: Dict[int, Dict[int, float]],
) -> float:
    """sup |N^gamma K_N F + (-Delta)^{gamma/2} F| over probes k/64 that are grid points of N."""
    table = buildDiscreteOperators(law, N)
    errors = []
    for index, bump in enumerate(corpus):
        values = table.applyKNAll(sampleOnGrid(bump, N))
        for k, fracValue in reference[index].items():
            if not _onGrid(k, N):
                continue
            site = k * N // PROBE_DENOMINATOR
            errors.append(abs(N**law.gamma * values[site - 1] + fracValue))
    if not errors:
        raise ValueError(f"no probe point k/{PROBE_DENOMINATOR} inside the bump supports lies on the 1/{N} grid")
    return float(max(errors))


def fractionalReference(
    law: JumpLaw, corpus: Sequence[MollifierBump], epsSplit: float = 1e-3
) -> Dict[int, Dict[int, float]]:
    reference = {}
    for index, bump in enumerate(corpus):
        reference[index] = {
            int(k): fracLaplacian1d(
                bump, k / PROBE_DENOMINATOR, law.gamma, epsSplit=epsSplit, cGamma=law.cGamma
            )
            for k in _bumpProbes(bump)
        }
    return reference


def convergenceReport(
    law: JumpLaw,
    nList: List[int],
    a: float,
    corpus: Optional[Sequence[MollifierBump]] = None,
    epsSplit: float = 1e-3,
) -> pd.DataFrame:
    if not nList:
        raise ValueError("nList must not be empty")
    if not 0.0 < a < 0.5:
        raise ValueError(f"a must lie in (0, 1/2), got {a}")
    if a < 2.0 / min(nList):
        raise ValueError(f"a={a} is below 2/min(N)={2.0 / min(nList):.4g}")
    tooSmall = [N for N in nList if N < 1.0 / a]
    if tooSmall:
        raise ValueError(f"every N must be >= 1/a, got {tooSmall}")

    corpus = standardBumpCorpus() if corpus is None else list(corpus)
    probes = {int(k) for bump in corpus for k in _bumpProbes(bump)}
    offGrid = [N for N in nList if not any(_onGrid(k, N) for k in probes)]
    if offGrid:
        raise ValueError(f"no probe point k/{PROBE_DENOMINATOR} of the bump corpus lies on the grid of N={offGrid}")
    reference = fractionalReference(law, corpus, epsSplit)

    rows = []
    for N in sorted(nList):
        row = {"N": int(N)}
        row.update(tailErrors(law, N, a))
        row["sup_err_K_N"] = operatorErrors(law, N, corpus, reference)
        logger.info(
            f"N={N}: tail errors {row['sup_err_minus']:.3e}/{row['sup_err_plus']:.3e}, "
            f"bound ratio {row['bound_ratio']:.3f}, K_N error {row['sup_err_K_N']:.3e}"
        )
        rows.append(row)

    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def decayRatios(report: pd.DataFrame, column: str = "sup_err_minus") -> np.ndarray:
    """err(N_i) / err(N_{i+1}); close to N_{i+1}/N_i for first-order decay."""
    values = report[column].to_numpy()
    return values[:-1] / values[1:]
