import json
import logging
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel

from continuum.fickLaw import computeFickConstant, fickRhs, fickViaPhi, thetaLimit
from continuum.poissonKernel import exitProbabilityClosedForm, kernelMass
from continuum.profile import buildProfile, checkWeakSolution, holderExponentFit, interiorHarmonicity
from continuum.stableExit import stableExitProbability
from jobs.replicaJob import ReplicaJobRunner
from jumps.bumps import standardBumpCorpus
from jumps.convergence import convergenceReport
from jumps.jumpLaw import JumpLaw, buildJumpLaw, partialSumNormalization
from lattice.configuration import Configuration
from lattice.exactGenerator import (
    applyGenerator,
    buildExactGenerator,
    productIdentityResidual,
    solveStationary,
)
from observables.current import CurrentEvaluator
from observables.estimates import currentsAgree
from observables.fickFunctionals import phiRoute, scaledThetaN, wwwDecomposition
from pipeline.latticeMeasurements import agreementScore, measureExact, measureKmc, pairDefect
from utils.configLoader import ExperimentConfig
from utils.manifest import RunManifest

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
STATIONARY_TOLERANCE = 1e-10
STATISTICAL_SIGMAS = 4.0
ROUTE_GRID = [
    (gamma, alpha, beta)
    for gamma in (1.25, 1.5, 1.75)
    for alpha, beta in ((0.2, 0.8), (0.8, 0.2), (0.1, 0.5), (0.6, 0.3))
]


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


class ValidationPipeline:
    """Small-scale run of every identity, oracle and trend check; one verdict per check."""

    def __init__(self, config: ExperimentConfig, outDir: Optional[str] = None,
                 manifest: Optional[RunManifest] = None, runner: Optional[ReplicaJobRunner] = None,
                 law: Optional[JumpLaw] = None, samples: int = 200, kmcTime: float = 2.0e4):
        self.config = config
        self.outDir = Path(outDir or config.outDir)
        self.manifest = manifest
        self.runner = runner or ReplicaJobRunner(config.threads, showProgress=False)
        self.law = law if law is not None else buildJumpLaw(config.gamma, config.kMax)
        self.samples = samples
        self.kmcTime = kmcTime
        self.rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(config.seed)))

    def _randomConfigurations(self, N: int, count: int):
        alpha, beta = self.config.alpha, self.config.beta
        for _ in range(count):
            yield Configuration.random(N, alpha, beta, self.rng, density=self.rng.random())

    # lattice identities

    def checkNormalization(self) -> CheckResult:
        partial = partialSumNormalization(self.law.gamma)
        error = max(abs(partial - self.law.cGamma), self.law.normalizationError())
        return CheckResult(name="normalization", passed=error <= 1e-10, value=error, threshold=1e-10,
                           detail="c_gamma against explicit partial sums; 2 T(1) = 1")

    def checkContinuityEquation(self, sizes=(4, 8, 12)) -> CheckResult:
        worst = 0.0
        for N in sizes:
            evaluator = CurrentEvaluator(self.law, N, self.config.alpha, self.config.beta)
            for config in self._randomConfigurations(N, self.samples // len(sizes)):
                currents = evaluator.directProfile(config.occ)
                for x in range(1, N):
                    lhs = applyGenerator(config, self.law, lambda c, site=x: c.eta(site))
                    worst = max(worst, abs(lhs - (currents[x - 1] - currents[x])))
        return CheckResult(name="continuity-equation", passed=worst <= IDENTITY_TOLERANCE, value=worst,
                           threshold=IDENTITY_TOLERANCE,
                           detail="continuity-equation: L_N eta_x = W_x - W_{x+1} on random configurations")

    def checkProductIdentities(self, sizes=(4, 8)) -> CheckResult:
        worst = 0.0
        for N in sizes:
            for config in self._randomConfigurations(N, max(self.samples // 20, 2)):
                j, k = sorted(self.rng.choice(np.arange(1, N), size=2, replace=False))
                worst = max(worst, productIdentityResidual(config, self.law, int(j), int(k)))
        return CheckResult(name="product-identities", passed=worst <= IDENTITY_TOLERANCE, value=worst,
                           threshold=IDENTITY_TOLERANCE, detail="generator action on eta_j eta_k per part")

    def checkBernoulliStationarity(self, N: int = 8) -> CheckResult:
        worst = 0.0
        for rho in (0.3, 0.5):
            gen = buildExactGenerator(N, self.law, rho, rho)
            worst = max(worst, gen.leftResidual(gen.bernoulliVector(rho)))
        return CheckResult(name="bernoulli-stationarity", passed=worst <= STATIONARY_TOLERANCE, value=worst,
                           threshold=STATIONARY_TOLERANCE, detail=f"product Bernoulli left null vector, N={N}")

    def _exactLaw(self, N: int):
        gen = buildExactGenerator(N, self.law, self.config.alpha, self.config.beta)
        return gen, solveStationary(gen)

    def checkCurrentConstancy(self, N: int = 8) -> CheckResult:
        gen, mu = self._exactLaw(N)
        currents = CurrentEvaluator(self.law, N, self.config.alpha, self.config.beta).profile(gen.meanOccupations(mu))
        spread = float(np.max(np.abs(currents - currents[0])))
        return CheckResult(name="current-constancy", passed=spread <= IDENTITY_TOLERANCE, value=spread,
                           threshold=IDENTITY_TOLERANCE, detail=f"max_x |<W_x> - <W_1>|, N={N}")

    def checkWwwDecomposition(self, N: int = 8) -> CheckResult:
        gen, mu = self._exactLaw(N)
        means = gen.meanOccupations(mu)
        parts = wwwDecomposition(self.law, N, self.config.alpha, self.config.beta, means)
        currents = CurrentEvaluator(self.law, N, self.config.alpha, self.config.beta).profile(means)
        error = abs(parts["total"] - float(np.mean(currents[: N - 1])))
        return CheckResult(name="www-decomposition", passed=error <= IDENTITY_TOLERANCE, value=error,
                           threshold=IDENTITY_TOLERANCE, detail="left + right + bulk equals the averaged current")

    def checkPhiThetaIdentity(self, N: int = 8) -> CheckResult:
        gen, mu = self._exactLaw(N)
        means = gen.meanOccupations(mu)
        w1 = CurrentEvaluator(self.law, N, self.config.alpha, self.config.beta).w1(means)
        error = abs(float(N) ** (self.law.gamma - 1.0) * w1
                    - phiRoute(self.law, N, self.config.alpha, self.config.beta, means))
        return CheckResult(name="phi-theta-identity", passed=error <= IDENTITY_TOLERANCE, value=error,
                           threshold=IDENTITY_TOLERANCE, detail="N^{gamma-1}<W_1> = <pi^N, phi_N> + N^{gamma-1} theta_N")

    def checkDecorrelation(self, sizes=(4, 8, 12)) -> CheckResult:
        defects = [
            abs(pairDefect(measureExact(self.law, N, self.config.alpha, self.config.beta),
                           lambda q: q, lambda q: 1.0 - q))
            for N in sizes
        ]
        shrinking = bool(np.all(np.diff(defects) < 0.0))
        return CheckResult(name="decorrelation", passed=shrinking, value=defects[-1], threshold=defects[0],
                           detail="|<pi_hat, H x G> - <pi, H><pi, G>| for H = q, G = 1 - q at N="
                           + ", ".join(f"{N}: {d:.3e}" for N, d in zip(sizes, defects)))

    def checkOperatorConvergence(self, sizes=(64, 128, 256, 512)) -> CheckResult:
        report = convergenceReport(self.law, list(sizes), 0.2, epsSplit=self.config.epsSplit)
        ratio = float(report["bound_ratio"].max())
        errors = report["sup_err_K_N"].to_numpy()
        nonincreasing = bool(np.all(np.diff(errors) <= 0.0))
        return CheckResult(name="tail-bound", passed=ratio <= 1.0 and nonincreasing, value=ratio, threshold=1.0,
                           detail=f"bound ratio over [0.2, 0.8]; K_N error nonincreasing: {nonincreasing}")

    def checkThetaLimitTrend(self, sizes=tuple(2**k for k in range(6, 13))) -> CheckResult:
        alpha, beta = self.config.alpha, self.config.beta
        limit = thetaLimit(self.law.gamma, alpha, beta)
        gaps = np.array([abs(scaledThetaN(self.law, N, alpha, beta) - limit) for N in sizes])
        decreasing = bool(np.all(np.diff(gaps) < 0.0))
        return CheckResult(name="theta-limit-trend", passed=decreasing, value=float(gaps[-1]), threshold=float(gaps[0]),
                           detail="|N^{gamma-1} theta_N - theta_limit| strictly decreasing")

    def checkKmcVsExact(self, N: int = 8) -> CheckResult:
        exact = measureExact(self.law, N, self.config.alpha, self.config.beta)
        kmc = measureKmc(self.config, self.law, N, self.runner, manifest=self.manifest, tMeasure=self.kmcTime)
        score = agreementScore(exact, kmc)
        fluxOk = currentsAgree(kmc.w1, kmc.w1Flux, STATISTICAL_SIGMAS)
        return CheckResult(name="kmc-vs-exact", passed=score <= STATISTICAL_SIGMAS and fluxOk, value=score,
                           threshold=STATISTICAL_SIGMAS,
                           detail=f"worst site/W_1 deviation in sigmas, N={N}; flux estimator agrees: {fluxOk}")

    # continuum

    def checkKernelMass(self) -> CheckResult:
        points = np.linspace(0.025, 0.975, 20)
        worst = max(abs(kernelMass(self.law.gamma, q) - 1.0) for q in points)
        return CheckResult(name="kernel-mass", passed=worst <= 1e-8, value=worst, threshold=1e-8,
                           detail="Poisson kernel mass at 20 interior points")

    def checkProfileShape(self) -> CheckResult:
        gamma, alpha, beta = self.law.gamma, self.config.alpha, self.config.beta
        profile = buildProfile(gamma, alpha, beta, self.config.chebyshevNodes)
        mirror = buildProfile(gamma, beta, alpha, self.config.chebyshevNodes)
        grid = profile.grid
        values = profile(grid)
        step = np.sign(beta - alpha) * np.diff(values)
        errors = {
            "midpoint": abs(profile(0.5) - 0.5 * (alpha + beta)),
            "symmetry": float(np.max(np.abs(values - mirror(1.0 - grid)))),
            "monotonicity": float(max(0.0, -step.min())),
            "bounds": float(max(0.0, (values - max(alpha, beta)).max(), (min(alpha, beta) - values).max())),
            "closed-form": float(np.max(np.abs(profile.psi(grid) - exitProbabilityClosedForm(gamma, grid)))),
        }
        worst = max(errors.values())
        return CheckResult(name="profile-shape", passed=worst <= 1e-7, value=worst, threshold=1e-7,
                           detail=", ".join(f"{key}={value:.1e}" for key, value in errors.items()))

    def checkHolderExponent(self) -> CheckResult:
        slope = holderExponentFit(self.law.gamma, self.config.alpha, self.config.beta)
        error = abs(slope - self.law.gamma / 2.0)
        return CheckResult(name="holder-exponent", passed=error <= 0.05, value=slope, threshold=0.05,
                           detail=f"boundary slope against gamma/2 = {self.law.gamma / 2.0}")

    def checkInteriorHarmonicity(self) -> CheckResult:
        profile = buildProfile(self.law.gamma, self.config.alpha, self.config.beta, self.config.chebyshevNodes)
        values = interiorHarmonicity(profile)
        worst = max(abs(v) for v in values.values())
        return CheckResult(name="interior-harmonicity", passed=worst <= 1e-4, value=worst, threshold=1e-4,
                           detail="(-Delta)^{gamma/2} rho_bar at q = 0.3, 0.5, 0.7")

    def checkWeakSolution(self) -> CheckResult:
        profile = buildProfile(self.law.gamma, self.config.alpha, self.config.beta, self.config.chebyshevNodes)
        worst = max(abs(checkWeakSolution(profile, bump)) for bump in standardBumpCorpus())
        return CheckResult(name="weak-solution", passed=worst <= 1e-5, value=worst, threshold=1e-5,
                           detail="weak-form residual on the bump corpus")

    def checkExitMonteCarlo(self) -> CheckResult:
        gamma = self.law.gamma
        estimate = stableExitProbability(gamma, 0.25, walkers=self.config.mcWalkers, seed=self.config.seed)
        target = exitProbabilityClosedForm(gamma, 0.25)
        score = abs(estimate.probability - target) / estimate.stderr
        return CheckResult(name="exit-monte-carlo", passed=score <= STATISTICAL_SIGMAS, value=score,
                           threshold=STATISTICAL_SIGMAS,
                           detail=f"walk-on-spheres Psi(0.25)={estimate.probability:.5f} vs {target:.5f}")

    def checkRouteConsistency(self) -> CheckResult:
        nodes = self.config.chebyshevNodes
        worst = max(abs(fickRhs(g, a, b, 0.5, nodes=nodes) - fickViaPhi(g, a, b, nodes=nodes))
                    for g, a, b in ROUTE_GRID)
        return CheckResult(name="route-consistency", passed=worst <= 1e-4, value=worst, threshold=1e-4,
                           detail=f"double-integral vs phi route on {len(ROUTE_GRID)} (gamma, alpha, beta) points")

    def checkFickIndependence(self) -> CheckResult:
        constant = computeFickConstant(self.law.gamma, self.config.alpha, self.config.beta,
                                       nodes=self.config.chebyshevNodes)
        return CheckResult(name="fick-independence", passed=constant.spread <= 2e-5, value=constant.spread,
                           threshold=2e-5, detail="fick_rhs spread over x = 0.25, 0.5, 0.75")

    def checks(self) -> List[Callable[[], CheckResult]]:
        return [
            self.checkNormalization,
            self.checkOperatorConvergence,
            self.checkContinuityEquation,
            self.checkProductIdentities,
            self.checkBernoulliStationarity,
            self.checkCurrentConstancy,
            self.checkWwwDecomposition,
            self.checkPhiThetaIdentity,
            self.checkDecorrelation,
            self.checkKernelMass,
            self.checkProfileShape,
            self.checkHolderExponent,
            self.checkInteriorHarmonicity,
            self.checkWeakSolution,
            self.checkRouteConsistency,
            self.checkFickIndependence,
            self.checkThetaLimitTrend,
            self.checkKmcVsExact,
            self.checkExitMonteCarlo,
        ]

    def run(self, checks: Optional[List[Callable[[], CheckResult]]] = None) -> List[CheckResult]:
        print("=" * 70)
        print(f"VALIDATION  gamma={self.law.gamma} alpha={self.config.alpha} beta={self.config.beta}")
        print("=" * 70)
        results = []
        for check in checks or self.checks():
            try:
                result = check()
            except Exception as e:
                logger.error(f"{check.__name__} raised: {e}", exc_info=True)
                result = CheckResult(name=check.__name__, passed=False, value=float("nan"), threshold=float("nan"),
                                     detail=f"raised {type(e).__name__}: {e}")
            results.append(result)
            print(f"[{'PASS' if result.passed else 'FAIL'}] {result.name:24s} value={result.value:.3e} "
                  f"threshold={result.threshold:.3e}")

        self.outDir.mkdir(parents=True, exist_ok=True)
        with open(self.outDir / "validation.json", "w") as f:
            json.dump([result.model_dump() for result in results], f, indent=2)
        failed = [result.name for result in results if not result.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {failed}" if failed else ""))
        return results
