import logging
import re
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

logger = logging.getLogger(__name__)

PROFILE_PATTERN = re.compile(r"profile_N(\d+)\.csv$")


def loadResults(outDir) -> Dict[str, pd.DataFrame]:
    """Every CSV the experiments write, keyed by file stem."""
    outDir = Path(outDir)
    if not outDir.exists():
        return {}
    return {path.stem: pd.read_csv(path) for path in sorted(outDir.glob("*.csv"))}


class Visualizer:
    def __init__(self, style: str = "seaborn-v0_8-darkgrid"):
        plt.style.use(style)
        sns.set_palette("husl")
        matplotlib.rcParams["svg.hashsalt"] = "longjump"

    def plotProfileOverlay(self, frame: pd.DataFrame, N: int, figsize: tuple = (8, 5)):
        fig, ax = plt.subplots(figsize=figsize)
        ax.errorbar(frame["q"], frame["mean"], yerr=3.0 * frame["stderr"], fmt="o", markersize=3,
                    alpha=0.7, label=f"<eta_z>, N={N}")
        ax.plot(frame["q"], frame["rho_bar"], linewidth=2, label="rho_bar")
        ax.set_xlabel("q = z/N")
        ax.set_ylabel("density")
        ax.set_title(f"Stationary profile, N={N}", fontsize=14, fontweight="bold")
        ax.legend()
        ax.grid(True, alpha=0.3)
        plt.tight_layout()
        return fig

    def plotCurrentScaling(self, currents: pd.DataFrame, slope: Optional[float] = None,
                           intercept: Optional[float] = None, figsize: tuple = (8, 5)):
        fig, ax = plt.subplots(figsize=figsize)
        n = currents["N"].to_numpy(dtype=np.float64)
        for method, group in currents.groupby("method"):
            ax.errorbar(group["N"], group["W1_mean"].abs(), yerr=3.0 * group["W1_stderr"], fmt="o", label=method)
        if slope is not None:
            grid = np.geomspace(n.min(), n.max(), 50)
            ax.plot(grid, np.exp(intercept) * grid**slope, "r--", linewidth=2,
                    label=f"fit slope {slope:.4f} (delta_hat {-slope:.4f})")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("|<W_1>|")
        ax.set_title("Stationary current scaling", fontsize=14, fontweight="bold")
        ax.legend()
        ax.grid(True, alpha=0.3, which="both")
        plt.tight_layout()
        return fig

    def plotConvergence(self, report: pd.DataFrame, figsize: tuple = (8, 5)):
        fig, ax = plt.subplots(figsize=figsize)
        for column in ("sup_err_minus", "sup_err_plus", "sup_err_K_N"):
            ax.plot(report["N"], report[column], "o-", linewidth=2, label=column)
        n = report["N"].to_numpy(dtype=np.float64)
        ax.plot(n, report["sup_err_minus"].iloc[0] * n[0] / n, "k:", label="1/N")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("sup error")
        ax.set_title("Discrete operator convergence", fontsize=14, fontweight="bold")
        ax.legend()
        ax.grid(True, alpha=0.3, which="both")
        plt.tight_layout()
        return fig

    def saveFigure(self, fig, filename) -> Path:
        fig.savefig(filename, format="svg", bbox_inches="tight", metadata={"Date": None})
        plt.close(fig)
        logger.info(f"Figure saved to {filename}")
        return Path(filename)

    def emitPlots(self, results: Dict[str, pd.DataFrame], outDir) -> List[Path]:
        """One overlay per profile_N*.csv, the current scaling plot and the convergence decay plot."""
        outDir = Path(outDir)
        written = []
        for stem, frame in results.items():
            match = PROFILE_PATTERN.match(f"{stem}.csv")
            if match and not frame.empty:
                N = int(match.group(1))
                written.append(self.saveFigure(self.plotProfileOverlay(frame, N), outDir / f"profile_N{N}.svg"))

        currents = results.get("currents")
        if currents is not None and not currents.empty:
            fit = results.get("fick_fit")
            slope = intercept = None
            if fit is not None and not fit.empty:
                slope, intercept = float(fit["slope"].iloc[0]), float(fit["intercept"].iloc[0])
                print(f"Current scaling fit slope {slope:.4f} (delta_hat {-slope:.4f})")
            written.append(self.saveFigure(self.plotCurrentScaling(currents, slope, intercept),
                                           outDir / "current_scaling.svg"))

        report = results.get("convergence")
        if report is not None and not report.empty:
            written.append(self.saveFigure(self.plotConvergence(report), outDir / "convergence.svg"))
        return written
