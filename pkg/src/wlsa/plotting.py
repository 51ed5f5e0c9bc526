"""Per-round figures: colour-class counts of refinement and the size of the
Duplicator strategy while the pebble-game fixpoint shrinks it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Sequence


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_rounds(series: Dict[str, Sequence[int]], path, title: str, ylabel: str, log_scale: bool = False) -> Path:
    """One line per named series, x = round number."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for label in sorted(series):
        ys = list(series[label])
        ax.plot(range(len(ys)), ys, marker="o", markersize=3.5, linewidth=1.2, label=label)
    ax.set_xlabel("round")
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    if log_scale:
        ax.set_yscale("symlog")
    ax.xaxis.get_major_locator().set_params(integer=True)
    ax.grid(alpha=0.3)
    if series:
        ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def refinement_figure(series: Dict[str, Sequence[int]], path, title: str = "colour refinement") -> Path:
    return plot_rounds(series, path, title, "colour classes")


def strategy_figure(series: Dict[str, Sequence[int]], path, title: str = "pebble-game fixpoint") -> Path:
    return plot_rounds(series, path, title, "strategy size (pairs)", log_scale=True)


def suite_figures(results, outdir) -> List[Path]:
    """Figures for every suite that recorded per-round series."""
    outdir = Path(outdir)
    written = []
    for r in results:
        wl = {k: v for k, v in r.series.items() if k.startswith("refinement")}
        peb = {k: v for k, v in r.series.items() if k.startswith("pebble")}
        if wl:
            written.append(refinement_figure(wl, outdir / f"criterion{r.criterion}_refinement.png",
                                             "C6 vs C3+C3: refinement of the union"))
        if peb:
            written.append(strategy_figure(peb, outdir / f"criterion{r.criterion}_pebble.png",
                                           "C6 vs C3+C3: strategy fixpoint"))
    return written
