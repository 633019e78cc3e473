"""학습/평가 그림 (matplotlib, Agg 백엔드)."""
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_loss_curve(steps: Sequence[int], losses: Sequence[float], path: Path, title: str = "loss") -> Path:
    """스텝별 손실 곡선 (로그 스케일)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(steps, losses, linewidth=1.0)
    ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_histogram(values: Sequence[float], path: Path, xlabel: str, bins: int = 20) -> Path:
    """값 분포 히스토그램 (RMSD, 유효성 비율 등)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(list(values), bins=bins, color="tab:blue", alpha=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    return _save(fig, path)


def plot_bars(labels: Sequence[str], values: Sequence[float], path: Path, ylabel: str) -> Path:
    """범주별 막대 (γ별 다양성, bottleneck sweep RMSD)."""
    fig, ax = plt.subplots(figsize=(max(4, len(labels) * 0.8), 4))
    ax.bar(range(len(values)), list(values), color="tab:orange")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(list(labels), rotation=30, ha="right")
    ax.set_ylabel(ylabel)
    return _save(fig, path)


class MatplotlibReportPlotter:
    """IReportPlotter 구현."""

    def loss_curve(self, losses: Sequence[float], path: Path, title: str) -> Path:
        return plot_loss_curve(range(1, len(losses) + 1), losses, path, title)

    def histogram(self, values: Sequence[float], path: Path, xlabel: str) -> Path:
        return plot_histogram(values, path, xlabel)

    def bars(self, labels: Sequence[str], values: Sequence[float], path: Path, ylabel: str) -> Path:
        return plot_bars(labels, values, path, ylabel)
