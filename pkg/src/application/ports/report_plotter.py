"""리포트 그림 Port 인터페이스."""
from pathlib import Path
from typing import Protocol, Sequence


class IReportPlotter(Protocol):
    """손실 곡선, 히스토그램, 막대 그림 출력."""

    def loss_curve(self, losses: Sequence[float], path: Path, title: str) -> Path:
        ...

    def histogram(self, values: Sequence[float], path: Path, xlabel: str) -> Path:
        ...

    def bars(self, labels: Sequence[str], values: Sequence[float], path: Path, ylabel: str) -> Path:
        ...
