"""공통 학습 루프 (Adam + gradient clipping + 주기적 로그/체크포인트)."""
import csv
import math
from pathlib import Path
from time import perf_counter
from typing import Callable, Iterator, Optional

import numpy as np
import torch
from torch import Tensor, nn

from app.settings.config import TrainSettings
from app.settings.constants import Constants
from application.dto.training_summary import TrainingSummary
from application.ports.log_sink import ILogSink
from application.utils.debug_logger import log_event, resident_memory_mb
from common.errors import EmptyDataset

StepLoss = Callable[[np.ndarray], Tensor]
"""배치 인덱스 → 스칼라 손실."""


def total_steps(settings: TrainSettings, n_items: int) -> int:
    """epochs가 있으면 epochs × ceil(N / batch), 없으면 steps."""
    if settings.epochs is None:
        return settings.steps
    return settings.epochs * math.ceil(n_items / settings.batch_size)


def epoch_batches(n_items: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """epoch마다 섞은 순서로 배치 인덱스를 끝없이 생성 (마지막 배치는 작을 수 있음).

    Raises:
        EmptyDataset: n_items == 0.
    """
    if n_items == 0:
        raise EmptyDataset("학습할 항목이 없습니다")
    while True:
        order = rng.permutation(n_items)
        for start in range(0, n_items, batch_size):
            yield order[start : start + batch_size]


def run_training(
    model: nn.Module,
    step_loss: StepLoss,
    n_items: int,
    settings: TrainSettings,
    rng: np.random.Generator,
    log_sink: Optional[ILogSink] = None,
    on_checkpoint: Optional[Callable[[int], None]] = None,
    label: str = "train",
) -> list[float]:
    """학습 루프 실행.

    Args:
        model: 학습할 모듈 (train 모드로 전환됨).
        step_loss: 배치 인덱스로 손실을 계산하는 함수.
        n_items: 데이터셋 크기.
        settings: 학습 설정.
        rng: 배치 순서용 numpy Generator.
        log_sink: 로그 싱크 (선택적).
        on_checkpoint: checkpoint_every 스텝마다 호출 (step 인자).
        label: 로그 접두사.

    Returns:
        스텝별 손실 리스트.
    """
    n_steps = total_steps(settings, n_items)
    optimizer = torch.optim.Adam(model.parameters(), lr=settings.learning_rate)
    batches = epoch_batches(n_items, settings.batch_size, rng)
    losses: list[float] = []
    start = perf_counter()
    model.train()
    for step in range(1, n_steps + 1):
        loss = step_loss(next(batches))
        optimizer.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(model.parameters(), settings.grad_clip)
        optimizer.step()
        losses.append(float(loss.item()))

        if step % settings.log_every == 0 or step == n_steps:
            window = losses[-settings.log_every :]
            log_event(
                log_sink,
                "INFO",
                f"{label} step {step}/{n_steps} loss={np.mean(window):.4f}",
                {
                    "step": step,
                    "loss": float(np.mean(window)),
                    "elapsed_ms": int((perf_counter() - start) * Constants.MILLISECONDS_PER_SECOND),
                    "rss_mb": round(resident_memory_mb(), 1),
                },
            )
        if on_checkpoint is not None and step % settings.checkpoint_every == 0 and step != n_steps:
            on_checkpoint(step)
    model.eval()
    return losses


def final_window_loss(losses: list[float], window: int) -> float:
    """마지막 window 스텝 평균 손실."""
    return float(np.mean(losses[-window:]))


def write_loss_csv(path: Path, losses: list[float]) -> Path:
    """``step,loss`` CSV 저장 (repr 정밀도로 기록해 재실행 비교가 가능)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding=Constants.LOG_FILE_ENCODING) as f:
        writer = csv.writer(f)
        writer.writerow(["step", "loss"])
        for step, loss in enumerate(losses, start=1):
            writer.writerow([step, repr(loss)])
    return path


def read_loss_csv(path: Path) -> list[float]:
    """손실 CSV 읽기."""
    with Path(path).open(newline="", encoding=Constants.LOG_FILE_ENCODING) as f:
        return [float(row["loss"]) for row in csv.DictReader(f)]


def build_training_summary(
    kind: str,
    losses: list[float],
    settings: TrainSettings,
    elapsed_ms: int,
    checkpoint_path: Path,
    checkpoint_id: str,
    loss_csv_path: Path,
    cached_latents: int = 0,
) -> TrainingSummary:
    """손실 기록 → TrainingSummary."""
    return TrainingSummary(
        kind=kind,
        steps=len(losses),
        initial_loss=losses[0],
        final_loss=final_window_loss(losses, settings.log_every),
        elapsed_ms=elapsed_ms,
        checkpoint_path=checkpoint_path,
        checkpoint_id=checkpoint_id,
        loss_csv_path=loss_csv_path,
        cached_latents=cached_latents,
    )
