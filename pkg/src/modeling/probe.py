"""잔기 단위 latent 유연성 probe (MLP 회귀 + Spearman 평가)."""
from dataclasses import dataclass

import numpy as np
import torch
from scipy.stats import spearmanr
from torch import nn

from app.settings.constants import Constants
from common.errors import InsufficientSamples, RequiresUnitDownsample, ShapeMismatch

MIN_PROBE_ROWS = 10


@dataclass(frozen=True)
class ProbeConfig:
    """probe 학습 설정."""

    hidden_dim: int = Constants.PROBE_HIDDEN_DIM
    epochs: int = Constants.PROBE_EPOCHS
    batch_size: int = Constants.PROBE_BATCH_SIZE
    learning_rate: float = Constants.LEARNING_RATE
    heldout_fraction: float = Constants.PROBE_HELDOUT_FRACTION
    seed: int = 0


class FlexibilityProbe(nn.Module):
    """Linear → ReLU → Linear(1)."""

    def __init__(self, latent_dim: int, hidden_dim: int) -> None:
        super().__init__()
        self.net = nn.Sequential(nn.Linear(latent_dim, hidden_dim), nn.ReLU(), nn.Linear(hidden_dim, 1))

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.net(z).squeeze(-1)


@dataclass(frozen=True, eq=False)
class ProbeResult:
    """학습된 probe와 held-out 평가 결과."""

    probe: FlexibilityProbe
    """학습된 회귀 모델 (표준화된 목표를 예측)."""
    spearman: float
    n_train: int
    n_heldout: int
    final_train_loss: float
    target_mean: float = 0.0
    target_std: float = 1.0

    def predict(self, latent_rows: np.ndarray) -> np.ndarray:
        """(M, d) latent 행 → (M,) 원래 단위의 예측값."""
        rows = torch.as_tensor(np.asarray(latent_rows, dtype=np.float32))
        with torch.no_grad():
            pred = self.probe(rows).numpy()
        return pred * self.target_std + self.target_mean


def spearman(a: np.ndarray, b: np.ndarray) -> float:
    """Spearman 순위 상관."""
    return float(spearmanr(a, b)[0])


def train_probe(
    latent_rows: np.ndarray,
    targets: np.ndarray,
    config: ProbeConfig = ProbeConfig(),
    downsample: int = 1,
) -> ProbeResult:
    """latent 행 → 잔기별 스칼라 회귀 후 held-out Spearman 보고.

    Args:
        latent_rows: (M, d) 잔기 단위 latent.
        targets: (M,) 목표 값 (예: B-factor).
        config: 학습 설정.
        downsample: latent를 만든 체크포인트의 r (1이어야 함).

    Returns:
        학습된 probe (``ProbeResult.probe``, ``predict``)와 held-out Spearman.

    Raises:
        RequiresUnitDownsample: downsample != 1.
        ShapeMismatch: 행 수 불일치.
        InsufficientSamples: 행이 너무 적을 때.
    """
    if downsample != 1:
        raise RequiresUnitDownsample("per-residue probe needs a checkpoint with downsample = 1")
    rows = np.asarray(latent_rows, dtype=np.float32)
    y = np.asarray(targets, dtype=np.float32)
    if rows.ndim != 2 or y.shape != (rows.shape[0],):
        raise ShapeMismatch(f"latent rows {rows.shape} and targets {y.shape} do not match")
    if rows.shape[0] < MIN_PROBE_ROWS:
        raise InsufficientSamples(f"probe needs >= {MIN_PROBE_ROWS} rows, got {rows.shape[0]}")

    rng = np.random.default_rng(config.seed)
    order = rng.permutation(rows.shape[0])
    n_heldout = max(1, int(round(rows.shape[0] * config.heldout_fraction)))
    held, train = order[:n_heldout], order[n_heldout:]
    y_mean, y_std = y[train].mean(), y[train].std() + 1e-8

    torch.manual_seed(config.seed)
    model = FlexibilityProbe(rows.shape[1], config.hidden_dim)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    x_train = torch.from_numpy(rows[train])
    y_train = torch.from_numpy((y[train] - y_mean) / y_std)
    loss_fn = nn.MSELoss()
    last_loss = float("nan")
    for _ in range(config.epochs):
        perm = rng.permutation(len(train))
        for start in range(0, len(train), config.batch_size):
            idx = torch.from_numpy(perm[start : start + config.batch_size])
            loss = loss_fn(model(x_train[idx]), y_train[idx])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            last_loss = float(loss.item())

    model.eval()
    with torch.no_grad():
        pred = model(torch.from_numpy(rows[held])).numpy()
    return ProbeResult(
        probe=model,
        spearman=spearman(pred, y[held]),
        n_train=len(train),
        n_heldout=n_heldout,
        final_train_loss=last_loss,
        target_mean=float(y_mean),
        target_std=float(y_std),
    )
