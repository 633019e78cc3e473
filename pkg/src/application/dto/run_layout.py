"""실행 디렉토리 레이아웃 DTO.

한 실행의 모든 산출물은 ``run_dir`` 아래에 놓인다::

    run_dir/
        config.json            해석된 설정 스냅샷
        checkpoints/           <kind>[-<step>].ckpt
        structures/<command>/  생성/재구성 PDB
        plots/                 PNG
        logs/                  YYYY-MM-DD.log
        latents.db             latent 캐시
        <kind>_loss.csv
        <command>_report.jsonl
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from app.settings.constants import Constants


@dataclass(frozen=True)
class RunLayout:
    """실행 산출물 경로 계산."""

    root: Path

    @property
    def config_snapshot(self) -> Path:
        return self.root / Constants.CONFIG_SNAPSHOT_NAME

    @property
    def checkpoints_dir(self) -> Path:
        return self.root / "checkpoints"

    @property
    def plots_dir(self) -> Path:
        return self.root / "plots"

    @property
    def logs_dir(self) -> Path:
        return self.root / Constants.LOG_DIR_NAME

    @property
    def latent_cache(self) -> Path:
        return self.root / Constants.LATENT_CACHE_NAME

    def checkpoint(self, kind: str, step: Optional[int] = None) -> Path:
        """``checkpoints/<kind>[-<step>].ckpt``."""
        name = kind if step is None else f"{kind}-{step:07d}"
        return self.checkpoints_dir / f"{name}{Constants.CHECKPOINT_SUFFIX}"

    def loss_csv(self, kind: str) -> Path:
        return self.root / f"{kind}_{Constants.LOSS_CSV_NAME}"

    def report(self, command: str) -> Path:
        return self.root / f"{command}_{Constants.REPORT_NAME}"

    def structures_dir(self, command: str) -> Path:
        return self.root / "structures" / command

    def plot(self, name: str) -> Path:
        return self.plots_dir / f"{name}.png"

    def write_config_snapshot(self, text: str) -> Path:
        """해석된 설정을 ``config.json``으로 저장."""
        self.root.mkdir(parents=True, exist_ok=True)
        self.config_snapshot.write_text(text, encoding="utf-8")
        return self.config_snapshot

    def child(self, name: str) -> "RunLayout":
        """하위 실행 레이아웃 (sweep 설정별 디렉토리)."""
        return RunLayout(root=self.root / name)
