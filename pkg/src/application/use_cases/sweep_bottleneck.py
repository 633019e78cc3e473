"""bottleneck (r, d) sweep UseCase: 설정별 학습 후 재구성 RMSD 비교."""
from typing import Optional

from pydantic import ValidationError as PydanticValidationError

from app.settings.config import AutoencoderSettings, RunConfig
from application.dto.command_requests import ReconstructRequest, SweepRequest
from application.dto.metric_report import MetricReport, StructureRecord
from application.dto.run_layout import RunLayout
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.use_cases.load_dataset import DatasetLoadResult
from application.use_cases.reconstruct_structures import ReconstructStructuresUseCase
from application.use_cases.train_autoencoder import TrainAutoencoderUseCase
from application.utils.debug_logger import debug_context, log_event
from application.utils.metric_report_json import save_metric_report
from common.errors import ConfigError


def bottleneck_config(config: RunConfig, downsample: int, latent_dim: int) -> RunConfig:
    """(r, d)만 바꾼 설정 (검증 포함).

    Raises:
        ConfigError: 조합이 유효하지 않을 때 (예: d > token_dim).
    """
    data = config.model.autoencoder.model_dump()
    data.update(downsample=downsample, latent_dim=latent_dim)
    try:
        autoencoder = AutoencoderSettings.model_validate(data)
    except PydanticValidationError as e:
        raise ConfigError(f"invalid bottleneck r={downsample}, d={latent_dim}: {e}") from e
    model = config.model.model_copy(update={"autoencoder": autoencoder})
    return config.model_copy(update={"model": model})


def setting_label(downsample: int, latent_dim: int) -> str:
    return f"r{downsample}_d{latent_dim}"


class SweepBottleneckUseCase:
    """(r, d) 격자마다 autoencoder를 학습하고 학습 집합 재구성 RMSD를 보고한다."""

    def __init__(
        self,
        trainer: TrainAutoencoderUseCase,
        reconstructor: ReconstructStructuresUseCase,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._trainer = trainer
        self._reconstructor = reconstructor
        self._plotter = plotter
        self._log_sink = log_sink

    def execute(
        self,
        config: RunConfig,
        request: SweepRequest,
        dataset: DatasetLoadResult,
        layout: RunLayout,
    ) -> MetricReport:
        """sweep 실행.

        Raises:
            ConfigError: 격자에 유효하지 않은 (r, d)가 있을 때 (학습 전에 검사).
        """
        seeded = config.model_copy(update={"train": config.train.model_copy(update={"seed": request.seed})})
        grid = [
            (r, d, bottleneck_config(seeded, r, d))
            for r in request.downsamples
            for d in request.latent_dims
        ]
        report = MetricReport(command="sweep")
        labels, rmsds = [], []
        for r, d, sub_config in grid:
            label = setting_label(r, d)
            sub_layout = layout.child(f"sweep/{label}")
            with debug_context(self._log_sink, "sweep_setting", {"downsample": r, "latent_dim": d}):
                summary = self._trainer.execute(sub_config, dataset.structures, sub_layout)
                recon = self._reconstructor.execute(
                    ReconstructRequest(ae_checkpoint=summary.checkpoint_path, seed=request.seed),
                    dataset,
                    config.evaluation,
                    sub_layout,
                )
            mean_rmsd = recon.aggregate["mean_ca_rmsd"]
            report.records.append(StructureRecord(
                structure_id=label,
                metrics={
                    "downsample": r,
                    "latent_dim": d,
                    "final_loss": summary.final_loss,
                    "mean_ca_rmsd": mean_rmsd,
                    "mean_backbone_rmsd": recon.aggregate["mean_backbone_rmsd"],
                },
            ))
            labels.append(label)
            rmsds.append(mean_rmsd if mean_rmsd is not None else float("nan"))
            log_event(self._log_sink, "INFO", f"sweep {label}: mean CA RMSD {mean_rmsd}")

        report.aggregate = {"settings": labels, "seed": request.seed}
        save_metric_report(report, layout.report("sweep"))
        if self._plotter is not None:
            self._plotter.bars(labels, rmsds, layout.plot("sweep_ca_rmsd"), "mean CA RMSD (Å)")
        return report
