"""유연성 probe UseCase: 잔기별 latent → CA B-factor 회귀."""
from typing import Optional

import numpy as np

from app.settings.config import ProbeSettings
from application.dto.command_requests import ProbeRequest
from application.dto.metric_report import MetricReport, StructureRecord
from application.dto.run_layout import RunLayout
from application.ports.checkpoint_store import ICheckpointStore
from application.ports.log_sink import ILogSink
from application.use_cases.load_dataset import DatasetLoadResult
from application.use_cases.reconstruct_structures import checkpoint_provenance
from application.utils.debug_logger import debug_step, log_event
from application.utils.metric_report_json import save_metric_report
from application.utils.model_factory import autoencoder_from_payload
from common.errors import DomainError, RequiresUnitDownsample
from modeling.autoencoder import encode
from modeling.probe import ProbeConfig, train_probe


def probe_config(settings: ProbeSettings) -> ProbeConfig:
    """ProbeSettings → ProbeConfig."""
    return ProbeConfig(
        hidden_dim=settings.hidden_dim,
        epochs=settings.epochs,
        batch_size=settings.batch_size,
        learning_rate=settings.learning_rate,
        heldout_fraction=settings.heldout_fraction,
        seed=settings.seed,
    )


class TrainFlexibilityProbeUseCase:
    """고정 인코더 latent에서 잔기 유연성을 예측하는 probe 학습."""

    def __init__(self, checkpoint_store: ICheckpointStore, log_sink: Optional[ILogSink] = None) -> None:
        self._checkpoint_store = checkpoint_store
        self._log_sink = log_sink

    def execute(
        self,
        request: ProbeRequest,
        dataset: DatasetLoadResult,
        settings: ProbeSettings,
        layout: RunLayout,
    ) -> MetricReport:
        """probe 학습 + held-out Spearman 리포트.

        B-factor가 없는 구조는 레코드에 실패로 남기고 건너뛴다.

        Raises:
            RequiresUnitDownsample: 체크포인트의 downsample != 1.
            InsufficientSamples: 학습 행이 너무 적을 때.
        """
        payload = self._checkpoint_store.load(request.ae_checkpoint)
        model, ae_config = autoencoder_from_payload(payload)
        downsample = ae_config.model.autoencoder.downsample
        if downsample != 1:
            raise RequiresUnitDownsample(f"probe needs a checkpoint with downsample = 1, got {downsample}")

        report = MetricReport(
            command="probe", records=list(dataset.failures), provenance=checkpoint_provenance(payload)
        )
        rows, targets = [], []
        for item in dataset.items:
            structure = item.structure
            if structure.ca_b_factor is None:
                report.records.append(StructureRecord(
                    structure_id=item.name, n_res=structure.n_res,
                    error="no CA B-factors in input", error_type="MissingTargets",
                ))
                continue
            try:
                latent = encode(structure, model)
            except DomainError as e:
                report.records.append(StructureRecord(
                    structure_id=item.name, n_res=structure.n_res, error=str(e), error_type=type(e).__name__,
                ))
                continue
            keep = structure.res_mask
            rows.append(latent.z[keep])
            targets.append(structure.ca_b_factor[keep])
            report.records.append(StructureRecord(
                structure_id=item.name, n_res=structure.n_res, metrics={"n_rows": int(keep.sum())},
            ))
        debug_step(self._log_sink, "probe_rows_collected", {"structures": len(rows)})

        all_rows = np.concatenate(rows) if rows else np.zeros((0, ae_config.model.autoencoder.latent_dim))
        all_targets = np.concatenate(targets) if targets else np.zeros(0)
        result = train_probe(all_rows, all_targets, probe_config(settings), downsample)
        report.aggregate = {
            "checkpoint_id": payload.checkpoint_id,
            "spearman": result.spearman,
            "n_train": result.n_train,
            "n_heldout": result.n_heldout,
            "final_train_loss": result.final_train_loss,
        }
        save_metric_report(report, layout.report("probe"))
        log_event(self._log_sink, "INFO", f"probe spearman={result.spearman:.3f}", report.aggregate)
        return report
