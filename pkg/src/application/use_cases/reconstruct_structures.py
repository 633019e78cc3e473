"""재구성 UseCase: 중심화 → 인코딩 → ODE 디코딩 → 정렬 → RMSD."""
from pathlib import Path
from typing import Any, Optional

import numpy as np

from app.settings.config import EvaluationSettings
from application.dto.command_requests import ReconstructRequest
from application.dto.metric_report import MetricReport, StructureRecord
from application.dto.run_layout import RunLayout
from application.ports.checkpoint_store import CheckpointPayload, ICheckpointStore
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.ports.structure_reader import IStructureWriter
from application.use_cases.load_dataset import DatasetLoadResult
from application.utils.debug_logger import debug_context, log_event
from application.utils.metric_report_json import metric_statistics, save_metric_report
from application.utils.model_factory import autoencoder_from_payload
from common.errors import DomainError
from domain.entities.backbone_structure import BackboneStructure
from domain.services.geometry import align_structure, kabsch_rmsd
from domain.services.structure_metrics import geometry_validity
from modeling.autoencoder import ProteinAE, encode, reconstruct

RECONSTRUCT_METRICS = ("ca_rmsd", "backbone_rmsd", "validity")


def length_bucket_means(lengths: list[int], values: list[float], width: int) -> dict[str, float]:
    """길이 구간별 평균 (구간 라벨 "lo-hi", lo 오름차순).

    Example:
        ``length_bucket_means([16, 20, 40], [1.0, 3.0, 5.0], 16)``
        → ``{"16-31": 2.0, "32-47": 5.0}``
    """
    buckets: dict[int, list[float]] = {}
    for length, value in zip(lengths, values):
        buckets.setdefault((length // width) * width, []).append(value)
    return {f"{lo}-{lo + width - 1}": float(np.mean(buckets[lo])) for lo in sorted(buckets)}


def checkpoint_provenance(payload: CheckpointPayload, prefix: str = "") -> dict[str, Any]:
    """체크포인트 출처 (``<prefix>config_hash``, ``<prefix>checkpoint_id``)."""
    return {
        f"{prefix}config_hash": payload.metadata.get("config_hash"),
        f"{prefix}checkpoint_id": payload.checkpoint_id,
    }


def write_pdb(writer: IStructureWriter, structure: BackboneStructure, path: Path) -> Path:
    """PDB 텍스트를 파일로 저장."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(writer.write(structure), encoding="utf-8")
    return path


class ReconstructStructuresUseCase:
    """구조 재구성 + RMSD 리포트 UseCase.

    파일별 실패는 레코드에 남기고 실행은 계속한다.
    """

    def __init__(
        self,
        checkpoint_store: ICheckpointStore,
        writer: IStructureWriter,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._checkpoint_store = checkpoint_store
        self._writer = writer
        self._plotter = plotter
        self._log_sink = log_sink

    def reconstruct_one(
        self,
        structure: BackboneStructure,
        model: ProteinAE,
        seed: int,
        ode_steps: Optional[int],
    ) -> tuple[BackboneStructure, dict[str, float]]:
        """구조 하나 재구성 → (원본에 정렬된 재구성 구조, 지표)."""
        latent = encode(structure, model)
        decoded = reconstruct(latent, model, seed, ode_steps)
        decoded = BackboneStructure(
            coords=decoded.coords,
            res_index=structure.res_index,
            res_mask=structure.res_mask,
            chain_id=structure.chain_id,
        )
        aligned = align_structure(decoded, structure)
        metrics = {
            "ca_rmsd": kabsch_rmsd(aligned, structure, "ca"),
            "backbone_rmsd": kabsch_rmsd(aligned, structure, "backbone"),
            "validity": geometry_validity(aligned).fraction_valid,
        }
        return aligned, metrics

    def execute(
        self,
        request: ReconstructRequest,
        dataset: DatasetLoadResult,
        settings: EvaluationSettings,
        layout: RunLayout,
    ) -> MetricReport:
        """재구성 실행.

        Args:
            request: 재구성 요청 (체크포인트, 시드, ODE 스텝).
            dataset: 로드된 구조 (로드 실패 레코드 포함).
            settings: 평가 설정 (길이 구간 폭).
            layout: 실행 디렉토리 레이아웃.

        Raises:
            CheckpointError: 체크포인트를 읽을 수 없을 때.
        """
        payload = self._checkpoint_store.load(request.ae_checkpoint)
        model, ae_config = autoencoder_from_payload(payload)
        ode_steps = request.ode_steps or ae_config.model.autoencoder.ode_steps
        out_dir = layout.structures_dir("reconstruct")

        report = MetricReport(
            command="reconstruct",
            records=list(dataset.failures),
            provenance=checkpoint_provenance(payload),
        )
        with debug_context(self._log_sink, "reconstruct", {"n_structures": len(dataset.items), "ode_steps": ode_steps}):
            for item in dataset.items:
                try:
                    aligned, metrics = self.reconstruct_one(item.structure, model, request.seed, ode_steps)
                except DomainError as e:
                    log_event(self._log_sink, "WARNING", f"재구성 실패: {item.name}", {"error": str(e)})
                    report.records.append(StructureRecord(
                        structure_id=item.name, n_res=item.structure.n_res,
                        error=str(e), error_type=type(e).__name__,
                    ))
                    continue
                write_pdb(self._writer, aligned, out_dir / f"{item.name}.pdb")
                report.records.append(StructureRecord(structure_id=item.name, n_res=item.structure.n_res, metrics=metrics))

        ok = [r for r in report.records if not r.failed]
        ca = [r.metrics["ca_rmsd"] for r in ok]
        report.aggregate = {
            "checkpoint_id": payload.checkpoint_id,
            "ode_steps": ode_steps,
            "seed": request.seed,
            "n_reconstructed": len(ok),
            **metric_statistics([r.metrics for r in ok], RECONSTRUCT_METRICS),
            "ca_rmsd_by_length": length_bucket_means(
                [r.n_res for r in ok], ca, settings.length_bucket_width
            ),
        }
        save_metric_report(report, layout.report("reconstruct"))
        if self._plotter is not None and ca:
            self._plotter.histogram(ca, layout.plot("reconstruct_ca_rmsd"), "CA RMSD (Å)")
        log_event(self._log_sink, "INFO", "reconstruction finished", {
            "n_reconstructed": len(ok), "n_failed": report.n_failed, "mean_ca_rmsd": report.aggregate["mean_ca_rmsd"],
        })
        return report
