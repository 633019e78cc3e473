"""PLDM 샘플링 UseCase: latent SDE 샘플 → ProteinAE 디코딩 → 평가."""
from time import perf_counter
from typing import Any, Optional

from app.settings.config import EvaluationSettings
from application.dto.command_requests import SampleRequest
from application.dto.metric_report import MetricReport, StructureRecord
from application.dto.run_layout import RunLayout
from application.ports.checkpoint_store import ICheckpointStore
from application.ports.designability_scorer import IDesignabilityScorer
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.ports.structure_reader import IStructureWriter
from application.use_cases.evaluate_structures import summarize_structure_set
from application.use_cases.reconstruct_structures import checkpoint_provenance, write_pdb
from application.use_cases.train_pldm import check_latent_geometry
from application.utils.debug_logger import debug_context, log_event, resident_memory_mb
from application.utils.metric_report_json import save_metric_report
from application.utils.model_factory import autoencoder_from_payload, pldm_from_payload, sde_config
from common.errors import InsufficientSamples, InvalidLength
from domain.entities.backbone_structure import BackboneStructure
from domain.value_objects.latent_representation import LatentRepresentation
from modeling.autoencoder import ProteinAE, reconstruct_many
from modeling.flow import SDEConfig
from modeling.pldm import PLDM, mean_pairwise_latent_distance, sample_latents


def gamma_label(gamma: float) -> str:
    """γ 값 → 파일/리포트 라벨 (예: 0.45 → "g0.45")."""
    return f"g{gamma:g}"


class SampleStructuresUseCase:
    """길이별로 latent를 샘플링하고 구조로 디코딩해 평가한다.

    γ 값마다 별도 샘플 집합, 리포트 섹션, 다양성 막대를 만든다. 같은 시드면
    출력 PDB가 바이트 단위로 같다.
    """

    def __init__(
        self,
        checkpoint_store: ICheckpointStore,
        writer: IStructureWriter,
        scorer: IDesignabilityScorer,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._checkpoint_store = checkpoint_store
        self._writer = writer
        self._scorer = scorer
        self._plotter = plotter
        self._log_sink = log_sink

    def execute(
        self,
        request: SampleRequest,
        settings: EvaluationSettings,
        layout: RunLayout,
        reference: Optional[list[BackboneStructure]] = None,
    ) -> MetricReport:
        """샘플링 실행.

        Args:
            request: 샘플 요청 (체크포인트, 길이, 개수, γ 목록, 시드).
            settings: 평가 설정.
            layout: 실행 디렉토리 레이아웃.
            reference: novelty 참조 집합 (선택적).

        Raises:
            InvalidLength: lengths가 비었거나 per_length < 1.
            CheckpointMismatch: PLDM과 autoencoder의 latent (d, r)이 다를 때.
        """
        if not request.lengths or request.per_length < 1:
            raise InvalidLength("lengths must be non-empty and per_length >= 1")
        pldm_payload = self._checkpoint_store.load(request.pldm_checkpoint)
        ae_payload = self._checkpoint_store.load(request.ae_checkpoint)
        pldm, pldm_config = pldm_from_payload(pldm_payload)
        ae, ae_config = autoencoder_from_payload(ae_payload)
        check_latent_geometry(pldm_config, ae_config)
        if pldm_payload.metadata.get("ae_checkpoint_id") not in (None, ae_payload.checkpoint_id):
            log_event(self._log_sink, "WARNING", "PLDM was trained on latents of a different autoencoder checkpoint")

        report = MetricReport(
            command="sample",
            provenance={**checkpoint_provenance(pldm_payload), **checkpoint_provenance(ae_payload, "ae_")},
        )
        report.aggregate["seed"] = request.seed
        labels, dpts, cluster_scores = [], [], []
        for gamma_opt in request.gammas:
            sde = sde_config(pldm_config.model.pldm.sde, gamma_opt)
            label = gamma_label(sde.gamma)
            with debug_context(self._log_sink, "sample_gamma", {"gamma": sde.gamma}):
                section = self._sample_gamma(request, sde, pldm, ae, settings, layout, reference, label, report)
            report.aggregate[label] = section
            labels.append(label)
            dpts.append(section.get("dpt") or 0.0)
            cluster_scores.append(section.get("cluster_diversity") or 0.0)

        report.aggregate["gammas"] = labels
        save_metric_report(report, layout.report("sample"))
        if self._plotter is not None:
            self._plotter.bars(labels, dpts, layout.plot("sample_dpt"), "DPT (lower = more diverse)")
            self._plotter.bars(labels, cluster_scores, layout.plot("sample_cluster_diversity"), "cluster diversity")
        return report

    def _sample_gamma(
        self,
        request: SampleRequest,
        sde: SDEConfig,
        pldm: PLDM,
        ae: ProteinAE,
        settings: EvaluationSettings,
        layout: RunLayout,
        reference: Optional[list[BackboneStructure]],
        label: str,
        report: MetricReport,
    ) -> dict[str, Any]:
        """γ 하나에 대한 샘플링 + 평가 → 리포트 섹션."""
        out_dir = layout.structures_dir("sample") / label
        names: list[str] = []
        structures: list[BackboneStructure] = []
        latents: list[LatentRepresentation] = []
        elapsed = 0.0
        peak_rss = resident_memory_mb()
        for length in request.lengths:
            start = perf_counter()
            batch = sample_latents(pldm, length, request.per_length, request.seed + length, sde)
            decoded = reconstruct_many(batch, ae, request.seed + length, request.ode_steps)
            elapsed += perf_counter() - start
            peak_rss = max(peak_rss, resident_memory_mb())
            for k, structure in enumerate(decoded):
                name = f"{label}_len{length}_{k:03d}"
                write_pdb(self._writer, structure, out_dir / f"{name}.pdb")
                names.append(name)
            structures.extend(decoded)
            latents.extend(batch)

        per_structure, section = summarize_structure_set(
            structures, self._scorer, settings, reference, self._log_sink
        )
        for name, structure, metrics in zip(names, structures, per_structure):
            report.records.append(StructureRecord(
                structure_id=name, n_res=structure.n_res, metrics={**metrics, "gamma": float(sde.gamma)},
            ))
        try:
            section["latent_distance"] = mean_pairwise_latent_distance(latents)
        except InsufficientSamples:
            section["latent_distance"] = None
        section.update({
            "gamma": float(sde.gamma),
            "seconds_per_sample": elapsed / max(len(structures), 1),
            "peak_rss_mb": round(peak_rss, 1),
        })
        log_event(self._log_sink, "INFO", f"sampled {len(structures)} structures at {label}", {
            "designable_fraction": section["designable_fraction"], "dpt": section.get("dpt"),
        })
        return section
