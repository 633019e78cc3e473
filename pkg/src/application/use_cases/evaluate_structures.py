"""구조 집합 평가 UseCase (기하 유효성, DPT, 클러스터 다양성, novelty)."""
from typing import Any, Optional, Sequence

import numpy as np

from app.settings.config import EvaluationSettings
from application.dto.metric_report import MetricReport, StructureRecord
from application.dto.run_layout import RunLayout
from application.ports.designability_scorer import IDesignabilityScorer
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.use_cases.load_dataset import DatasetLoadResult
from application.utils.debug_logger import debug_context, log_event
from application.utils.metric_report_json import metric_statistics, save_metric_report
from common.errors import DomainError
from domain.entities.backbone_structure import BackboneStructure
from domain.services.structure_metrics import cluster_diversity, geometry_validity, novelty, pairwise_diversity


def summarize_structure_set(
    structures: Sequence[BackboneStructure],
    scorer: IDesignabilityScorer,
    settings: EvaluationSettings,
    reference: Optional[Sequence[BackboneStructure]] = None,
    log_sink: Optional[ILogSink] = None,
) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    """구조별 지표와 집합 지표 계산.

    집합 지표를 계산할 수 없으면 (designable 샘플 부족 등) 값은 None이고
    사유가 ``<지표>_error``에 남는다.

    Returns:
        (구조별 지표 리스트, 집계 딕셔너리).
    """
    per_structure = []
    designable = []
    for structure in structures:
        report = geometry_validity(structure)
        is_designable = bool(scorer.is_designable(structure))
        designable.append(is_designable)
        per_structure.append({"validity": report.fraction_valid, "designable": is_designable})

    aggregate: dict[str, Any] = {
        "n_structures": len(structures),
        "designable_fraction": float(np.mean(designable)) if designable else 0.0,
        **metric_statistics(per_structure, ("validity",)),
    }
    metrics = {
        "dpt": lambda: pairwise_diversity(structures, designable, settings.max_workers),
        "cluster_diversity": lambda: cluster_diversity(
            structures, designable, settings.cluster_threshold, max_workers=settings.max_workers
        ),
    }
    if reference:
        metrics["novelty"] = lambda: novelty(structures, reference, designable)
    for name, compute in metrics.items():
        try:
            aggregate[name] = compute()
        except DomainError as e:
            log_event(log_sink, "WARNING", f"{name} 계산 불가", {"error": str(e)})
            aggregate[name] = None
            aggregate[f"{name}_error"] = str(e)
    return per_structure, aggregate


class EvaluateStructuresUseCase:
    """디렉토리 구조 평가 UseCase."""

    def __init__(
        self,
        scorer: IDesignabilityScorer,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._scorer = scorer
        self._plotter = plotter
        self._log_sink = log_sink

    def execute(
        self,
        dataset: DatasetLoadResult,
        settings: EvaluationSettings,
        layout: RunLayout,
        reference: Optional[list[BackboneStructure]] = None,
    ) -> MetricReport:
        """평가 실행.

        Args:
            dataset: 평가할 구조.
            settings: 평가 설정.
            layout: 실행 디렉토리 레이아웃.
            reference: novelty 참조 집합 (선택적).
        """
        with debug_context(self._log_sink, "evaluate", {"n_structures": len(dataset.items)}):
            per_structure, aggregate = summarize_structure_set(
                dataset.structures, self._scorer, settings, reference, self._log_sink
            )
        records = list(dataset.failures)
        records.extend(
            StructureRecord(structure_id=item.name, n_res=item.structure.n_res, metrics=metrics)
            for item, metrics in zip(dataset.items, per_structure)
        )
        report = MetricReport(command="eval", records=records, aggregate=aggregate)
        save_metric_report(report, layout.report("eval"))
        if self._plotter is not None and per_structure:
            self._plotter.histogram(
                [m["validity"] for m in per_structure], layout.plot("eval_validity"), "valid residue fraction"
            )
        return report
