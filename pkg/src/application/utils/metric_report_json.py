"""MetricReport JSON Lines 직렬화 유틸리티.

구조별 레코드 한 줄씩, 마지막 줄은 ``{"aggregate": {...}}``.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from app.settings.constants import Constants
from application.dto.metric_report import MetricReport, StructureRecord

logger = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    """numpy 스칼라/배열, NaN을 JSON 호환 값으로 변환."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def metric_statistics(metrics: Sequence[Mapping[str, Any]], names: Sequence[str]) -> dict[str, Optional[float]]:
    """지표별 ``mean_<이름>``, ``std_<이름>`` (모집단 표준편차).

    값이 없거나 유한하지 않은 항목은 건너뛴다. 남는 값이 없으면 None.

    Example:
        ``metric_statistics([{"ca_rmsd": 1.0}, {"ca_rmsd": 3.0}], ["ca_rmsd"])``
        → ``{"mean_ca_rmsd": 2.0, "std_ca_rmsd": 1.0}``
    """
    stats: dict[str, Optional[float]] = {}
    for name in names:
        values = [float(m[name]) for m in metrics if m.get(name) is not None and math.isfinite(float(m[name]))]
        stats[f"mean_{name}"] = float(np.mean(values)) if values else None
        stats[f"std_{name}"] = float(np.std(values)) if values else None
    return stats


def serialize_record(record: StructureRecord) -> dict[str, Any]:
    """레코드 → 딕셔너리."""
    data: dict[str, Any] = {"structure_id": record.structure_id, "n_res": record.n_res}
    data.update(_jsonable(record.metrics))
    if record.failed:
        data["error"] = record.error
        data["error_type"] = record.error_type
    return data


def save_metric_report(report: MetricReport, output_path: Path) -> Path:
    """리포트를 JSONL 파일로 저장.

    Args:
        report: 지표 리포트.
        output_path: 저장할 파일 경로.

    Returns:
        저장된 경로.

    Raises:
        OSError: 파일 쓰기 실패 시.
        ValueError: 직렬화 실패 시.
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    aggregate = dict(report.aggregate, command=report.command, n_records=len(report.records),
                     n_failed=report.n_failed, provenance=report.provenance)
    try:
        lines = [json.dumps(serialize_record(r), ensure_ascii=False, sort_keys=True) for r in report.records]
        lines.append(json.dumps({"aggregate": _jsonable(aggregate)}, ensure_ascii=False, sort_keys=True))
    except (TypeError, ValueError) as e:
        logger.error(f"리포트 직렬화 실패: {e}")
        raise ValueError(f"리포트를 JSON으로 직렬화할 수 없습니다: {e}") from e
    try:
        output_path.write_text("\n".join(lines) + "\n", encoding=Constants.LOG_FILE_ENCODING)
    except OSError as e:
        logger.error(f"리포트 저장 실패: {output_path} - {e}")
        raise
    logger.info(f"리포트 저장 완료: {output_path}")
    return output_path


def load_metric_report(path: Path) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    """JSONL 리포트 읽기 → (레코드 리스트, aggregate)."""
    records: list[dict[str, Any]] = []
    aggregate: dict[str, Any] = {}
    for line in Path(path).read_text(encoding=Constants.LOG_FILE_ENCODING).splitlines():
        if not line.strip():
            continue
        item = json.loads(line)
        if "aggregate" in item and len(item) == 1:
            aggregate = item["aggregate"]
        else:
            records.append(item)
    return records, aggregate
