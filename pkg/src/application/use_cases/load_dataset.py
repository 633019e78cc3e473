"""데이터셋 로드 UseCase (구조 폴더 또는 합성 helix 코퍼스)."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from app.settings.config import DataSettings
from application.dto.metric_report import StructureRecord
from application.dto.structure_scan import StructureScanRequest
from application.ports.log_sink import ILogSink
from application.ports.structure_reader import IStructureReader
from application.ports.structure_scanner import IStructureScanner
from application.utils.debug_logger import debug_step, log_event
from common.errors import DomainError, EmptyDataset
from domain.entities.backbone_structure import BackboneStructure
from domain.services.geometry import center_structure
from domain.services.synthetic import synth_corpus

StructureIdentifier = Callable[[BackboneStructure], str]


@dataclass(frozen=True)
class LoadedStructure:
    """중심화된 구조 + 식별자."""

    name: str
    """사람이 읽는 이름 (파일 stem 또는 synth_0000)."""

    structure_id: str
    """내용 기반 ID (latent 캐시 키)."""

    structure: BackboneStructure


@dataclass
class DatasetLoadResult:
    """로드 결과."""

    items: list[LoadedStructure] = field(default_factory=list)
    failures: list[StructureRecord] = field(default_factory=list)
    """파싱에 실패한 파일 (실행은 계속)."""

    @property
    def structures(self) -> list[BackboneStructure]:
        return [item.structure for item in self.items]


class LoadDatasetUseCase:
    """구조 데이터셋 로드 UseCase."""

    def __init__(
        self,
        scanner: IStructureScanner,
        reader: IStructureReader,
        identify: StructureIdentifier,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        """UseCase 초기화.

        Args:
            scanner: 구조 파일 스캐너.
            reader: 구조 파서.
            identify: 구조 → 내용 기반 ID.
            log_sink: 로그 싱크 (선택적).
        """
        self._scanner = scanner
        self._reader = reader
        self._identify = identify
        self._log_sink = log_sink

    def execute(self, data: DataSettings, input_dir: Optional[Path] = None) -> DatasetLoadResult:
        """데이터셋 로드.

        input_dir (없으면 data.input_dir)이 주어지면 폴더를 읽고, 둘 다 없으면
        합성 helix 코퍼스를 만든다. 모든 구조는 중심화된다.

        Raises:
            EmptyDataset: 읽을 수 있는 구조가 하나도 없을 때.
        """
        folder = input_dir if input_dir is not None else data.input_dir
        if folder is None:
            result = self._synthetic(data)
        else:
            result = self._from_folder(Path(folder), data.chain)
        if not result.items:
            raise EmptyDataset(f"사용할 수 있는 구조가 없습니다 (실패 {len(result.failures)}건)")
        log_event(
            self._log_sink,
            "INFO",
            f"dataset loaded: {len(result.items)} structures, {len(result.failures)} failures",
            {"source": str(folder) if folder else "synthetic"},
        )
        return result

    def _synthetic(self, data: DataSettings) -> DatasetLoadResult:
        structures = synth_corpus(
            data.synthetic_structures,
            data.synthetic_min_len,
            data.synthetic_max_len,
            data.synthetic_noise_std,
            data.synthetic_seed,
        )
        items = [
            LoadedStructure(name=f"synth_{i:04d}", structure_id=self._identify(s), structure=s)
            for i, s in enumerate(structures)
        ]
        debug_step(self._log_sink, "synthetic_corpus_built", {"count": len(items)})
        return DatasetLoadResult(items=items)

    def _from_folder(self, folder: Path, chain: Optional[str]) -> DatasetLoadResult:
        files = self._scanner.scan(StructureScanRequest(root_folder=folder))
        debug_step(self._log_sink, "structure_files_found", {"folder": str(folder), "count": len(files)})
        result = DatasetLoadResult()
        for file in files:
            try:
                structure = center_structure(self._reader.parse(file.path.read_bytes(), file.format, chain))
            except (DomainError, OSError) as e:
                log_event(self._log_sink, "WARNING", f"구조 읽기 실패: {file.path.name}", {"error": str(e)})
                result.failures.append(
                    StructureRecord(structure_id=file.structure_name, error=str(e), error_type=type(e).__name__)
                )
                continue
            result.items.append(
                LoadedStructure(name=file.structure_name, structure_id=self._identify(structure), structure=structure)
            )
        return result
