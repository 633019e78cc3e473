"""UseCase 테스트 공용 fixture (작은 설정으로 실제 학습)."""
from pathlib import Path

import pytest

from app.settings.config import RunConfig
from application.dto.run_layout import RunLayout
from application.dto.training_summary import TrainingSummary
from application.use_cases.load_dataset import DatasetLoadResult, LoadDatasetUseCase
from application.use_cases.train_autoencoder import TrainAutoencoderUseCase
from application.use_cases.train_pldm import TrainPLDMUseCase
from infrastructure.db.paths import prepare_run_layout
from infrastructure.db.sqlite_latent_cache import SQLiteLatentCache
from infrastructure.fs.structure_scanner import FileSystemStructureScanner
from infrastructure.io.checkpoint_store import NamedTensorCheckpointStore
from infrastructure.io.structure_codec import structure_id
from infrastructure.io.structure_reader import BiopythonStructureReader


@pytest.fixture
def loader() -> LoadDatasetUseCase:
    return LoadDatasetUseCase(FileSystemStructureScanner(), BiopythonStructureReader(), structure_id)


@pytest.fixture
def layout(tiny_config: RunConfig) -> RunLayout:
    return prepare_run_layout(tiny_config.run_dir())


@pytest.fixture
def dataset(tiny_config: RunConfig, loader: LoadDatasetUseCase) -> DatasetLoadResult:
    return loader.execute(tiny_config.data)


@pytest.fixture
def store() -> NamedTensorCheckpointStore:
    return NamedTensorCheckpointStore()


@pytest.fixture
def ae_summary(
    tiny_config: RunConfig, dataset: DatasetLoadResult, layout: RunLayout, store: NamedTensorCheckpointStore
) -> TrainingSummary:
    return TrainAutoencoderUseCase(store).execute(tiny_config, dataset.structures, layout)


@pytest.fixture
def pldm_summary(
    tiny_config: RunConfig,
    dataset: DatasetLoadResult,
    layout: RunLayout,
    store: NamedTensorCheckpointStore,
    ae_summary: TrainingSummary,
) -> TrainingSummary:
    cache = SQLiteLatentCache(layout.latent_cache)
    return TrainPLDMUseCase(store, cache).execute(tiny_config, dataset.items, ae_summary.checkpoint_path, layout)


def read_texts(folder: Path) -> dict[str, str]:
    """폴더 아래 PDB 파일 이름 → 내용."""
    return {p.relative_to(folder).as_posix(): p.read_text() for p in sorted(folder.rglob("*.pdb"))}
