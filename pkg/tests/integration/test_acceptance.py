"""데스크 스케일 수용 테스트 (PROTEINAE_RUN_SLOW=1 일 때만 실행)."""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from app.main import main
from app.settings.config import RunConfig, parse_run_config
from app.settings.constants import Constants
from application.dto.command_requests import ReconstructRequest, SampleRequest, SweepRequest
from application.dto.training_summary import TrainingSummary
from application.use_cases.load_dataset import DatasetLoadResult, LoadDatasetUseCase
from application.use_cases.reconstruct_structures import ReconstructStructuresUseCase
from application.use_cases.sample_structures import SampleStructuresUseCase, gamma_label
from application.use_cases.sweep_bottleneck import SweepBottleneckUseCase
from application.use_cases.train_autoencoder import TrainAutoencoderUseCase
from application.use_cases.train_pldm import TrainPLDMUseCase
from application.utils.metric_report_json import load_metric_report
from domain.services.designability import GeometryValidityDesignability
from infrastructure.db.paths import prepare_run_layout
from infrastructure.db.sqlite_latent_cache import SQLiteLatentCache
from infrastructure.fs.structure_scanner import FileSystemStructureScanner
from infrastructure.io.checkpoint_store import NamedTensorCheckpointStore
from infrastructure.io.pdb_writer import PdbStructureWriter
from infrastructure.io.structure_codec import structure_id
from infrastructure.io.structure_reader import BiopythonStructureReader

pytestmark = pytest.mark.slow

DESK_CONFIG_JSON = """
{
  "model": {
    "autoencoder": {
      "dit": {"n_layers": 2, "token_dim": 64, "n_heads": 4, "c_cond": 64, "c_pair": 16, "n_registers": 4},
      "latent_dim": 8,
      "downsample": 1,
      "ode_steps": 20
    },
    "pldm": {
      "dit": {"n_layers": 2, "token_dim": 64, "n_heads": 4, "c_cond": 64, "c_pair": 16, "n_registers": 4}
    }
  },
  "train": {"batch_size": 8, "steps": 5000, "log_every": 500, "checkpoint_every": 5000, "learning_rate": 0.001},
  "data": {"synthetic_structures": 50, "synthetic_min_len": 16, "synthetic_max_len": 48, "synthetic_noise_std": 0.0}
}
"""


@dataclass
class DeskRun:
    """오버핏 학습까지 마친 데스크 실행."""

    config: RunConfig
    dataset: DatasetLoadResult
    root: Path
    store: NamedTensorCheckpointStore
    autoencoder: TrainingSummary


@pytest.fixture(scope="module")
def desk(tmp_path_factory: pytest.TempPathFactory) -> DeskRun:
    root = tmp_path_factory.mktemp("desk")
    config = parse_run_config(DESK_CONFIG_JSON)
    config = config.model_copy(update={"io": config.io.model_copy(update={"output_dir": root, "run_name": "desk"})})
    loader = LoadDatasetUseCase(FileSystemStructureScanner(), BiopythonStructureReader(), structure_id)
    dataset = loader.execute(config.data)
    store = NamedTensorCheckpointStore()
    summary = TrainAutoencoderUseCase(store).execute(config, dataset.structures, prepare_run_layout(config.run_dir()))
    return DeskRun(config, dataset, root, store, summary)


def _sweep_rmsds(
    run: DeskRun, seed: int, downsamples: tuple[int, ...], latent_dims: tuple[int, ...]
) -> dict[str, float]:
    store = run.store
    use_case = SweepBottleneckUseCase(
        TrainAutoencoderUseCase(store), ReconstructStructuresUseCase(store, PdbStructureWriter())
    )
    layout = prepare_run_layout(run.root / f"sweep_{seed}_{'_'.join(map(str, downsamples + latent_dims))}")
    report = use_case.execute(run.config, SweepRequest(downsamples, latent_dims, seed), run.dataset, layout)
    return {r.structure_id: r.metrics["mean_ca_rmsd"] for r in report.records}


class TestDeskExperiments:
    """축소 실험: 오버핏, bottleneck 순서, 생성."""

    def test_overfit_reconstruction(self, desk: DeskRun) -> None:
        """50 개 helix 학습 세트의 평균 CA RMSD ≤ 1.0 Å (ODE 20 스텝)."""
        layout = prepare_run_layout(desk.root / "overfit")
        request = ReconstructRequest(ae_checkpoint=desk.autoencoder.checkpoint_path, seed=0, ode_steps=20)
        report = ReconstructStructuresUseCase(desk.store, PdbStructureWriter()).execute(
            request, desk.dataset, desk.config.evaluation, layout
        )
        assert report.n_failed == 0
        assert report.aggregate["mean_ca_rmsd"] <= 1.0

    def test_bottleneck_ordering(self, desk: DeskRun) -> None:
        """d=32: r=4 > r=2 > r=1, r=1: d=8 ≥ d=64 (3 시드 중 2 이상)."""
        length_wins, width_wins = 0, 0
        for seed in range(3):
            by_length = _sweep_rmsds(desk, seed, (1, 2, 4), (32,))
            length_wins += by_length["r4_d32"] > by_length["r2_d32"] > by_length["r1_d32"]
            by_width = _sweep_rmsds(desk, seed, (1,), (8, 64))
            width_wins += by_width["r1_d8"] >= by_width["r1_d64"]
        assert length_wins >= 2
        assert width_wins >= 2

    def test_generation(self, desk: DeskRun) -> None:
        """γ=0 샘플 32 개 중 80% 이상이 잔기 60% 이상 유효, γ=0.5 가 γ=0.35 보다 다양하다."""
        config = desk.config.model_copy(update={"train": desk.config.train.model_copy(update={"steps": 2000})})
        layout = prepare_run_layout(desk.root / "generation")
        pldm = TrainPLDMUseCase(desk.store, SQLiteLatentCache(layout.latent_cache)).execute(
            config, desk.dataset.items, desk.autoencoder.checkpoint_path, layout
        )
        sampler = SampleStructuresUseCase(desk.store, PdbStructureWriter(), GeometryValidityDesignability())

        def request(**kwargs) -> SampleRequest:
            return SampleRequest(
                pldm_checkpoint=pldm.checkpoint_path, ae_checkpoint=desk.autoencoder.checkpoint_path, **kwargs
            )

        report = sampler.execute(
            request(lengths=(16, 24, 32, 40), per_length=8, gammas=(0.0,), seed=0), config.evaluation, layout
        )
        validity = np.array([r.metrics["validity"] for r in report.records])
        assert validity.size == 32
        assert np.mean(validity >= 0.6) >= 0.8

        low, high = [], []
        for seed in range(3):
            run = prepare_run_layout(desk.root / f"diversity_{seed}")
            report = sampler.execute(
                request(lengths=(32,), per_length=8, gammas=(0.35, 0.5), seed=seed), config.evaluation, run
            )
            low.append(report.aggregate[gamma_label(0.35)]["latent_distance"])
            high.append(report.aggregate[gamma_label(0.5)]["latent_distance"])
        assert np.mean(high) > np.mean(low)


@pytest.fixture
def trained(tiny_config_file: Path, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> tuple[Path, Path, Path]:
    monkeypatch.delenv(Constants.RUN_DIR_ENV_VAR, raising=False)
    run_dir = tmp_path / "runs" / "cli"
    assert main(["train-ae", "--config", str(tiny_config_file)]) == 0
    ae = run_dir / "checkpoints" / "autoencoder.ckpt"
    assert main(["train-pldm", "--config", str(tiny_config_file), "--ae-checkpoint", str(ae)]) == 0
    return run_dir, ae, run_dir / "checkpoints" / "pldm.ckpt"


def _sample(config_file: Path, ae: Path, pldm: Path, run_name: str, *extra: str) -> int:
    return main([
        "sample", "--config", str(config_file), "--run-name", run_name,
        "--pldm-checkpoint", str(pldm), "--ae-checkpoint", str(ae), *extra,
    ])


class TestAcceptance:
    """CLI 수용 시나리오."""

    def test_fifty_samples(self, tiny_config_file: Path, tmp_path: Path, trained) -> None:
        _, ae, pldm = trained
        assert _sample(tiny_config_file, ae, pldm, "s50", "--lengths", "60-64", "--per-length", "10") == 0
        run_dir = tmp_path / "runs" / "s50"
        assert len(list((run_dir / "structures" / "sample").rglob("*.pdb"))) == 50
        records, aggregate = load_metric_report(run_dir / "sample_report.jsonl")
        assert len(records) == 50
        section = aggregate[aggregate["gammas"][0]]
        assert 0.0 <= section["designable_fraction"] <= 1.0

    def test_gamma_zero_reproducible(self, tiny_config_file: Path, tmp_path: Path, trained) -> None:
        _, ae, pldm = trained
        args = ("--lengths", "60", "--per-length", "3", "--gamma", "0", "--seed", "7")
        assert _sample(tiny_config_file, ae, pldm, "rep_a", *args) == 0
        assert _sample(tiny_config_file, ae, pldm, "rep_b", *args) == 0
        a = sorted((tmp_path / "runs" / "rep_a" / "structures" / "sample").rglob("*.pdb"))
        b = sorted((tmp_path / "runs" / "rep_b" / "structures" / "sample").rglob("*.pdb"))
        assert [p.name for p in a] == [p.name for p in b]
        assert all(x.read_bytes() == y.read_bytes() for x, y in zip(a, b))
