"""ProteinAE 학습 UseCase."""
from pathlib import Path
from time import perf_counter
from typing import Optional

import numpy as np
import torch
from torch import Tensor

from app.settings.config import RunConfig, dump_run_config
from app.settings.constants import Constants
from application.dto.run_layout import RunLayout
from application.dto.training_summary import TrainingSummary
from application.ports.checkpoint_store import ICheckpointStore
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.utils.debug_logger import debug_context, debug_step
from application.utils.model_factory import build_autoencoder, model_to_payload, time_sampler_config
from application.utils.training import build_training_summary, run_training, write_loss_csv
from common.errors import EmptyDataset
from domain.entities.backbone_structure import BackboneStructure
from domain.services.geometry import center_structure, random_rotation
from modeling.batching import collate_structures
from modeling.flow import sample_t


class TrainAutoencoderUseCase:
    """재구성 flow matching 손실로 ProteinAE를 학습한다.

    배치마다 구조에 랜덤 전역 회전을 적용한 뒤 다시 중심화하고, t는 혼합
    분포에서, self-conditioning 여부는 self_cond_prob 확률로 정한다.
    """

    def __init__(
        self,
        checkpoint_store: ICheckpointStore,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._checkpoint_store = checkpoint_store
        self._plotter = plotter
        self._log_sink = log_sink

    def execute(
        self,
        config: RunConfig,
        dataset: list[BackboneStructure],
        layout: RunLayout,
    ) -> TrainingSummary:
        """학습 실행.

        Args:
            config: 실행 설정.
            dataset: 중심화된 학습 구조.
            layout: 실행 디렉토리 레이아웃.

        Returns:
            학습 요약.

        Raises:
            EmptyDataset: 데이터셋이 비었을 때.
        """
        if not dataset:
            raise EmptyDataset("autoencoder 학습 데이터가 없습니다")
        layout.write_config_snapshot(dump_run_config(config))

        seed = config.train.seed
        device = torch.device(config.train.device)
        rng = np.random.default_rng(seed)
        model = build_autoencoder(config, seed)
        generator = torch.Generator(device=device).manual_seed(seed)
        sampler = time_sampler_config(config.time_sampler)
        r = model.config.downsample
        self_cond_prob = model.config.self_cond_prob

        def step_loss(indices: np.ndarray) -> Tensor:
            structures = [center_structure(random_rotation(dataset[i], rng)) for i in indices]
            batch = collate_structures(structures, r, torch.float32, device)
            t = torch.as_tensor(sample_t(len(indices), rng, sampler), dtype=torch.float32, device=device)
            use_self_cond = bool(rng.random() < self_cond_prob)
            return model.training_loss(batch.x, batch.mask, t, use_self_cond, generator, batch.res_index)

        def save(step: Optional[int], final_step: int) -> tuple[Path, str]:
            path = layout.checkpoint("autoencoder", step)
            checkpoint_id = self._checkpoint_store.save(
                path, model_to_payload(model, "autoencoder", config, final_step)
            )
            return path, checkpoint_id

        debug_step(self._log_sink, "train_ae_start", {
            "n_structures": len(dataset),
            "n_parameters": sum(p.numel() for p in model.parameters()),
            "downsample": r,
            "latent_dim": model.config.latent_dim,
        })
        start = perf_counter()
        with debug_context(self._log_sink, "train_ae_loop"):
            losses = run_training(
                model, step_loss, len(dataset), config.train, rng, self._log_sink,
                on_checkpoint=lambda step: save(step, step), label="train-ae",
            )
        elapsed_ms = int((perf_counter() - start) * Constants.MILLISECONDS_PER_SECOND)

        checkpoint_path, checkpoint_id = save(None, len(losses))
        loss_csv = write_loss_csv(layout.loss_csv("autoencoder"), losses)
        if self._plotter is not None:
            self._plotter.loss_curve(losses, layout.plot("autoencoder_loss"), "autoencoder loss")
        return build_training_summary(
            "autoencoder", losses, config.train, elapsed_ms, checkpoint_path, checkpoint_id, loss_csv
        )
