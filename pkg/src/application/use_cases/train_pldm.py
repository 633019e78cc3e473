"""PLDM 학습 UseCase (고정 autoencoder의 latent 위 flow matching)."""
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
from application.ports.latent_cache import ILatentCache
from application.ports.log_sink import ILogSink
from application.ports.report_plotter import IReportPlotter
from application.use_cases.load_dataset import LoadedStructure
from application.utils.debug_logger import debug_context, debug_step, log_event
from application.utils.model_factory import (
    autoencoder_from_payload,
    build_pldm,
    model_to_payload,
    time_sampler_config,
)
from application.utils.training import build_training_summary, run_training, write_loss_csv
from common.errors import CheckpointMismatch, EmptyDataset
from domain.value_objects.latent_representation import LatentRepresentation
from modeling.autoencoder import MIN_ENCODE_LENGTH, ProteinAE, encode_structures, latent_stats
from modeling.batching import collate_latents
from modeling.flow import sample_t


def check_latent_geometry(config: RunConfig, ae_config: RunConfig) -> None:
    """설정의 (d, r)이 autoencoder 체크포인트와 같은지 확인.

    Raises:
        CheckpointMismatch: latent_dim 또는 downsample이 다를 때.
    """
    ours, theirs = config.model.autoencoder, ae_config.model.autoencoder
    if (ours.latent_dim, ours.downsample) != (theirs.latent_dim, theirs.downsample):
        raise CheckpointMismatch(
            f"config latent (d={ours.latent_dim}, r={ours.downsample}) != "
            f"checkpoint latent (d={theirs.latent_dim}, r={theirs.downsample})"
        )


class TrainPLDMUseCase:
    """PLDM 학습 UseCase.

    latent는 (autoencoder checkpoint_id, structure_id) 키로 캐시되어 두 번째
    실행부터는 다시 인코딩하지 않는다.
    """

    def __init__(
        self,
        checkpoint_store: ICheckpointStore,
        latent_cache: ILatentCache,
        plotter: Optional[IReportPlotter] = None,
        log_sink: Optional[ILogSink] = None,
    ) -> None:
        self._checkpoint_store = checkpoint_store
        self._latent_cache = latent_cache
        self._plotter = plotter
        self._log_sink = log_sink

    def encode_dataset(
        self,
        dataset: list[LoadedStructure],
        model: ProteinAE,
        checkpoint_id: str,
        batch_size: int,
    ) -> tuple[list[LatentRepresentation], int]:
        """캐시 우선 latent 인코딩.

        Returns:
            (latent 리스트 (dataset 순서, 너무 짧은 구조 제외), 캐시 적중 수).
        """
        usable = [item for item in dataset if item.structure.n_res >= MIN_ENCODE_LENGTH]
        if len(usable) < len(dataset):
            log_event(self._log_sink, "WARNING", f"{len(dataset) - len(usable)} structures too short to encode")
        ids = [item.structure_id for item in usable]
        cached = self._latent_cache.get_many(checkpoint_id, ids)
        missing = [item for item in usable if item.structure_id not in cached]
        debug_step(self._log_sink, "latent_cache_lookup", {"hit": len(cached), "miss": len(missing)})

        encoded: dict[str, LatentRepresentation] = {}
        for start in range(0, len(missing), batch_size):
            chunk = missing[start : start + batch_size]
            latents = encode_structures([item.structure for item in chunk], model)
            encoded.update({item.structure_id: lat for item, lat in zip(chunk, latents)})
        if encoded:
            self._latent_cache.put_many(checkpoint_id, encoded)
        merged = {**cached, **encoded}
        return [merged[i] for i in ids], len(cached)

    def execute(
        self,
        config: RunConfig,
        dataset: list[LoadedStructure],
        ae_checkpoint: Path,
        layout: RunLayout,
    ) -> TrainingSummary:
        """학습 실행.

        Raises:
            CheckpointError: autoencoder 체크포인트를 읽을 수 없을 때.
            CheckpointMismatch: latent (d, r)이 설정과 다를 때.
            EmptyDataset: 인코딩할 구조가 없을 때.
        """
        device = torch.device(config.train.device)
        payload = self._checkpoint_store.load(ae_checkpoint)
        ae_model, ae_config = autoencoder_from_payload(payload, config.train.device)
        check_latent_geometry(config, ae_config)
        layout.write_config_snapshot(dump_run_config(config))

        with debug_context(self._log_sink, "encode_latents", {"n_structures": len(dataset)}):
            latents, n_cached = self.encode_dataset(
                dataset, ae_model, payload.checkpoint_id, config.train.batch_size
            )
        if not latents:
            raise EmptyDataset("PLDM 학습에 쓸 latent가 없습니다")
        log_event(self._log_sink, "INFO", "latent corpus ready", {"count": len(latents), **latent_stats(latents)})

        seed = config.train.seed
        rng = np.random.default_rng(seed)
        model = build_pldm(config, seed)
        generator = torch.Generator(device=device).manual_seed(seed)
        sampler = time_sampler_config(config.time_sampler)

        def step_loss(indices: np.ndarray) -> Tensor:
            batch = collate_latents([latents[i] for i in indices], torch.float32, device)
            t = torch.as_tensor(sample_t(len(indices), rng, sampler), dtype=torch.float32, device=device)
            return model.training_loss(batch.z, batch.mask, t, generator)

        def save(step: Optional[int], final_step: int) -> tuple[Path, str]:
            path = layout.checkpoint("pldm", step)
            extra = {"ae_checkpoint_id": payload.checkpoint_id}
            checkpoint_id = self._checkpoint_store.save(path, model_to_payload(model, "pldm", config, final_step, extra))
            return path, checkpoint_id

        start = perf_counter()
        with debug_context(self._log_sink, "train_pldm_loop"):
            losses = run_training(
                model, step_loss, len(latents), config.train, rng, self._log_sink,
                on_checkpoint=lambda step: save(step, step), label="train-pldm",
            )
        elapsed_ms = int((perf_counter() - start) * Constants.MILLISECONDS_PER_SECOND)

        checkpoint_path, checkpoint_id = save(None, len(losses))
        loss_csv = write_loss_csv(layout.loss_csv("pldm"), losses)
        if self._plotter is not None:
            self._plotter.loss_curve(losses, layout.plot("pldm_loss"), "PLDM loss")
        return build_training_summary(
            "pldm", losses, config.train, elapsed_ms, checkpoint_path, checkpoint_id, loss_csv, n_cached
        )
