"""CLI 진입점 (Composition Root).

명령: train-ae, train-pldm, reconstruct, sample, eval, probe, sweep.
종료 코드: 0 성공, 1 설정/체크포인트 에러, 2 데이터 에러.
"""
import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from app.settings.config import RunConfig, load_run_config
from app.settings.constants import Constants
from application.dto.command_requests import (
    EvalRequest,
    ProbeRequest,
    ReconstructRequest,
    SampleRequest,
    SweepRequest,
)
from application.dto.run_layout import RunLayout
from application.use_cases.evaluate_structures import EvaluateStructuresUseCase
from application.use_cases.load_dataset import DatasetLoadResult, LoadDatasetUseCase
from application.use_cases.reconstruct_structures import ReconstructStructuresUseCase
from application.use_cases.sample_structures import SampleStructuresUseCase
from application.use_cases.sweep_bottleneck import SweepBottleneckUseCase
from application.use_cases.train_autoencoder import TrainAutoencoderUseCase
from application.use_cases.train_flexibility_probe import TrainFlexibilityProbeUseCase
from application.use_cases.train_pldm import TrainPLDMUseCase
from application.utils.debug_logger import log_event
from common.errors import ProteinAEError
from common.exception_mapper import EXIT_CONFIG_ERROR, EXIT_OK, describe_error, map_exit_code
from domain.entities.backbone_structure import BackboneStructure
from domain.services.designability import GeometryValidityDesignability
from infrastructure.db.paths import prepare_run_layout
from infrastructure.db.sqlite_latent_cache import SQLiteLatentCache
from infrastructure.fs.structure_scanner import FileSystemStructureScanner
from infrastructure.io.checkpoint_store import NamedTensorCheckpointStore
from infrastructure.io.pdb_writer import PdbStructureWriter
from infrastructure.io.structure_codec import structure_id
from infrastructure.io.structure_reader import BiopythonStructureReader
from infrastructure.logging.in_memory_log_sink import InMemoryLogSink
from infrastructure.plotting.report_plots import MatplotlibReportPlotter


class _ArgumentParser(argparse.ArgumentParser):
    """사용법 오류를 설정 에러 종료 코드(1)로 처리."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG_ERROR, f"{self.prog}: error: {message}\n")


def parse_lengths(text: str) -> tuple[int, ...]:
    """"60-64" 또는 "60,64,80-82" → 길이 튜플 (범위는 양 끝 포함)."""
    lengths: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = (int(v) for v in part.split("-", 1))
                if hi < lo:
                    raise ValueError(part)
                lengths.extend(range(lo, hi + 1))
            else:
                lengths.append(int(part))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid length list: {text!r}") from e
    if not lengths or min(lengths) < 1:
        raise argparse.ArgumentTypeError(f"lengths must be positive: {text!r}")
    return tuple(lengths)


def build_parser() -> argparse.ArgumentParser:
    """CLI 파서 구성."""
    parser = _ArgumentParser(prog=Constants.APP_NAME, description="protein backbone autoencoder + latent flow")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="JSON 설정 파일 (없으면 기본값)")
        p.add_argument("--run-name", default=None, help="io.run_name 덮어쓰기")
        return p

    command("train-ae", "autoencoder 학습")

    p = command("train-pldm", "고정 autoencoder latent 위 PLDM 학습")
    p.add_argument("--ae-checkpoint", type=Path, required=True)

    p = command("reconstruct", "인코딩 → 디코딩 재구성 RMSD")
    p.add_argument("--ae-checkpoint", type=Path, required=True)
    p.add_argument("--input-dir", type=Path, default=None)
    p.add_argument("--ode-steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = command("sample", "PLDM 샘플링 + 평가")
    p.add_argument("--pldm-checkpoint", type=Path, required=True)
    p.add_argument("--ae-checkpoint", type=Path, required=True)
    p.add_argument("--lengths", type=parse_lengths, required=True, help='예: "60-64" 또는 "60,80"')
    p.add_argument("--per-length", type=int, default=10)
    p.add_argument("--gamma", type=float, nargs="+", default=None, help="SDE 온도 (여러 값 가능)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference-dir", type=Path, default=None)
    p.add_argument("--ode-steps", type=int, default=None)

    p = command("eval", "구조 디렉토리 평가")
    p.add_argument("--input-dir", type=Path, required=True)
    p.add_argument("--reference-dir", type=Path, default=None)

    p = command("probe", "잔기 유연성 probe")
    p.add_argument("--ae-checkpoint", type=Path, required=True)
    p.add_argument("--input-dir", type=Path, required=True)

    p = command("sweep", "bottleneck (r, d) sweep")
    p.add_argument("--downsamples", type=int, nargs="+", default=[1, 2, 4])
    p.add_argument("--latent-dims", type=int, nargs="+", default=[4, 8, 16])
    p.add_argument("--seed", type=int, default=0)
    return parser


@dataclass
class AppContainer:
    """실행 하나의 의존성 묶음."""

    config: RunConfig
    layout: RunLayout
    log_sink: InMemoryLogSink
    checkpoint_store: NamedTensorCheckpointStore
    writer: PdbStructureWriter
    plotter: MatplotlibReportPlotter
    loader: LoadDatasetUseCase

    @classmethod
    def create(cls, config: RunConfig, console: bool = True) -> "AppContainer":
        layout = prepare_run_layout(config.run_dir())
        log_sink = InMemoryLogSink(log_dir=layout.logs_dir, console=console)
        loader = LoadDatasetUseCase(
            FileSystemStructureScanner(log_sink), BiopythonStructureReader(log_sink), structure_id, log_sink
        )
        return cls(
            config=config,
            layout=layout,
            log_sink=log_sink,
            checkpoint_store=NamedTensorCheckpointStore(log_sink),
            writer=PdbStructureWriter(),
            plotter=MatplotlibReportPlotter(),
            loader=loader,
        )

    def load(self, input_dir: Optional[Path] = None) -> DatasetLoadResult:
        return self.loader.execute(self.config.data, input_dir)

    def load_reference(self, reference_dir: Optional[Path]) -> Optional[list[BackboneStructure]]:
        if reference_dir is None:
            return None
        return self.load(reference_dir).structures


def _run_command(args: argparse.Namespace, app: AppContainer) -> None:
    config, layout, sink = app.config, app.layout, app.log_sink
    scorer = GeometryValidityDesignability(config.evaluation.designable_validity_fraction)
    trainer = TrainAutoencoderUseCase(app.checkpoint_store, app.plotter, sink)
    reconstructor = ReconstructStructuresUseCase(app.checkpoint_store, app.writer, app.plotter, sink)

    if args.command == "train-ae":
        summary = trainer.execute(config, app.load().structures, layout)
        log_event(sink, "INFO", f"train-ae 완료: {summary.checkpoint_path}", {
            "initial_loss": summary.initial_loss, "final_loss": summary.final_loss,
        })
    elif args.command == "train-pldm":
        cache = SQLiteLatentCache(layout.latent_cache, sink)
        use_case = TrainPLDMUseCase(app.checkpoint_store, cache, app.plotter, sink)
        summary = use_case.execute(config, app.load().items, args.ae_checkpoint, layout)
        log_event(sink, "INFO", f"train-pldm 완료: {summary.checkpoint_path}", {
            "initial_loss": summary.initial_loss, "final_loss": summary.final_loss,
            "cached_latents": summary.cached_latents,
        })
    elif args.command == "reconstruct":
        request = ReconstructRequest(args.ae_checkpoint, args.input_dir, args.seed, args.ode_steps)
        reconstructor.execute(request, app.load(request.input_dir), config.evaluation, layout)
    elif args.command == "sample":
        gammas = tuple(args.gamma) if args.gamma else (None,)
        request = SampleRequest(
            pldm_checkpoint=args.pldm_checkpoint,
            ae_checkpoint=args.ae_checkpoint,
            lengths=args.lengths,
            per_length=args.per_length,
            gammas=gammas,
            seed=args.seed,
            reference_dir=args.reference_dir,
            ode_steps=args.ode_steps,
        )
        use_case = SampleStructuresUseCase(app.checkpoint_store, app.writer, scorer, app.plotter, sink)
        use_case.execute(request, config.evaluation, layout, app.load_reference(request.reference_dir))
    elif args.command == "eval":
        request = EvalRequest(args.input_dir, args.reference_dir)
        use_case = EvaluateStructuresUseCase(scorer, app.plotter, sink)
        use_case.execute(app.load(request.input_dir), config.evaluation, layout, app.load_reference(request.reference_dir))
    elif args.command == "probe":
        request = ProbeRequest(args.ae_checkpoint, args.input_dir)
        use_case = TrainFlexibilityProbeUseCase(app.checkpoint_store, sink)
        use_case.execute(request, app.load(request.input_dir), config.probe, layout)
    elif args.command == "sweep":
        request = SweepRequest(tuple(args.downsamples), tuple(args.latent_dims), args.seed)
        use_case = SweepBottleneckUseCase(trainer, reconstructor, app.plotter, sink)
        use_case.execute(config, request, app.load(), layout)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI 메인 함수.

    Args:
        argv: 인자 목록 (None이면 sys.argv[1:]).

    Returns:
        종료 코드.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config)
        if args.run_name:
            config = config.model_copy(update={"io": config.io.model_copy(update={"run_name": args.run_name})})
        app = AppContainer.create(config)
    except ProteinAEError as e:
        print(f"[ERROR] {type(e).__name__}: {e}", file=sys.stderr)
        return map_exit_code(e)

    log_event(app.log_sink, "INFO", f"{args.command} 시작", {"run_dir": str(app.layout.root)})
    try:
        _run_command(args, app)
    except ProteinAEError as e:
        log_event(app.log_sink, "ERROR", f"{args.command} 실패", describe_error(e))
        return map_exit_code(e)
    log_event(app.log_sink, "INFO", f"{args.command} 완료")
    return EXIT_OK
