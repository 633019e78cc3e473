"""CLI 테스트."""
import argparse
from pathlib import Path

import pytest

from app.main import main, parse_lengths
from app.settings.constants import Constants
from application.utils.metric_report_json import load_metric_report
from domain.services.synthetic import synth_helix
from infrastructure.io.pdb_writer import PdbStructureWriter


@pytest.fixture(autouse=True)
def _no_run_dir_override(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(Constants.RUN_DIR_ENV_VAR, raising=False)


def _run_dir(tmp_path: Path) -> Path:
    return tmp_path / "runs" / "cli"


def _train_both(config_file: Path, tmp_path: Path) -> tuple[Path, Path]:
    assert main(["train-ae", "--config", str(config_file)]) == 0
    ae = _run_dir(tmp_path) / "checkpoints" / "autoencoder.ckpt"
    assert main(["train-pldm", "--config", str(config_file), "--ae-checkpoint", str(ae)]) == 0
    return ae, _run_dir(tmp_path) / "checkpoints" / "pldm.ckpt"


class TestParseLengths:
    """길이 목록 파싱 테스트."""

    def test_ranges_and_values(self) -> None:
        assert parse_lengths("60-64,80") == (60, 61, 62, 63, 64, 80)

    @pytest.mark.parametrize("text", ["", "a", "64-60", "0"])
    def test_invalid(self, text: str) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_lengths(text)


class TestMain:
    """명령 실행 테스트."""

    def test_usage_error_exits_1(self) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["sample", "--lengths", "60"])
        assert exc.value.code == 1

    def test_missing_config_exits_1(self, tmp_path: Path) -> None:
        assert main(["train-ae", "--config", str(tmp_path / "none.json")]) == 1

    def test_missing_checkpoint_exits_1(self, tiny_config_file: Path, tmp_path: Path) -> None:
        code = main(["train-pldm", "--config", str(tiny_config_file), "--ae-checkpoint", str(tmp_path / "x.ckpt")])
        assert code == 1

    def test_empty_input_dir_exits_2(self, tiny_config_file: Path, tmp_path: Path) -> None:
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["eval", "--config", str(tiny_config_file), "--input-dir", str(empty)]) == 2

    def test_train_and_sample(self, tiny_config_file: Path, tmp_path: Path) -> None:
        ae, pldm = _train_both(tiny_config_file, tmp_path)
        run_dir = _run_dir(tmp_path)
        assert (run_dir / "config.json").exists()
        assert (run_dir / "latents.db").exists()
        code = main([
            "sample", "--config", str(tiny_config_file),
            "--pldm-checkpoint", str(pldm), "--ae-checkpoint", str(ae),
            "--lengths", "8-9", "--per-length", "2", "--gamma", "0", "0.5",
        ])
        assert code == 0
        records, aggregate = load_metric_report(run_dir / "sample_report.jsonl")
        assert len(records) == 8
        assert aggregate["gammas"] == ["g0", "g0.5"]
        assert list((run_dir / "logs").glob("*.log"))

    def test_eval_and_reconstruct_folder(self, tiny_config_file: Path, tmp_path: Path) -> None:
        folder = tmp_path / "pdbs"
        folder.mkdir()
        (folder / "helix.pdb").write_text(PdbStructureWriter().write(synth_helix(10)))
        assert main(["train-ae", "--config", str(tiny_config_file)]) == 0
        ae = _run_dir(tmp_path) / "checkpoints" / "autoencoder.ckpt"
        assert main(["eval", "--config", str(tiny_config_file), "--input-dir", str(folder)]) == 0
        code = main([
            "reconstruct", "--config", str(tiny_config_file), "--ae-checkpoint", str(ae), "--input-dir", str(folder),
        ])
        assert code == 0
        assert (_run_dir(tmp_path) / "structures" / "reconstruct" / "helix.pdb").exists()
