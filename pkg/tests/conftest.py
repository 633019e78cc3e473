"""Pytest 설정 파일."""

import os
import sys
from pathlib import Path

import pytest

# src 디렉토리를 sys.path에 추가
src_path = Path(__file__).parent.parent / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from app.settings.config import RunConfig, parse_run_config  # noqa: E402
from app.settings.constants import Constants  # noqa: E402

TINY_CONFIG_JSON = """
{
  "model": {
    "autoencoder": {
      "dit": {"n_layers": 1, "token_dim": 16, "n_heads": 2, "c_cond": 16, "c_pair": 8, "n_registers": 2},
      "latent_dim": 4,
      "downsample": 1,
      "ode_steps": 2,
      "time_embed_dim": 8,
      "c_atom": 8,
      "c_atompair": 4,
      "atom_layers": 1,
      "atom_heads": 2,
      "n_queries": 4,
      "n_keys": 8
    },
    "pldm": {
      "dit": {"n_layers": 1, "token_dim": 16, "n_heads": 2, "c_cond": 16, "c_pair": 8, "n_registers": 2},
      "time_embed_dim": 8,
      "sde": {"n_steps": 3}
    }
  },
  "train": {"batch_size": 2, "steps": 2, "log_every": 1, "checkpoint_every": 100, "learning_rate": 0.001},
  "data": {"synthetic_structures": 3, "synthetic_min_len": 8, "synthetic_max_len": 10},
  "probe": {"hidden_dim": 8, "epochs": 2, "batch_size": 4}
}
"""


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: 데스크 스케일 수용 테스트 (PROTEINAE_RUN_SLOW=1 일 때만 실행)")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if os.environ.get(Constants.SLOW_TESTS_ENV_VAR) == "1":
        return
    skip_slow = pytest.mark.skip(reason=f"{Constants.SLOW_TESTS_ENV_VAR}=1 일 때만 실행")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_config(tmp_path: Path) -> RunConfig:
    """모든 모델 차원을 최소로 줄인 설정 (출력은 tmp_path 아래)."""
    config = parse_run_config(TINY_CONFIG_JSON)
    io = config.io.model_copy(update={"output_dir": tmp_path / "runs", "run_name": "tiny"})
    return config.model_copy(update={"io": io})


@pytest.fixture
def tiny_config_file(tmp_path: Path) -> Path:
    """TINY_CONFIG_JSON + io.output_dir 를 담은 설정 파일."""
    text = TINY_CONFIG_JSON.rstrip().rstrip("}")
    text += f',\n  "io": {{"output_dir": "{(tmp_path / "runs").as_posix()}", "run_name": "cli"}}\n}}\n'
    path = tmp_path / "config.json"
    path.write_text(text, encoding="utf-8")
    return path
