"""실행 출력 경로 처리."""
from pathlib import Path

from application.dto.run_layout import RunLayout


def prepare_run_layout(run_dir: Path) -> RunLayout:
    """실행 디렉토리 레이아웃 생성.

    디렉토리가 없으면 자동 생성합니다.

    Args:
        run_dir: 실행 디렉토리.

    Returns:
        RunLayout.
    """
    layout = RunLayout(root=Path(run_dir))
    for directory in (layout.root, layout.checkpoints_dir, layout.plots_dir, layout.logs_dir):
        directory.mkdir(parents=True, exist_ok=True)
    return layout
