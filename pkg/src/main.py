"""CLI 진입점 (``python src/main.py <command> ...``)."""
import sys
from pathlib import Path

# 패키지 import 경로: src
src_path = Path(__file__).parent
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from app.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
