"""SQLite latent 캐시 구현."""
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Optional

import numpy as np

from application.ports.log_sink import ILogSink
from application.utils.debug_logger import debug_step
from common.errors import CacheError
from domain.value_objects.latent_representation import LatentRepresentation
from infrastructure.db.schema import CREATE_INDEX_CHECKPOINT, CREATE_TABLE_LATENTS


class SQLiteLatentCache:
    """SQLite 기반 latent 캐시 - ILatentCache 구현."""

    # 배치 삽입/조회 청크 크기
    CHUNK_SIZE = 500

    def __init__(self, db_path: Path, log_sink: Optional[ILogSink] = None) -> None:
        """캐시 초기화.

        Args:
            db_path: DB 파일 경로.
            log_sink: 로그 싱크 (선택적).
        """
        self._db_path = Path(db_path)
        self._log_sink = log_sink
        self._ensure_schema()

    def _ensure_schema(self) -> None:
        """스키마가 없으면 생성."""
        conn = self._connect()
        try:
            conn.executescript(CREATE_TABLE_LATENTS + ";\n" + CREATE_INDEX_CHECKPOINT + ";\n")
            conn.commit()
        finally:
            conn.close()

    def _connect(self) -> sqlite3.Connection:
        """DB 커넥션 생성 (메서드 호출마다 새 커넥션)."""
        try:
            return sqlite3.connect(str(self._db_path))
        except sqlite3.Error as e:
            raise CacheError(f"캐시 DB를 열 수 없습니다: {self._db_path}") from e

    def put_many(self, checkpoint_id: str, items: dict[str, LatentRepresentation]) -> None:
        """latent 배치 저장. 이미 있는 (checkpoint_id, structure_id)는 유지."""
        if not items:
            return
        debug_step(self._log_sink, "latent_cache_put", {"checkpoint_id": checkpoint_id, "count": len(items)})
        now = datetime.now().isoformat()
        rows = [
            (checkpoint_id, sid, lat.n_res, lat.n_down, lat.dim, lat.z.astype("<f4").tobytes(), now)
            for sid, lat in items.items()
        ]
        conn = self._connect()
        try:
            for start in range(0, len(rows), self.CHUNK_SIZE):
                conn.executemany(
                    "INSERT OR IGNORE INTO latents "
                    "(checkpoint_id, structure_id, n_res, n_down, dim, payload, created_at) "
                    "VALUES (?, ?, ?, ?, ?, ?, ?)",
                    rows[start : start + self.CHUNK_SIZE],
                )
            conn.commit()
        except sqlite3.Error as e:
            raise CacheError(f"latent 저장 실패: {e}") from e
        finally:
            conn.close()

    def get_many(self, checkpoint_id: str, structure_ids: list[str]) -> dict[str, LatentRepresentation]:
        """캐시된 latent 조회."""
        found: dict[str, LatentRepresentation] = {}
        conn = self._connect()
        try:
            for start in range(0, len(structure_ids), self.CHUNK_SIZE):
                chunk = structure_ids[start : start + self.CHUNK_SIZE]
                placeholders = ",".join("?" * len(chunk))
                cursor = conn.execute(
                    "SELECT structure_id, n_res, n_down, dim, payload FROM latents "
                    f"WHERE checkpoint_id = ? AND structure_id IN ({placeholders})",
                    [checkpoint_id, *chunk],
                )
                for sid, n_res, n_down, dim, payload in cursor:
                    z = np.frombuffer(payload, dtype="<f4").reshape(n_down, dim)
                    found[sid] = LatentRepresentation(z=z.copy(), n_res=n_res)
        except sqlite3.Error as e:
            raise CacheError(f"latent 조회 실패: {e}") from e
        finally:
            conn.close()
        debug_step(
            self._log_sink,
            "latent_cache_hit",
            {"checkpoint_id": checkpoint_id, "requested": len(structure_ids), "found": len(found)},
        )
        return found

    def created_at(self, checkpoint_id: str, structure_id: str) -> Optional[str]:
        """레코드 생성 시각."""
        conn = self._connect()
        try:
            row = conn.execute(
                "SELECT created_at FROM latents WHERE checkpoint_id = ? AND structure_id = ?",
                (checkpoint_id, structure_id),
            ).fetchone()
        finally:
            conn.close()
        return row[0] if row else None
