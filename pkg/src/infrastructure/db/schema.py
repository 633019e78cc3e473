"""SQLite latent 캐시 스키마 정의."""

# latents 테이블 (체크포인트 × 구조 당 레코드 하나)
# payload: little-endian float32, 행 우선 (n_down × d)
CREATE_TABLE_LATENTS = """
CREATE TABLE IF NOT EXISTS latents (
    latent_id INTEGER PRIMARY KEY AUTOINCREMENT,
    checkpoint_id TEXT NOT NULL,
    structure_id TEXT NOT NULL,
    n_res INTEGER NOT NULL,
    n_down INTEGER NOT NULL,
    dim INTEGER NOT NULL,
    payload BLOB NOT NULL,
    created_at TEXT NOT NULL,
    UNIQUE(checkpoint_id, structure_id)
)
"""

CREATE_INDEX_CHECKPOINT = """
CREATE INDEX IF NOT EXISTS idx_latents_checkpoint ON latents(checkpoint_id)
"""
