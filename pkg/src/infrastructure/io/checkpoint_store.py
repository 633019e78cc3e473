"""이름 붙은 텐서 체크포인트 (ICheckpointStore 구현).

레이아웃 (little-endian):
    magic        8B  b"PAECKPT1"
    meta_len     u32 + 메타데이터 JSON (UTF-8)
    n_tensors    u32
    텐서마다:
        name_len u16 + 이름 (UTF-8)
        ndim     u8  + dims u32[ndim]
        payload  float32[prod(dims)]

checkpoint_id = 모든 (이름, shape, payload) 바이트의 xxhash64.
"""
import json
import struct
from pathlib import Path
from typing import Optional

import numpy as np
import xxhash

from application.ports.checkpoint_store import CheckpointPayload
from application.ports.log_sink import ILogSink
from application.utils.debug_logger import debug_step
from common.errors import CheckpointError

MAGIC = b"PAECKPT1"


class NamedTensorCheckpointStore:
    """파일 기반 체크포인트 저장소."""

    def __init__(self, log_sink: Optional[ILogSink] = None) -> None:
        self._log_sink = log_sink

    def save(self, path: Path, payload: CheckpointPayload) -> str:
        """체크포인트 저장.

        Args:
            path: 출력 파일 경로 (부모 디렉토리 자동 생성).
            payload: 텐서 + 메타데이터.

        Returns:
            checkpoint_id.
        """
        digest = xxhash.xxh64()
        records = []
        for name, array in payload.tensors.items():
            data = np.ascontiguousarray(array, dtype="<f4")
            name_bytes = name.encode("utf-8")
            header = struct.pack("<H", len(name_bytes)) + name_bytes
            header += struct.pack("<B", data.ndim) + struct.pack(f"<{data.ndim}I", *data.shape)
            body = data.tobytes()
            digest.update(header)
            digest.update(body)
            records.append(header + body)
        checkpoint_id = digest.hexdigest()
        meta = dict(payload.metadata, checkpoint_id=checkpoint_id)
        meta_bytes = json.dumps(meta, sort_keys=True, ensure_ascii=False).encode("utf-8")

        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("wb") as f:
                f.write(MAGIC)
                f.write(struct.pack("<I", len(meta_bytes)))
                f.write(meta_bytes)
                f.write(struct.pack("<I", len(records)))
                for record in records:
                    f.write(record)
        except OSError as e:
            raise CheckpointError(f"체크포인트 저장 실패: {path}") from e
        debug_step(self._log_sink, "checkpoint_saved", {"path": str(path), "checkpoint_id": checkpoint_id})
        return checkpoint_id

    def load(self, path: Path) -> CheckpointPayload:
        """체크포인트 로드.

        Raises:
            CheckpointError: 파일이 없거나 형식이 맞지 않을 때.
        """
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise CheckpointError(f"체크포인트를 읽을 수 없습니다: {path}") from e
        if not data.startswith(MAGIC):
            raise CheckpointError(f"체크포인트 형식이 아닙니다: {path}")
        try:
            offset = len(MAGIC)
            (meta_len,) = struct.unpack_from("<I", data, offset)
            offset += 4
            metadata = json.loads(data[offset : offset + meta_len].decode("utf-8"))
            offset += meta_len
            (n_tensors,) = struct.unpack_from("<I", data, offset)
            offset += 4
            tensors: dict[str, np.ndarray] = {}
            for _ in range(n_tensors):
                (name_len,) = struct.unpack_from("<H", data, offset)
                offset += 2
                name = data[offset : offset + name_len].decode("utf-8")
                offset += name_len
                (ndim,) = struct.unpack_from("<B", data, offset)
                offset += 1
                shape = struct.unpack_from(f"<{ndim}I", data, offset)
                offset += 4 * ndim
                count = int(np.prod(shape)) if ndim else 1
                tensors[name] = np.frombuffer(data, dtype="<f4", count=count, offset=offset).reshape(shape).copy()
                offset += 4 * count
        except (struct.error, ValueError, UnicodeDecodeError) as e:
            raise CheckpointError(f"체크포인트가 손상되었습니다: {path}") from e
        return CheckpointPayload(
            tensors=tensors,
            metadata=metadata,
            checkpoint_id=str(metadata.get("checkpoint_id", "")),
        )
