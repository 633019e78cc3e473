"""BackboneStructure 바이너리 컨테이너.

레이아웃 (little-endian):
    magic   4B  b"PAEB"
    version u16
    n_res   u32
    chain   u16 길이 + UTF-8 바이트
    res_index  int32[n_res]
    coords     float32[n_res·4·3]
    res_mask   uint8[n_res]
"""
import struct

import numpy as np
import xxhash

from common.errors import MalformedFile
from domain.entities.backbone_structure import BackboneStructure

MAGIC = b"PAEB"
VERSION = 1
_HEADER = struct.Struct("<4sHI")


def encode_structure(structure: BackboneStructure) -> bytes:
    """구조 → 바이트."""
    chain = structure.chain_id.encode("utf-8")
    parts = [
        _HEADER.pack(MAGIC, VERSION, structure.n_res),
        struct.pack("<H", len(chain)),
        chain,
        structure.res_index.astype("<i4").tobytes(),
        structure.coords.astype("<f4").tobytes(),
        structure.res_mask.astype(np.uint8).tobytes(),
    ]
    return b"".join(parts)


def decode_structure(data: bytes) -> BackboneStructure:
    """바이트 → 구조.

    Raises:
        MalformedFile: magic/버전/길이가 맞지 않을 때.
    """
    try:
        magic, version, n_res = _HEADER.unpack_from(data, 0)
        if magic != MAGIC or version != VERSION:
            raise MalformedFile("알 수 없는 구조 컨테이너 형식")
        offset = _HEADER.size
        (chain_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        chain = data[offset : offset + chain_len].decode("utf-8")
        offset += chain_len
        res_index = np.frombuffer(data, dtype="<i4", count=n_res, offset=offset)
        offset += 4 * n_res
        coords = np.frombuffer(data, dtype="<f4", count=n_res * 12, offset=offset).reshape(n_res, 4, 3)
        offset += 4 * 12 * n_res
        res_mask = np.frombuffer(data, dtype=np.uint8, count=n_res, offset=offset).astype(bool)
    except (struct.error, ValueError, UnicodeDecodeError) as e:
        raise MalformedFile(f"구조 컨테이너 디코딩 실패: {e}") from e
    return BackboneStructure(coords=coords.astype(np.float64), res_index=res_index, res_mask=res_mask, chain_id=chain)


def structure_id(structure: BackboneStructure) -> str:
    """내용 기반 구조 ID (컨테이너 바이트의 xxhash64)."""
    return xxhash.xxh64(encode_structure(structure)).hexdigest()
