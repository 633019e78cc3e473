"""Biopython 기반 PDB/mmCIF backbone 리더."""
import io
from typing import Optional

import numpy as np
from Bio.PDB import MMCIFParser, PDBParser
from charset_normalizer import from_bytes

from app.settings.constants import Constants
from application.dto.structure_scan import StructureFormat
from application.ports.log_sink import ILogSink
from application.utils.debug_logger import debug_step
from common.errors import ChainNotFound, EmptyChain, MalformedFile
from domain.entities.backbone_structure import ATOM_CA, BackboneStructure


def decode_structure_text(data: bytes) -> str:
    """파일 바이트를 텍스트로 디코딩 (charset-normalizer로 인코딩 감지).

    Raises:
        MalformedFile: 비었거나 텍스트로 디코딩할 수 없을 때.
    """
    if not data.strip():
        raise MalformedFile("구조 파일이 비어 있습니다")
    try:
        return data.decode(Constants.LOG_FILE_ENCODING)
    except UnicodeDecodeError:
        best = from_bytes(data).best()
        if best is None:
            raise MalformedFile("구조 파일을 텍스트로 디코딩할 수 없습니다") from None
        return str(best)


class BiopythonStructureReader:
    """IStructureReader 구현."""

    def __init__(self, log_sink: Optional[ILogSink] = None) -> None:
        """리더 초기화.

        Args:
            log_sink: 로그 싱크 (선택적).
        """
        self._log_sink = log_sink

    def parse(self, data: bytes, fmt: StructureFormat, chain: Optional[str] = None) -> BackboneStructure:
        """파일 바이트 → BackboneStructure.

        첫 모델만 사용한다. 이종 잔기(HETATM, 물)와 삽입 코드 잔기는 건너뛰고,
        N/CA/C/O 중 하나라도 없는 잔기는 마스크된다.

        Raises:
            MalformedFile: 파싱 실패, 원자 없음, 인접 CA–CA 거리가 (2.0, 4.5) 밖일 때.
            ChainNotFound: 요청한 체인이 없을 때.
            EmptyChain: 완전한 잔기가 하나도 없을 때.
        """
        text = decode_structure_text(data)
        parser = PDBParser(QUIET=True) if fmt == "pdb" else MMCIFParser(QUIET=True)
        try:
            bio_structure = parser.get_structure("input", io.StringIO(text))
        except Exception as e:
            raise MalformedFile(f"구조 파일 파싱 실패: {e}") from e

        models = list(bio_structure)
        if not models or not list(models[0]):
            raise MalformedFile("구조 파일에 원자가 없습니다")
        model = models[0]
        if chain is None:
            bio_chain = next(iter(model))
        elif chain in model:
            bio_chain = model[chain]
        else:
            raise ChainNotFound(f"체인을 찾을 수 없습니다: {chain}")

        coords, res_index, res_mask, b_factors = [], [], [], []
        for residue in bio_chain:
            hetflag, resseq, icode = residue.id
            if hetflag != " " or icode != " ":
                continue
            atoms = [residue[name] if name in residue else None for name in Constants.BACKBONE_ATOMS]
            complete = all(a is not None for a in atoms)
            coords.append(
                np.array([a.get_coord() for a in atoms], dtype=np.float64) if complete else np.zeros((4, 3))
            )
            res_index.append(resseq)
            res_mask.append(complete)
            b_factors.append(float(atoms[ATOM_CA].get_bfactor()) if atoms[ATOM_CA] is not None else 0.0)

        if not any(res_mask):
            raise EmptyChain(f"완전한 backbone 잔기가 없습니다 (chain {bio_chain.id})")

        structure = BackboneStructure(
            coords=np.stack(coords),
            res_index=np.array(res_index),
            res_mask=np.array(res_mask),
            chain_id=str(bio_chain.id),
            ca_b_factor=np.array(b_factors),
        )
        validate_ca_geometry(structure)
        debug_step(
            self._log_sink,
            "structure_parsed",
            {"chain": structure.chain_id, "n_res": structure.n_res, "n_masked": int((~structure.res_mask).sum())},
        )
        return structure


def validate_ca_geometry(structure: BackboneStructure) -> None:
    """번호가 연속한 유효 잔기 쌍의 CA–CA 거리 검사.

    Raises:
        MalformedFile: 거리가 (INGEST_CA_CA_MIN, INGEST_CA_CA_MAX) 밖일 때.
    """
    ca = structure.ca
    consecutive = (np.diff(structure.res_index) == 1) & structure.res_mask[:-1] & structure.res_mask[1:]
    if not consecutive.any():
        return
    dist = np.linalg.norm(np.diff(ca, axis=0), axis=-1)[consecutive]
    bad = (dist <= Constants.INGEST_CA_CA_MIN) | (dist >= Constants.INGEST_CA_CA_MAX)
    if bad.any():
        raise MalformedFile(f"인접 CA–CA 거리 이상: {float(dist[bad][0]):.2f}Å")
