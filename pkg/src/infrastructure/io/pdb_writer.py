"""Backbone → PDB 텍스트 (Biopython PDBIO)."""
import io

from Bio.PDB import PDBIO
from Bio.PDB.StructureBuilder import StructureBuilder

from app.settings.constants import Constants
from domain.entities.backbone_structure import BackboneStructure

RESIDUE_NAME = "GLY"
_ATOM_FULLNAMES = (" N  ", " CA ", " C  ", " O  ")


class PdbStructureWriter:
    """IStructureWriter 구현. 점유율 1.00, B-factor 0.00, 잔기 이름 GLY."""

    def write(self, structure: BackboneStructure) -> str:
        """PDB 텍스트 반환 (마스크된 잔기 제외, 같은 입력 → 같은 출력)."""
        builder = StructureBuilder()
        builder.init_structure("backbone")
        builder.init_model(0)
        builder.init_chain(structure.chain_id or "A")
        builder.init_seg("    ")
        for i in range(structure.n_res):
            if not structure.res_mask[i]:
                continue
            builder.init_residue(RESIDUE_NAME, " ", int(structure.res_index[i]), " ")
            for k, name in enumerate(Constants.BACKBONE_ATOMS):
                builder.init_atom(
                    name,
                    structure.coords[i, k].astype("float32"),
                    0.0,
                    1.0,
                    " ",
                    _ATOM_FULLNAMES[k],
                    element=Constants.BACKBONE_ELEMENTS[k],
                )
        pdb_io = PDBIO()
        pdb_io.set_structure(builder.get_structure())
        handle = io.StringIO()
        pdb_io.save(handle)
        return handle.getvalue()
