"""도메인 엔티티 모듈."""
from domain.entities.backbone_structure import (  # noqa: F401
    ATOM_C,
    ATOM_CA,
    ATOM_N,
    ATOM_O,
    BackboneStructure,
    RigidTransform,
)
