"""값 객체."""
from domain.value_objects.latent_representation import LatentRepresentation  # noqa: F401
from domain.value_objects.validity_report import ValidityReport  # noqa: F401
