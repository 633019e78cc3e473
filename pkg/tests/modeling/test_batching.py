"""배치 패딩 테스트."""
import numpy as np
import torch

from domain.entities.backbone_structure import BackboneStructure
from domain.services.synthetic import synth_helix
from domain.value_objects.latent_representation import LatentRepresentation
from modeling.batching import collate_latents, collate_structures, padded_length


class TestCollate:
    """collate 테스트."""

    def test_padded_length(self) -> None:
        assert padded_length(10, 4) == 12
        assert padded_length(8, 4) == 8
        assert padded_length(7, 1) == 7

    def test_structures_padded_to_multiple(self) -> None:
        batch = collate_structures([synth_helix(5), synth_helix(7)], multiple_of=4)
        assert batch.x.shape == (2, 8, 4, 3)
        assert batch.mask.sum(dim=1).tolist() == [5, 7]
        assert torch.all(batch.x[0, 5:] == 0)
        assert batch.n_res == [5, 7]

    def test_latents_padded(self) -> None:
        latents = [
            LatentRepresentation(z=np.ones((2, 3)), n_res=4),
            LatentRepresentation(z=np.ones((3, 3)), n_res=6),
        ]
        batch = collate_latents(latents)
        assert batch.z.shape == (2, 3, 3)
        assert batch.mask.tolist() == [[True, True, False], [True, True, True]]
        assert batch.n_res == [4, 6]

    def test_residue_numbers_padded(self) -> None:
        """실제 번호를 유지하고 패딩 위치는 마지막 번호 뒤로 이어진다."""
        helix = synth_helix(5)
        numbered = BackboneStructure(helix.coords, np.array([3, 4, 5, 9, 10]), helix.res_mask)
        batch = collate_structures([numbered, synth_helix(7)], multiple_of=4)
        assert batch.res_index.dtype == torch.int64
        assert batch.res_index[0].tolist() == [3, 4, 5, 9, 10, 11, 12, 13]
        assert batch.res_index[1].tolist() == [1, 2, 3, 4, 5, 6, 7, 8]
