"""원자 단위 attention: 국소 마스크, atom transformer, all-atom 인코더/디코더.

원자 인덱스 a = 4·i + k (i 잔기, k ∈ {N, CA, C, O}).
"""
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from einops import rearrange, repeat
from torch import Tensor, nn

from app.settings.constants import Constants
from common.errors import ShapeMismatch
from modeling.dit_core import DiTConfig, DiTStack
from modeling.featurization import REF_ATOM_FEATURE_DIM, ReferenceFeatures


@dataclass(frozen=True)
class LocalWindow:
    """국소 attention 창 크기."""

    n_queries: int = Constants.ATOM_QUERIES
    n_keys: int = Constants.ATOM_KEYS


def local_attention_mask(n_atoms: int, window: LocalWindow = LocalWindow()) -> Tensor:
    """(n_atoms, n_atoms) 가산 bias: 허용 0, 차단 -1e10.

    중심 c_k = n_queries/2 - 0.5 + k·n_queries 에 대해
    |l - c| < n_queries/2 이고 |m - c| < n_keys/2 인 c가 있으면 허용.
    """
    n_centres = max(1, -(-n_atoms // window.n_queries))
    centres = torch.arange(n_centres, dtype=torch.float64) * window.n_queries + window.n_queries / 2 - 0.5
    index = torch.arange(n_atoms, dtype=torch.float64)
    offset = (index[:, None] - centres[None, :]).abs()
    in_query = (offset < window.n_queries / 2).double()
    in_key = (offset < window.n_keys / 2).double()
    allowed = (in_query @ in_key.T) > 0
    return torch.zeros(n_atoms, n_atoms).masked_fill(~allowed, Constants.MASK_BIAS)


def residue_to_atom_mask(mask: Tensor) -> Tensor:
    """(B, N) 잔기 마스크 → (B, 4N) 원자 마스크."""
    return repeat(mask, "b n -> b (n k)", k=Constants.ATOMS_PER_RESIDUE)


@dataclass
class AtomRepresentation:
    """원자 표현 (skip 연결용)."""

    q: Tensor
    """(B, A, c_atom) 원자 토큰."""
    c: Tensor
    """(B, A, c_atom) 원자 조건."""
    p: Tensor
    """(B, A, A, c_atompair) 원자 pair."""


class AtomTransformer(nn.Module):
    """국소 마스크를 쓰는 DiT 스택 (register 없음, RoPE 위치 = 원자 인덱스)."""

    def __init__(
        self,
        c_atom: int,
        c_atompair: int,
        n_layers: int = Constants.ATOM_LAYERS,
        n_heads: int = Constants.ATOM_HEADS,
        window: LocalWindow = LocalWindow(),
    ) -> None:
        super().__init__()
        self.window = window
        self.stack = DiTStack(DiTConfig(
            n_layers=n_layers,
            token_dim=c_atom,
            n_heads=n_heads,
            c_cond=c_atom,
            c_pair=c_atompair,
            n_registers=0,
            use_pair_bias=True,
        ))

    def forward(self, rep: AtomRepresentation, atom_mask: Tensor) -> Tensor:
        n_atoms = rep.q.shape[1]
        beta = local_attention_mask(n_atoms, self.window).to(rep.q.device)[None]
        return self.stack(rep.q, rep.c, p=rep.p, beta=beta, mask=atom_mask)


class _PairMLP(nn.Module):
    """p += MLP(p): 2층 ReLU, bias 없음."""

    def __init__(self, dim: int) -> None:
        super().__init__()
        self.net = nn.Sequential(
            nn.ReLU(),
            nn.Linear(dim, dim, bias=False),
            nn.ReLU(),
            nn.Linear(dim, dim, bias=False),
        )

    def forward(self, p: Tensor) -> Tensor:
        return p + self.net(p)


class AllAtomEncoder(nn.Module):
    """원자 좌표 + 참조 특징 → 잔기 토큰 s, 원자 skip 표현."""

    def __init__(
        self,
        c_atom: int,
        c_atompair: int,
        c_token: int,
        c_cond: int,
        c_pair: int,
        n_layers: int = Constants.ATOM_LAYERS,
        n_heads: int = Constants.ATOM_HEADS,
        window: LocalWindow = LocalWindow(),
    ) -> None:
        super().__init__()
        self.ref_proj = nn.Linear(REF_ATOM_FEATURE_DIM, c_atom, bias=False)
        self.offset_proj = nn.Linear(3, c_atompair, bias=False)
        self.inv_dist_proj = nn.Linear(1, c_atompair, bias=False)
        self.valid_proj = nn.Linear(1, c_atompair, bias=False)
        self.cond_norm = nn.LayerNorm(c_cond)
        self.cond_proj = nn.Linear(c_cond, c_atom, bias=False)
        self.pair_norm = nn.LayerNorm(c_pair)
        self.pair_proj = nn.Linear(c_pair, c_atompair, bias=False)
        self.coord_proj = nn.Linear(3, c_atom, bias=False)
        self.row_proj = nn.Linear(c_atom, c_atompair, bias=False)
        self.col_proj = nn.Linear(c_atom, c_atompair, bias=False)
        self.pair_mlp = _PairMLP(c_atompair)
        self.transformer = AtomTransformer(c_atom, c_atompair, n_layers, n_heads, window)
        self.to_token = nn.Linear(c_atom, c_token, bias=False)

    def seed_atoms(
        self,
        x: Tensor,
        ref: ReferenceFeatures,
        c_tok: Tensor,
        p_tok: Tensor,
    ) -> AtomRepresentation:
        """transformer 이전의 원자 표현 (q, c, p) 초기화.

        Args:
            x: (B, N, 4, 3) 좌표.
            ref: 참조 특징 (n_res = N).
            c_tok: (B, N, c_cond) 잔기 조건.
            p_tok: (B, N, N, c_pair) 잔기 pair.
        """
        batch, n_res = x.shape[:2]
        if ref.n_res != n_res:
            raise ShapeMismatch(f"reference features cover {ref.n_res} residues, coords {n_res}")
        dtype = x.dtype
        feats = ref.atom_features().to(dtype)
        c = repeat(self.ref_proj(feats), "a d -> b a d", b=batch)

        offsets = (ref.ref_pos[:, None, :] - ref.ref_pos[None, :, :]).to(dtype)
        same_space = (ref.ref_space_uid[:, None] == ref.ref_space_uid[None, :]).to(dtype)[..., None]
        inv_dist = 1.0 / (1.0 + (offsets**2).sum(-1, keepdim=True))
        p = self.offset_proj(offsets) * same_space
        p = p + self.inv_dist_proj(inv_dist) * same_space
        p = p + self.valid_proj(same_space) * same_space
        p = repeat(p, "l m d -> b l m d", b=batch)

        tok = ref.tok_idx
        c = c + self.cond_proj(self.cond_norm(c_tok))[:, tok]
        q = c
        p = p + self.pair_proj(self.pair_norm(p_tok))[:, tok][:, :, tok]
        q = q + self.coord_proj(rearrange(x, "b n k xyz -> b (n k) xyz"))
        p = p + self.row_proj(F.relu(c))[:, :, None] + self.col_proj(F.relu(c))[:, None, :]
        p = self.pair_mlp(p)
        return AtomRepresentation(q=q, c=c, p=p)

    def forward(
        self,
        x: Tensor,
        ref: ReferenceFeatures,
        c_tok: Tensor,
        p_tok: Tensor,
        mask: Tensor,
    ) -> tuple[Tensor, AtomRepresentation]:
        """인코딩.

        Returns:
            (s (B, N, c_token), skip). s_i는 원자 4i..4i+3 의 평균 풀링.
        """
        rep = self.seed_atoms(x, ref, c_tok, p_tok)
        q = self.transformer(rep, residue_to_atom_mask(mask))
        skip = AtomRepresentation(q=q, c=rep.c, p=rep.p)
        s = rearrange(F.relu(self.to_token(q)), "b (n k) d -> b n k d", k=Constants.ATOMS_PER_RESIDUE)
        return s.mean(dim=2), skip


class AllAtomDecoder(nn.Module):
    """잔기 토큰 + skip 표현 → 원자별 속도 (B, N, 4, 3)."""

    def __init__(
        self,
        c_atom: int,
        c_atompair: int,
        c_token: int,
        n_layers: int = Constants.ATOM_LAYERS,
        n_heads: int = Constants.ATOM_HEADS,
        window: LocalWindow = LocalWindow(),
    ) -> None:
        super().__init__()
        self.from_token = nn.Linear(c_token, c_atom, bias=False)
        self.transformer = AtomTransformer(c_atom, c_atompair, n_layers, n_heads, window)
        self.out_norm = nn.LayerNorm(c_atom)
        self.to_velocity = nn.Linear(c_atom, 3, bias=False)

    def forward(self, s: Tensor, skip: AtomRepresentation, mask: Tensor) -> Tensor:
        tok_q = repeat(self.from_token(s), "b n d -> b (n k) d", k=Constants.ATOMS_PER_RESIDUE)
        rep = AtomRepresentation(q=tok_q + skip.q, c=skip.c, p=skip.p)
        q = self.transformer(rep, residue_to_atom_mask(mask))
        v = self.to_velocity(self.out_norm(q))
        v = rearrange(v, "b (n k) xyz -> b n k xyz", k=Constants.ATOMS_PER_RESIDUE)
        return v * mask[:, :, None, None].to(v.dtype)


def atom_encoder(
    x: Tensor,
    ref: ReferenceFeatures,
    c_tok: Tensor,
    p_tok: Tensor,
    mask: Tensor,
    module: AllAtomEncoder,
) -> tuple[Tensor, AtomRepresentation]:
    """함수형 진입점."""
    return module(x, ref, c_tok, p_tok, mask)


def atom_decoder(
    s_final: Tensor,
    skip: AtomRepresentation,
    mask: Tensor,
    module: AllAtomDecoder,
) -> Tensor:
    """함수형 진입점. 무효 잔기의 속도는 0."""
    return module(s_final, skip, mask)
