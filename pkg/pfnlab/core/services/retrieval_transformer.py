"""
Retrieval transformer.

Each observation is one token: support token i = W_x x_i + w_y y_i, query
token i = W_x x_i. Tokens pass through pre-norm masked self-attention blocks
in which query tokens see the support set and themselves only; the head reads
the query tokens.
"""
import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.episode import AttentionMask, Episode
from pfnlab.core.models.errors import (
    DimensionMismatchError,
    NonFiniteActivationError,
    NonFiniteGradientError,
)
from pfnlab.core.models.transformer import ModelConfig

logger = logging.getLogger(__name__)

TORCH_DTYPES = {"float32": torch.float32, "float64": torch.float64}
HEAD_PREFIX = "head."


def build_mask(n_support: int, n_query: int, query_attends_self: bool = True) -> AttentionMask:
    """
    Attention pattern for one episode.

    Support tokens attend every support token, query tokens attend every
    support token (and themselves when `query_attends_self`), nothing attends
    a query token from outside.
    """
    if n_support < 1 or n_query < 1:
        raise ValueError("build_mask needs at least one support and one query token")
    size = n_support + n_query
    allowed = np.zeros((size, size), dtype=bool)
    allowed[:, :n_support] = True
    if query_attends_self:
        query = np.arange(n_support, size)
        allowed[query, query] = True
    return AttentionMask(allowed=allowed, n_support=n_support, n_query=n_query)


class MaskedMultiHeadAttention(nn.Module):
    def __init__(self, hidden_dim: int, n_heads: int):
        super().__init__()
        self.n_heads = n_heads
        self.head_dim = hidden_dim // n_heads
        self.qkv = nn.Linear(hidden_dim, 3 * hidden_dim)
        self.out = nn.Linear(hidden_dim, hidden_dim)

    def forward(self, tokens: torch.Tensor, allowed: torch.Tensor) -> torch.Tensor:
        n_tokens, hidden_dim = tokens.shape
        qkv = self.qkv(tokens).view(n_tokens, 3, self.n_heads, self.head_dim).permute(1, 2, 0, 3)
        query, key, value = qkv[0], qkv[1], qkv[2]

        scores = query @ key.transpose(-1, -2) / math.sqrt(self.head_dim)
        scores = scores.masked_fill(~allowed, float("-inf"))
        weights = torch.softmax(scores, dim=-1)

        context = (weights @ value).transpose(0, 1).reshape(n_tokens, hidden_dim)
        return self.out(context)


class TransformerBlock(nn.Module):
    """Pre-norm residual block: attention then GELU feedforward."""

    def __init__(self, hidden_dim: int, n_heads: int, feedforward_dim: int):
        super().__init__()
        self.attention_norm = nn.LayerNorm(hidden_dim)
        self.attention = MaskedMultiHeadAttention(hidden_dim, n_heads)
        self.feedforward_norm = nn.LayerNorm(hidden_dim)
        self.feedforward = nn.Sequential(
            nn.Linear(hidden_dim, feedforward_dim),
            nn.GELU(),
            nn.Linear(feedforward_dim, hidden_dim),
        )

    def forward(self, tokens: torch.Tensor, allowed: torch.Tensor) -> torch.Tensor:
        tokens = tokens + self.attention(self.attention_norm(tokens), allowed)
        return tokens + self.feedforward(self.feedforward_norm(tokens))


class RetrievalTransformer(nn.Module):
    """
    The retrieval transformer and its task head.

    Args:
        config: Model shape and task
        seed: Seed of the parameter initialization
    """

    def __init__(self, config: ModelConfig, seed: int = 0):
        super().__init__()
        self.config = config
        self.feature_encoder = nn.Linear(config.max_features, config.hidden_dim, bias=False)
        self.label_encoder = nn.Linear(1, config.hidden_dim, bias=False)
        self.blocks = nn.ModuleList(
            TransformerBlock(config.hidden_dim, config.n_heads, config.feedforward_dim)
            for _ in range(config.n_layers)
        )
        self.final_norm = nn.LayerNorm(config.hidden_dim)
        self.head = nn.Linear(config.hidden_dim, config.output_dim)
        self.to(self.dtype)
        self.reset_parameters(seed)

    @property
    def dtype(self) -> torch.dtype:
        return TORCH_DTYPES[self.config.dtype]

    @torch.no_grad()
    def reset_parameters(self, seed: int = 0) -> None:
        """
        Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero, layer norms
        identity, head zero.
        """
        generator = torch.Generator().manual_seed(seed)
        for name, parameter in self.named_parameters():
            if name.startswith(HEAD_PREFIX):
                parameter.zero_()
            elif "norm" in name:
                parameter.fill_(1.0 if name.endswith("weight") else 0.0)
            elif name.endswith("bias"):
                parameter.zero_()
            else:
                bound = 1.0 / math.sqrt(parameter.shape[1])
                sample = torch.rand(parameter.shape, generator=generator, dtype=torch.float64)
                parameter.copy_((sample * 2.0 - 1.0) * bound)

    def reset_head(self) -> None:
        with torch.no_grad():
            self.head.weight.zero_()
            self.head.bias.zero_()

    def embed_tokens(self, episode: Episode) -> torch.Tensor:
        """
        Token matrix (n_s + n_q) x d, support tokens first.

        Raises:
            DimensionMismatchError: If the episode width differs from max_features
        """
        if episode.width != self.config.max_features:
            raise DimensionMismatchError(
                f"Episode width {episode.width} does not match max_features {self.config.max_features}",
                expected=self.config.max_features,
                found=episode.width,
            )
        support = torch.as_tensor(episode.x_support.values, dtype=self.dtype)
        query = torch.as_tensor(episode.x_query.values, dtype=self.dtype)
        labels = torch.as_tensor(episode.y_support, dtype=self.dtype).unsqueeze(1)

        support_tokens = self.feature_encoder(support) + self.label_encoder(labels)
        query_tokens = self.feature_encoder(query)
        return torch.cat([support_tokens, query_tokens], dim=0)

    def forward(self, episode: Episode) -> torch.Tensor:
        """
        Query outputs: n_q x max_classes logits, or n_q x 1 regression values.

        Raises:
            NonFiniteActivationError: With the index of the offending layer
                (0 is the embedding)
        """
        tokens = self.embed_tokens(episode)
        self._check_finite(tokens, 0)
        mask = build_mask(episode.n_support, episode.n_query, self.config.query_attends_self)
        allowed = torch.as_tensor(mask.allowed)
        for layer, block in enumerate(self.blocks, start=1):
            tokens = block(tokens, allowed)
            self._check_finite(tokens, layer)
        return self.head(self.final_norm(tokens[episode.n_support:]))

    @staticmethod
    def _check_finite(tokens: torch.Tensor, layer: int) -> None:
        if not torch.isfinite(tokens).all():
            raise NonFiniteActivationError(layer)

    def parameter_shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: tuple(parameter.shape) for name, parameter in self.named_parameters()}


def episode_loss(model: RetrievalTransformer, outputs: torch.Tensor, episode: Episode) -> torch.Tensor:
    """
    Mean query loss: cross-entropy over the episode's K classes, or squared
    error against quantile-rank targets.
    """
    if episode.y_query is None:
        raise ValueError("Loss needs query labels")
    if outputs.shape[0] != episode.n_query:
        raise DimensionMismatchError(
            f"{outputs.shape[0]} outputs for {episode.n_query} query targets"
        )
    targets = torch.as_tensor(episode.y_query, dtype=model.dtype)
    if episode.task == TaskKind.CLASSIFICATION:
        return F.cross_entropy(outputs[:, :episode.n_classes], targets.long())
    return F.mse_loss(outputs[:, 0], targets)


def compute_gradients(
    model: RetrievalTransformer,
    episode: Episode,
) -> Tuple[float, Dict[str, torch.Tensor]]:
    """
    Loss and exact gradients of the loss with respect to every parameter.

    Returns:
        (loss value, gradients keyed by parameter name)

    Raises:
        NonFiniteGradientError: Naming the first parameter with a non-finite gradient
    """
    names, parameters = zip(*model.named_parameters())
    loss = episode_loss(model, model(episode), episode)
    gradients = torch.autograd.grad(loss, parameters)
    grads = dict(zip(names, gradients))
    for name, gradient in grads.items():
        if not torch.isfinite(gradient).all():
            raise NonFiniteGradientError(name)
    return float(loss.detach()), grads


def softmax_probabilities(
    logits: torch.Tensor,
    n_classes: int,
    present_classes: Optional[Sequence[int]] = None,
) -> torch.Tensor:
    """Softmax over the first `n_classes` logits; absent classes get probability 0."""
    logits = logits[:, :n_classes]
    if present_classes is not None:
        keep = torch.zeros(n_classes, dtype=torch.bool)
        keep[list(present_classes)] = True
        logits = logits.masked_fill(~keep, float("-inf"))
    return torch.softmax(logits, dim=-1)


@torch.no_grad()
def predict_proba(
    model: RetrievalTransformer,
    episode: Episode,
    present_classes: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Row-stochastic n_q x K class probabilities."""
    if episode.task != TaskKind.CLASSIFICATION:
        raise ValueError("predict_proba needs a classification episode")
    return softmax_probabilities(model(episode), episode.n_classes, present_classes).numpy()


@torch.no_grad()
def predict_values(model: RetrievalTransformer, episode: Episode) -> np.ndarray:
    """Regression outputs in quantile-rank space."""
    return model(episode)[:, 0].numpy()


def transfer_body(model: RetrievalTransformer, state: Dict[str, torch.Tensor]) -> None:
    """
    Load every non-head tensor from a state dict; the head is reset to zero.
    Used to fine-tune a classification checkpoint on a regression task.
    """
    body = {name: tensor for name, tensor in state.items() if not name.startswith(HEAD_PREFIX)}
    missing, unexpected = model.load_state_dict(body, strict=False)
    if unexpected or [name for name in missing if not name.startswith(HEAD_PREFIX)]:
        raise DimensionMismatchError(
            f"Body transfer failed: missing {missing}, unexpected {unexpected}"
        )
    model.reset_head()
    logger.info("Transferred model body; head reinitialized")
