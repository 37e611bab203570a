"""
Episode domain models: one (support, query) model input and its attention mask.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.preprocessing import ProcessedMatrix


@dataclass(frozen=True, eq=False)
class Episode:
    """
    Support rows with labels plus query rows.

    `y_query` is present while training and None at pure inference.
    `n_classes` is the number of dense class indices (classification only).
    """
    x_support: ProcessedMatrix
    y_support: np.ndarray
    x_query: ProcessedMatrix
    task: TaskKind
    y_query: Optional[np.ndarray] = None
    n_classes: Optional[int] = None

    def __post_init__(self):
        if self.x_support.n_rows < 1 or self.x_query.n_rows < 1:
            raise ValueError("Episodes need at least one support and one query row")
        if self.x_support.width != self.x_query.width:
            raise ValueError(
                f"Support width {self.x_support.width} != query width {self.x_query.width}"
            )
        if self.y_support.shape != (self.x_support.n_rows,):
            raise ValueError("y_support must have one entry per support row")
        if self.y_query is not None and self.y_query.shape != (self.x_query.n_rows,):
            raise ValueError("y_query must have one entry per query row")
        if self.task == TaskKind.CLASSIFICATION and self.n_classes is None:
            raise ValueError("Classification episodes need n_classes")

    @property
    def n_support(self) -> int:
        return self.x_support.n_rows

    @property
    def n_query(self) -> int:
        return self.x_query.n_rows

    @property
    def width(self) -> int:
        return self.x_support.width

    def without_labels(self) -> "Episode":
        return Episode(
            x_support=self.x_support,
            y_support=self.y_support,
            x_query=self.x_query,
            task=self.task,
            n_classes=self.n_classes,
        )


@dataclass(frozen=True, eq=False)
class AttentionMask:
    """
    allowed[i, j] is True when token i may attend token j.
    Support tokens come first (n_support of them), then query tokens.
    """
    allowed: np.ndarray
    n_support: int
    n_query: int
