"""Tri-state binary matrix with labeled rows and columns.

Cells are one of {one, zero, unknown}. "one" is an observed link, "zero"
an observed absence, and "unknown" means there is not enough evidence to
call the cell either way. Unknown cells are excluded from every fitting
and scoring computation in the package; operations that need at least
one observed cell enforce that themselves, so fully-unknown instances
are representable (fitting them is a data error, not a type error).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError

UNKNOWN = -1
ZERO = 0
ONE = 1


@dataclass(frozen=True)
class MaskedBinaryMatrix:
    """Labeled matrix over {one, zero, unknown}.

    ``cells`` is an int8 array holding ONE, ZERO, or UNKNOWN. Instances
    are immutable; masking operations return modified copies.
    """

    cells: np.ndarray
    row_labels: tuple = field(default=())
    col_labels: tuple = field(default=())

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int8)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ArgumentError("cells must be a 2-D matrix with at least one row and column")
        if not np.isin(cells, (UNKNOWN, ZERO, ONE)).all():
            raise ArgumentError("cells must contain only -1 (unknown), 0, or 1")
        object.__setattr__(self, "cells", cells)
        row_labels = tuple(self.row_labels) or tuple(f"r{i}" for i in range(cells.shape[0]))
        col_labels = tuple(self.col_labels) or tuple(f"c{j}" for j in range(cells.shape[1]))
        if len(row_labels) != cells.shape[0] or len(col_labels) != cells.shape[1]:
            raise ArgumentError("label list lengths must match the matrix shape")
        if len(set(row_labels)) != len(row_labels) or len(set(col_labels)) != len(col_labels):
            raise ArgumentError("row and column labels must be unique")
        object.__setattr__(self, "row_labels", row_labels)
        object.__setattr__(self, "col_labels", col_labels)

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple:
        return self.cells.shape

    def known_mask(self) -> np.ndarray:
        """Boolean mask of observed (non-unknown) cells."""
        return self.cells != UNKNOWN

    def values_filled(self, fill: float = 0.0) -> np.ndarray:
        """Float matrix with ones/zeros as-is and unknown cells imputed."""
        out = self.cells.astype(np.float64)
        out[self.cells == UNKNOWN] = fill
        return out

    def row_index(self, label) -> int:
        try:
            return self.row_labels.index(label)
        except ValueError:
            raise ArgumentError(f"unknown row label {label!r}") from None

    def col_index(self, label) -> int:
        try:
            return self.col_labels.index(label)
        except ValueError:
            raise ArgumentError(f"unknown column label {label!r}") from None

    def with_cells(self, cells: np.ndarray) -> "MaskedBinaryMatrix":
        """Copy of this matrix with replaced cell contents, same labels."""
        return MaskedBinaryMatrix(cells, self.row_labels, self.col_labels)

    def equal_cells(self, other: "MaskedBinaryMatrix") -> bool:
        return (
            self.shape == other.shape
            and bool(np.array_equal(self.cells, other.cells))
            and self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
        )
