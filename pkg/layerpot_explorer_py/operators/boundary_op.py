import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, GridMismatchError
from layerpot_explorer_py.export.csv_export import save_dataframe
from layerpot_explorer_py.geometry.grid import Density, density_values

logger = logging.getLogger(__name__)

OPERATOR_KINDS = ("V", "K", "Kprime", "W")
KINDS = OPERATOR_KINDS + tuple(f"cross-{k}" for k in OPERATOR_KINDS) + ("series", "composite")


def check_kind(kind):
    if kind not in OPERATOR_KINDS:
        raise ConfigurationError(f"Unknown operator kind '{kind}': expected one of {', '.join(OPERATOR_KINDS)}.")
    return kind


@dataclass(frozen=True)
class BoundaryOp:
    """
    Dense matrix from densities on a source Grid to values on a target Grid.

    Args:
        target (Grid): Grid of the rows.
        source (Grid): Grid of the columns.
        matrix (np.ndarray): Shape (target.N, source.N).
        kind (str): One of KINDS.
    """
    target: object
    source: object
    matrix: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"Unknown BoundaryOp kind '{self.kind}'.")
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (self.target.N, self.source.N):
            raise GridMismatchError(
                f"Matrix shape {matrix.shape} does not match grids ({self.target.N}, {self.source.N}).")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def apply(self, density):
        """Applies the operator to a Density (or node values) on the source grid."""
        return Density(self.target, self.matrix @ density_values(self.source, density))

    def norm_inf(self):
        """Induced infinity norm (max row sum)."""
        return float(np.max(np.sum(np.abs(self.matrix), axis=1)))

    def with_matrix(self, matrix, kind="composite"):
        return BoundaryOp(self.target, self.source, matrix, kind)

    def to_csv(self, csv_filepath):
        """Writes the matrix row-major with 17 significant digits."""
        return save_dataframe(pd.DataFrame(self.matrix), csv_filepath, f"{self.kind} operator", header=False)


@dataclass(frozen=True)
class BlockOp:
    """
    2x2 array of BoundaryOp, rows and columns indexed by a pair of grids.

    Raises:
        GridMismatchError: If blocks in a row (column) do not share their target (source) grid.
    """
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(row) for row in self.blocks)
        if len(blocks) != 2 or any(len(row) != 2 for row in blocks):
            raise GridMismatchError("A BlockOp needs exactly 2x2 blocks.")
        for r in range(2):
            if not blocks[r][0].target.matches(blocks[r][1].target):
                raise GridMismatchError(f"Blocks in row {r} have different target grids.")
        for c in range(2):
            if not blocks[0][c].source.matches(blocks[1][c].source):
                raise GridMismatchError(f"Blocks in column {c} have different source grids.")
        object.__setattr__(self, "blocks", blocks)

    def block(self, r, c):
        return self.blocks[r][c]

    def to_matrix(self):
        return np.block([[b.matrix for b in row] for row in self.blocks])

    @property
    def sizes(self):
        return self.blocks[0][0].source.N, self.blocks[0][1].source.N

    def apply(self, first, second):
        """Applies the block operator to a pair of densities, returning a pair of Densities."""
        values = np.concatenate([density_values(self.blocks[0][0].source, first),
                                 density_values(self.blocks[0][1].source, second)])
        result = self.to_matrix() @ values
        n0 = self.blocks[0][0].target.N
        return (Density(self.blocks[0][0].target, result[:n0]),
                Density(self.blocks[1][0].target, result[n0:]))

    def norm_inf(self):
        return float(np.max(np.sum(np.abs(self.to_matrix()), axis=1)))
