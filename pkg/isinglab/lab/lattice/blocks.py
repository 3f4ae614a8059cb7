"""Grid and block decomposition of a torus.

The grid is the union of the coordinate slabs ``x_j ≡ 0 (mod s)`` with spacing
``s = ⌊ℓ⌋ − 1``; what remains splits into cubic blocks of side ``s − 1``,
pairwise separated by the grid. When ``s`` does not divide every side of the
torus, ``ℓ`` is shrunk to the largest admissible value.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ...errors import GeometryError
from .geometry import Geometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    geometry: Geometry
    ell: float
    ell_used: int
    spacing: int
    grid: np.ndarray = field(repr=False)
    blocks: Tuple[np.ndarray, ...] = field(repr=False)
    centers: np.ndarray = field(repr=False)
    block_of: np.ndarray = field(repr=False)

    @property
    def block_side(self) -> int:
        return self.spacing - 1

    @property
    def q(self) -> int:
        return len(self.blocks)

    @property
    def adjusted(self) -> bool:
        return self.ell_used != math.floor(self.ell)

    def grid_mask(self) -> int:
        """Bit mask of grid sites in the configuration encoding."""
        mask = 0
        for site in self.grid:
            mask |= 1 << int(site)
        return mask

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "ell": self.ell,
            "ell_used": self.ell_used,
            "block_side": self.block_side,
            "q": self.q,
            "grid_size": len(self.grid),
        }


def admissible_spacing(shape: Tuple[int, ...], ell: float) -> int:
    top = math.floor(ell)
    if top < 3:
        raise GeometryError(f"no admissible block side: floor(ell) = {top} < 3")
    for s in range(top - 1, 1, -1):
        if all(side % s == 0 for side in shape):
            return s
    raise GeometryError(f"no admissible block side for torus sides {shape} and ell = {ell}")


def build_block_grid(geom: Geometry, ell: float) -> BlockDecomposition:
    """Split a torus into grid ∂Λ_ℓ and blocks Λ^1..Λ^q.

    Raises:
        GeometryError: If ``geom`` is not a torus or no spacing fits.
    """
    if not geom.is_torus:
        raise GeometryError("block grids are built on tori only")
    s = admissible_spacing(geom.shape, ell)
    if s != math.floor(ell) - 1:
        logger.info(f"Block grid on {geom.label()}: ell {ell} shrunk to {s + 1}")

    local = geom.coords - geom.offset
    on_grid = (local % s == 0).any(axis=1)
    grid = np.flatnonzero(on_grid)

    keys = local // s
    key_shape = tuple(side // s for side in geom.shape)
    block_id = np.ravel_multi_index(tuple(keys.T), key_shape)
    block_of = np.where(on_grid, -1, block_id).astype(np.int64)
    q = int(np.prod(key_shape))
    blocks = tuple(np.flatnonzero(block_of == j) for j in range(q))
    centers = np.array(list(np.ndindex(*key_shape)), dtype=float).reshape(q, -1) * s + s / 2

    for arr in (grid, block_of, centers):
        arr.setflags(write=False)
    return BlockDecomposition(
        geometry=geom,
        ell=float(ell),
        ell_used=s + 1,
        spacing=s,
        grid=grid,
        blocks=blocks,
        centers=centers,
        block_of=block_of,
    )
