from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ...errors import GeometryError
from .geometry import Geometry


@dataclass(frozen=True)
class ShellFamily:
    """Faces λ_i = {x : max_j |x_j| = i} of a centred cube, i = 0..L."""

    L: int
    dimension: int
    shells: Tuple[np.ndarray, ...]

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.shells)


def shell_size(d: int, i: int) -> int:
    if i == 0:
        return 1
    return (2 * i + 1) ** d - (2 * i - 1) ** d


def shells(geom: Geometry) -> ShellFamily:
    if geom.is_torus or geom.L is None:
        raise GeometryError("shells are defined on centred cubes Λ_L only")
    radius = np.abs(geom.coords).max(axis=1)
    parts = tuple(np.flatnonzero(radius == i) for i in range(geom.L + 1))
    return ShellFamily(L=geom.L, dimension=geom.dimension, shells=parts)
