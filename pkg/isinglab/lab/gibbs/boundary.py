from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ...errors import BoundaryConditionError
from ..lattice import Geometry

TAGS = ("plus", "minus", "free", "periodic", "fixed")


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary spins ω on ∂Λ, or none (free) or wrap-around (periodic).

    ``values`` is only set for ``fixed`` and lists ω in the order of
    ``Geometry.boundary_coords``.
    """

    tag: str
    values: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise BoundaryConditionError(f"unknown boundary condition '{self.tag}'")
        if self.tag == "fixed":
            if self.values is None:
                raise BoundaryConditionError("fixed boundary condition needs values")
            if any(v not in (-1, 1) for v in self.values):
                raise BoundaryConditionError("fixed boundary values must be +1 or -1")
        elif self.values is not None:
            raise BoundaryConditionError(f"'{self.tag}' takes no boundary values")

    @classmethod
    def fixed(cls, values: Sequence[int]) -> "BoundaryCondition":
        return cls("fixed", tuple(int(v) for v in values))

    @classmethod
    def parse(cls, tag: str) -> "BoundaryCondition":
        return cls(tag.strip().lower())

    def check(self, geom: Geometry):
        """Raise if this condition cannot be paired with ``geom``."""
        if geom.is_torus != (self.tag == "periodic"):
            raise BoundaryConditionError(
                f"'{self.tag}' boundary condition on a {geom.kind}: "
                "tori take 'periodic', cubes and boxes take plus/minus/free/fixed"
            )
        if self.tag == "fixed" and len(self.values or ()) != geom.n_boundary:
            raise BoundaryConditionError(
                f"fixed boundary needs {geom.n_boundary} values, got {len(self.values or ())}"
            )

    def boundary_values(self, geom: Geometry) -> np.ndarray:
        """ω as an int8 array over ∂Λ (zeros when there is no frozen boundary)."""
        self.check(geom)
        if self.tag == "plus":
            return np.ones(geom.n_boundary, dtype=np.int8)
        if self.tag == "minus":
            return -np.ones(geom.n_boundary, dtype=np.int8)
        if self.tag == "fixed":
            return np.asarray(self.values, dtype=np.int8)
        return np.zeros(geom.n_boundary, dtype=np.int8)

    def field(self, geom: Geometry) -> np.ndarray:
        """Per-site boundary field Σ_{b∼x, b∈∂Λ} ω_b."""
        omega = self.boundary_values(geom).astype(np.int64)
        out = np.zeros(geom.n_sites, dtype=np.int64)
        bonds = geom.boundary_bonds
        if len(bonds):
            np.add.at(out, bonds[:, 0], omega[bonds[:, 1]])
        return out

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"tag": self.tag}
        if self.values is not None:
            payload["values"] = list(self.values)
        return payload

    def label(self) -> str:
        return self.tag


def default_boundary(geom: Geometry) -> BoundaryCondition:
    return BoundaryCondition("periodic" if geom.is_torus else "free")
