"""Finite nearest-neighbour geometries: cubes, rectangular boxes and tori.

Sites are indexed lexicographically by coordinate (last axis fastest), the
order produced by ``numpy.ndindex``. Cubes Λ_L are centred, with coordinates
in ⟦−L, L⟧^d; boxes and tori start at the origin. Neighbour lists are stored
as an ``(n, 2d)`` int32 array padded with ``-1`` so that numba kernels can walk
them without Python objects.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from ...errors import CapacityError, GeometryError
from ..constants import MAX_SITES

logger = logging.getLogger(__name__)

KINDS = ("cube", "torus")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Geometry:
    """Immutable finite graph with optional frozen outer boundary.

    Attributes:
        dimension: Lattice dimension d.
        kind: ``"cube"`` (free outer boundary ∂Λ available) or ``"torus"``.
        shape: Side length per axis.
        L: Side parameter for Λ_L / 𝕋_L, ``None`` for rectangular boxes.
        offset: Coordinate of site 0 along every axis.
        coords: ``(n, d)`` site coordinates.
        neighbors: ``(n, 2d)`` neighbour indices, padded with -1.
        boundary_coords: ``(|∂Λ|, d)`` coordinates of the outer boundary.
        boundary_neighbors: ``(n, 2d)`` indices into ``boundary_coords``, padded with -1.
        edges: ``(m, 2)`` bonds ``i < j`` inside the graph.
    """

    dimension: int
    kind: str
    shape: Tuple[int, ...]
    L: Optional[int]
    offset: int
    coords: np.ndarray = field(repr=False)
    neighbors: np.ndarray = field(repr=False)
    boundary_coords: np.ndarray = field(repr=False)
    boundary_neighbors: np.ndarray = field(repr=False)
    edges: np.ndarray = field(repr=False)

    @property
    def n_sites(self) -> int:
        return int(self.coords.shape[0])

    @property
    def n_boundary(self) -> int:
        return int(self.boundary_coords.shape[0])

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    @property
    def degree(self) -> np.ndarray:
        """Number of distinct neighbours inside the graph."""
        return (self.neighbors >= 0).sum(axis=1)

    @property
    def boundary_degree(self) -> np.ndarray:
        return (self.boundary_neighbors >= 0).sum(axis=1)

    @property
    def boundary_bonds(self) -> np.ndarray:
        """``(k, 2)`` pairs (site, boundary index) for every bond crossing ∂Λ."""
        site, slot = np.nonzero(self.boundary_neighbors >= 0)
        return np.stack([site, self.boundary_neighbors[site, slot]], axis=1)

    @property
    def origin(self) -> int:
        """Index of the site at the coordinate origin (the centre of Λ_L)."""
        return self.index_of([0] * self.dimension)

    def index_of(self, coord: Sequence[int]) -> int:
        local = np.asarray(coord, dtype=np.int64) - self.offset
        if self.is_torus:
            local = np.mod(local, self.shape)
        elif np.any(local < 0) or np.any(local >= np.asarray(self.shape)):
            raise GeometryError(f"coordinate {tuple(coord)} lies outside the box")
        return int(np.ravel_multi_index(tuple(local), self.shape))

    def translation(self, k: Sequence[int]) -> np.ndarray:
        """Permutation ``perm`` with ``perm[i]`` = index of ``coords[i] + k`` (torus only)."""
        if not self.is_torus:
            raise GeometryError("translations are defined on tori only")
        shifted = np.mod(self.coords - self.offset + np.asarray(k, dtype=np.int64), self.shape)
        return np.ravel_multi_index(tuple(shifted.T), self.shape).astype(np.int64)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "kind": self.kind,
            "L": self.L,
            "shape": list(self.shape),
            "n_sites": self.n_sites,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "Geometry":
        if payload.get("L") is not None:
            return build_geometry(payload["dimension"], payload["L"], payload["kind"])
        return build_box(payload["shape"], payload["kind"])

    def label(self) -> str:
        sides = "x".join(str(s) for s in self.shape)
        return f"{self.kind}-{sides}"


def _neighbor_table(shape: Tuple[int, ...], periodic: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Neighbour indices and out-of-box masks for every (site, direction) slot."""
    n = int(np.prod(shape))
    d = len(shape)
    idx = np.arange(n, dtype=np.int64).reshape(shape)
    columns = []
    outside = []
    for axis in range(d):
        for step in (-1, 1):
            if periodic:
                nb = np.roll(idx, -step, axis=axis)
                out = np.zeros(shape, dtype=bool)
            else:
                nb = np.full(shape, -1, dtype=np.int64)
                out = np.zeros(shape, dtype=bool)
                src = [slice(None)] * d
                dst = [slice(None)] * d
                if step == 1:
                    dst[axis], src[axis] = slice(0, -1), slice(1, None)
                    out_slice = [slice(None)] * d
                    out_slice[axis] = slice(-1, None)
                else:
                    dst[axis], src[axis] = slice(1, None), slice(0, -1)
                    out_slice = [slice(None)] * d
                    out_slice[axis] = slice(0, 1)
                nb[tuple(dst)] = idx[tuple(src)]
                out[tuple(out_slice)] = True
            columns.append(nb.reshape(n))
            outside.append(out.reshape(n))
    return np.stack(columns, axis=1), np.stack(outside, axis=1)


def _collapse(neighbors: np.ndarray) -> np.ndarray:
    """Drop self-loops and repeated neighbours, then pack valid entries first."""
    n, width = neighbors.shape
    own = np.arange(n)[:, None]
    nb = neighbors.copy()
    nb[nb == own] = -1
    for col in range(1, width):
        dup = (nb[:, :col] == nb[:, col : col + 1]).any(axis=1) & (nb[:, col] >= 0)
        nb[dup, col] = -1
    order = np.argsort(nb < 0, axis=1, kind="stable")
    return np.take_along_axis(nb, order, axis=1)


def _assemble(
    shape: Tuple[int, ...], kind: str, L: Optional[int], offset: int, max_sites: int
) -> Geometry:
    if kind not in KINDS:
        raise GeometryError(f"unknown geometry kind '{kind}', expected one of {KINDS}")
    d = len(shape)
    if d < 2:
        raise GeometryError(f"dimension must be at least 2, got {d}")
    if any(s < 1 for s in shape):
        raise GeometryError(f"every side must be positive, got {shape}")
    n = 1
    for s in shape:
        n *= int(s)
    if n >= max_sites:
        raise CapacityError("sites", n, max_sites)

    periodic = kind == "torus"
    coords = np.array(list(np.ndindex(*shape)), dtype=np.int64).reshape(n, d) + offset
    neighbors, outside = _neighbor_table(shape, periodic)
    neighbors = _collapse(neighbors).astype(np.int32)

    boundary_neighbors = np.full((n, 2 * d), -1, dtype=np.int32)
    if periodic:
        boundary_coords = np.zeros((0, d), dtype=np.int64)
    else:
        site, slot = np.nonzero(outside)
        axis, sign = slot // 2, np.where(slot % 2 == 0, -1, 1)
        outer = coords[site].copy()
        outer[np.arange(len(site)), axis] += sign
        boundary_coords, inverse = np.unique(outer, axis=0, return_inverse=True)
        boundary_neighbors[site, slot] = inverse.reshape(-1)
        order = np.argsort(boundary_neighbors < 0, axis=1, kind="stable")
        boundary_neighbors = np.take_along_axis(boundary_neighbors, order, axis=1)

    rows, cols = np.nonzero(neighbors >= 0)
    pairs = np.stack([rows, neighbors[rows, cols]], axis=1)
    pairs = pairs[pairs[:, 0] < pairs[:, 1]]
    edges = np.unique(pairs, axis=0) if len(pairs) else np.zeros((0, 2), dtype=np.int64)

    geom = Geometry(
        dimension=d,
        kind=kind,
        shape=tuple(int(s) for s in shape),
        L=L,
        offset=offset,
        coords=_frozen(coords),
        neighbors=_frozen(neighbors),
        boundary_coords=_frozen(boundary_coords),
        boundary_neighbors=_frozen(boundary_neighbors),
        edges=_frozen(edges.astype(np.int64)),
    )
    logger.debug(
        f"Built {geom.label()}: {geom.n_sites} sites, {len(edges)} bonds, "
        f"{geom.n_boundary} boundary sites"
    )
    return geom


def build_geometry(d: int, L: int, kind: str = "cube", max_sites: int = MAX_SITES) -> Geometry:
    """Build the cube Λ_L = ⟦−L, L⟧^d or the torus 𝕋_L of side 2L.

    Args:
        d: Dimension, at least 2.
        L: Side parameter, nonnegative (at least 1 for tori).
        kind: ``"cube"`` or ``"torus"``.
        max_sites: Refuse geometries with this many sites or more.

    Raises:
        GeometryError: On invalid dimension, side or kind.
        CapacityError: When the site cap is reached.
    """
    if d < 2:
        raise GeometryError(f"dimension must be at least 2, got {d}")
    if L < 0:
        raise GeometryError(f"side parameter L must be nonnegative, got {L}")
    if kind == "torus":
        if L < 1:
            raise GeometryError("a torus needs L >= 1 (side 2L)")
        return _assemble((2 * L,) * d, kind, L, 0, max_sites)
    return _assemble((2 * L + 1,) * d, kind, L, -L, max_sites)


def build_box(shape: Sequence[int], kind: str = "cube", max_sites: int = MAX_SITES) -> Geometry:
    """Rectangular box or torus with the given side lengths, coordinates from 0."""
    return _assemble(tuple(int(s) for s in shape), kind, None, 0, max_sites)
