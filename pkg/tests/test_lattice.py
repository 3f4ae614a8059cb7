import numpy as np
import pytest

from isinglab.errors import CapacityError, GeometryError
from isinglab.lab.lattice import (Geometry, admissible_spacing, build_block_grid, build_box,
                                  build_geometry, shell_size, shells)


def test_single_site_cube_has_four_boundary_neighbours():
    geom = build_geometry(2, 0)

    assert geom.n_sites == 1
    assert geom.n_boundary == 4
    assert len(geom.edges) == 0
    assert geom.boundary_degree.tolist() == [4]
    assert geom.origin == 0


def test_cube_one_counts():
    geom = build_geometry(2, 1)

    assert geom.n_sites == 9
    assert len(geom.edges) == 12
    assert geom.n_boundary == 12
    assert len(geom.boundary_bonds) == 12
    assert geom.coords[geom.origin].tolist() == [0, 0]
    assert sorted(geom.degree.tolist()) == [2, 2, 2, 2, 3, 3, 3, 3, 4]


def test_side_two_torus_collapses_parallel_edges():
    geom = build_geometry(2, 1, "torus")

    assert geom.shape == (2, 2)
    assert geom.degree.tolist() == [2, 2, 2, 2]
    assert len(geom.edges) == 4
    assert geom.n_boundary == 0


def test_torus_side_four_is_four_regular():
    geom = build_geometry(2, 2, "torus")

    assert geom.n_sites == 16
    assert np.all(geom.degree == 4)
    assert len(geom.edges) == 32


def test_neighbours_are_symmetric():
    for geom in (build_geometry(2, 2), build_box((2, 3), "torus"), build_geometry(3, 1)):
        for i in range(geom.n_sites):
            for j in geom.neighbors[i]:
                if j >= 0:
                    assert i in geom.neighbors[j]


def test_translation_is_a_permutation_preserving_edges():
    geom = build_box((2, 3), "torus")
    perm = geom.translation([1, 2])

    assert sorted(perm.tolist()) == list(range(geom.n_sites))
    edges = {tuple(sorted(e)) for e in geom.edges.tolist()}
    moved = {tuple(sorted((int(perm[a]), int(perm[b])))) for a, b in geom.edges}
    assert moved == edges


def test_translation_is_refused_on_cubes():
    with pytest.raises(GeometryError):
        build_geometry(2, 1).translation([1, 0])


def test_invalid_geometries():
    with pytest.raises(GeometryError):
        build_geometry(1, 3)
    with pytest.raises(GeometryError):
        build_geometry(2, -1)
    with pytest.raises(GeometryError):
        build_geometry(2, 0, "torus")
    with pytest.raises(GeometryError):
        build_geometry(2, 1, "sphere")


def test_capacity_cap():
    with pytest.raises(CapacityError):
        build_geometry(2, 5, max_sites=100)


def test_index_of_wraps_on_tori_only():
    torus = build_geometry(2, 2, "torus")
    assert torus.index_of([4, 5]) == torus.index_of([0, 1])

    cube = build_geometry(2, 1)
    assert cube.index_of([-1, -1]) == 0
    with pytest.raises(GeometryError):
        cube.index_of([2, 0])


def test_geometry_dict_round_trip():
    geom = build_box((2, 3), "cube")
    again = Geometry.from_dict(geom.to_dict())

    assert again.shape == geom.shape
    assert again.kind == "cube"
    assert np.array_equal(again.edges, geom.edges)


def test_shell_sizes():
    family = shells(build_geometry(2, 2))

    assert family.sizes == (1, 8, 16)
    assert [shell_size(2, i) for i in range(3)] == [1, 8, 16]
    assert shell_size(3, 1) == 26


def test_shells_need_centred_cube():
    with pytest.raises(GeometryError):
        shells(build_geometry(2, 1, "torus"))


def test_block_grid_shrinks_ell():
    geom = build_geometry(2, 4, "torus")
    # side 8 with ell 4.7: spacing 3 does not divide 8, so the grid falls back to spacing 2
    assert admissible_spacing(geom.shape, 4.7) == 2
    dec = build_block_grid(geom, 4.7)

    assert dec.spacing == 2
    assert dec.ell_used == 3
    assert dec.adjusted
    assert dec.block_side == 1
    assert dec.q == 16


def test_block_grid_partitions_torus():
    geom = build_box((6, 6), "torus")
    dec = build_block_grid(geom, 4.0)

    assert dec.spacing == 3
    assert dec.q == 4
    covered = np.concatenate([dec.grid] + list(dec.blocks))
    assert sorted(covered.tolist()) == list(range(geom.n_sites))
    # every neighbour of a block site is in the same block or on the grid
    for j, block in enumerate(dec.blocks):
        assert len(block) == 4
        for x in block:
            for y in geom.neighbors[x]:
                if y >= 0:
                    assert dec.block_of[y] in (j, -1)


def test_no_admissible_spacing():
    with pytest.raises(GeometryError):
        admissible_spacing((5, 5), 2.9)
    with pytest.raises(GeometryError):
        admissible_spacing((5, 7), 4.0)
    with pytest.raises(GeometryError):
        build_block_grid(build_geometry(2, 1), 3.0)
