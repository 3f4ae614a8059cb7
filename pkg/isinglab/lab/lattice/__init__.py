from .blocks import BlockDecomposition, admissible_spacing, build_block_grid
from .geometry import Geometry, build_box, build_geometry
from .shells import ShellFamily, shell_size, shells

__all__ = [
    "Geometry",
    "build_geometry",
    "build_box",
    "BlockDecomposition",
    "build_block_grid",
    "admissible_spacing",
    "ShellFamily",
    "shells",
    "shell_size",
]
