"""numba kernels for equilibrium sampling.

Spins are int8 ±1, neighbour tables int32 padded with -1 (valid entries
first). The Generator argument is a ``numpy.random.Generator``; only
``rng.random()`` is drawn inside the kernels.
"""

import math

import numpy as np
from numba import njit


@njit
def wolff_step(spins, neighbors, boundary_neighbors, boundary_values, p_add, rng):
    """Grow one Wolff cluster and flip it unless it reaches a frozen spin.

    Returns:
        (cluster size, flipped flag).
    """
    n = spins.shape[0]
    seed = min(int(rng.random() * n), n - 1)
    s0 = spins[seed]
    in_cluster = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    queue[0] = seed
    in_cluster[seed] = True
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(boundary_neighbors.shape[1]):
            b = boundary_neighbors[x, k]
            if b < 0:
                break
            if boundary_values[b] == s0 and rng.random() < p_add:
                return tail, False
        for k in range(neighbors.shape[1]):
            y = neighbors[x, k]
            if y < 0:
                break
            if not in_cluster[y] and spins[y] == s0 and rng.random() < p_add:
                in_cluster[y] = True
                queue[tail] = y
                tail += 1
    for i in range(tail):
        spins[queue[i]] = -s0
    return tail, True


@njit
def heatbath_sweep(spins, neighbors, field, beta, rng):
    """One sequential heat-bath sweep; ``field`` holds the boundary contribution."""
    n = spins.shape[0]
    for x in range(n):
        h = field[x]
        for k in range(neighbors.shape[1]):
            y = neighbors[x, k]
            if y < 0:
                break
            h += spins[y]
        p_plus = 1.0 / (1.0 + math.exp(-2.0 * beta * h))
        if rng.random() < p_plus:
            spins[x] = 1
        else:
            spins[x] = -1


@njit(cache=True)
def local_field_all(spins, neighbors, field):
    n = spins.shape[0]
    out = np.empty(n, dtype=np.int64)
    for x in range(n):
        h = field[x]
        for k in range(neighbors.shape[1]):
            y = neighbors[x, k]
            if y < 0:
                break
            h += spins[y]
        out[x] = h
    return out
