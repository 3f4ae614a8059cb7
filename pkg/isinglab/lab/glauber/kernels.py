"""numba event loops for continuous-time Glauber dynamics.

Event times, sites and uniforms are drawn in numpy beforehand; the kernels
only walk them. In thinning mode a ring at site x flips σ_x with probability
``table[σ_x h_x + max_field] / c_max``. In resample mode (heat-bath only) the
ring sets σ_x = +1 with probability ``table[h_x + max_field]``.
"""

from numba import njit


@njit(cache=True)
def _field_at(spins, neighbors, field, x):
    h = field[x]
    for k in range(neighbors.shape[1]):
        y = neighbors[x, k]
        if y < 0:
            break
        h += spins[y]
    return h


@njit(cache=True)
def _update(spins, neighbors, field, table, max_field, c_max, resample, x, u):
    h = _field_at(spins, neighbors, field, x)
    old = spins[x]
    if resample:
        new = 1 if u < table[h + max_field] else -1
    else:
        new = -old if u * c_max < table[old * h + max_field] else old
    spins[x] = new
    return new != old


@njit(cache=True)
def run_events(
    spins, neighbors, field, table, max_field, c_max, resample, sites, uniforms, accepted
):
    for k in range(sites.shape[0]):
        accepted[k] = _update(
            spins, neighbors, field, table, max_field, c_max, resample, sites[k], uniforms[k]
        )


@njit(cache=True)
def run_overlap(
    spins, neighbors, field, table, max_field, c_max, resample, times, sites, uniforms, grid, out
):
    """Record the site-averaged overlap n⁻¹ Σ_x σ_x(0)σ_x(t) at every grid time."""
    n = spins.shape[0]
    initial = spins.copy()
    overlap = n
    g = 0
    for k in range(sites.shape[0]):
        while g < grid.shape[0] and grid[g] < times[k]:
            out[g] = overlap / n
            g += 1
        x = sites[k]
        old = spins[x]
        if _update(spins, neighbors, field, table, max_field, c_max, resample, x, uniforms[k]):
            overlap -= 2 * initial[x] * old
    while g < grid.shape[0]:
        out[g] = overlap / n
        g += 1


@njit(cache=True)
def run_coupled(lower, upper, neighbors, field, table, max_field, sites, uniforms):
    """Drive two heat-bath chains with shared randomness; count order violations."""
    violations = 0
    for k in range(sites.shape[0]):
        x = sites[k]
        _update(lower, neighbors, field, table, max_field, 1.0, True, x, uniforms[k])
        _update(upper, neighbors, field, table, max_field, 1.0, True, x, uniforms[k])
        if lower[x] > upper[x]:
            violations += 1
    return violations
