"""Exact continuous-time Glauber dynamics by uniformization.

A global Poisson clock rings at total rate ``n · c_M``; every ring picks a
uniform site and flips it with probability ``c(x, σ) / c_M``. For heat-bath
rates the ``monotone`` coupling instead rings each site at rate 1 and
resamples σ_x from its conditional law, which yields the same process and
preserves the spin order between two chains fed the same randomness.

Trajectories can be written to a binary event log::

    magic  b"GLEV"   4 bytes
    version          u16
    n_sites          u32
    n_events         u64
    horizon          f64
    initial spins    n_sites × i8
    events           n_events × (time bits u64, site u32, flag u8), little endian
"""

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from ..gibbs import BoundaryCondition
from ..gibbs.spins import validate_config
from ..lattice import Geometry
from ..rng import SeedLike, as_generator
from .kernels import run_coupled, run_events, run_overlap
from .rates import RateModel

logger = logging.getLogger(__name__)

COUPLINGS = ("uniformized", "monotone")

EVENT_MAGIC = b"GLEV"
EVENT_VERSION = 1
EVENT_HEADER = struct.Struct("<4sHIQd")
EVENT_DTYPE = np.dtype([("time", "<u8"), ("site", "<u4"), ("flag", "u1")])


@dataclass(frozen=True, eq=False)
class Trajectory:
    initial: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    sites: np.ndarray = field(repr=False)
    accepted: np.ndarray = field(repr=False)
    final: np.ndarray = field(repr=False)
    horizon: float

    @property
    def n_events(self) -> int:
        return len(self.times)

    @property
    def n_flips(self) -> int:
        return int(self.accepted.sum())

    def validate(self) -> bool:
        """Event times strictly increasing inside [0, T] and replay reaches ``final``."""
        times_ok = bool(
            np.all(np.diff(self.times) > 0)
            and (self.n_events == 0 or (self.times[0] >= 0 and self.times[-1] <= self.horizon))
        )
        return times_ok and bool(np.array_equal(replay(self), self.final))


def _event_stream(
    rng: np.random.Generator, n: int, total_rate: float, horizon: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = int(rng.poisson(total_rate * horizon)) if horizon > 0 else 0
    times = np.sort(rng.uniform(0.0, horizon, size=k))
    sites = rng.integers(0, n, size=k, dtype=np.int64)
    uniforms = rng.random(size=k)
    return times, sites, uniforms


def _mode(model: RateModel, coupling: str) -> Tuple[np.ndarray, float, bool]:
    """Lookup table, dominating rate per site and resample flag for ``coupling``."""
    if coupling not in COUPLINGS:
        raise ValueError(f"unknown coupling '{coupling}', expected one of {COUPLINGS}")
    if coupling == "monotone":
        if model.family != "heatbath":
            raise ValueError("the monotone coupling needs heat-bath rates")
        return model.plus_probability, 1.0, True
    return np.asarray(model.table), model.c_max, False


def simulate_ct(
    model: RateModel,
    geom: Geometry,
    bc: BoundaryCondition,
    sigma0: np.ndarray,
    T: float,
    seed: SeedLike = 0,
    index: int = 0,
    coupling: str = "uniformized",
) -> Trajectory:
    """Simulate the dynamics on [0, T] from ``sigma0``.

    Args:
        model: Rate model (family, β, bounds).
        geom: Geometry.
        bc: Boundary condition paired with ``geom``.
        sigma0: Initial configuration.
        T: Horizon, nonnegative.
        seed: Master seed or Generator; replica ``index`` selects the stream.
        coupling: ``"uniformized"`` or ``"monotone"`` (heat-bath only).

    Returns:
        Trajectory with every clock ring and its accepted flag.
    """
    if T < 0:
        raise ValueError(f"horizon must be nonnegative, got {T}")
    bc.check(geom)
    spins = validate_config(sigma0, geom.n_sites).copy()
    table, per_site, resample = _mode(model, coupling)
    rng = as_generator(seed, "glauber", index)
    times, sites, uniforms = _event_stream(rng, geom.n_sites, geom.n_sites * per_site, T)
    accepted = np.zeros(len(sites), dtype=np.bool_)
    run_events(
        spins,
        geom.neighbors,
        bc.field(geom),
        table,
        model.max_field,
        model.c_max,
        resample,
        sites,
        uniforms,
        accepted,
    )
    initial = validate_config(sigma0, geom.n_sites).copy()
    logger.debug(
        f"simulate_ct {geom.label()} T={T}: {len(sites)} rings, {int(accepted.sum())} flips"
    )
    return Trajectory(
        initial=initial, times=times, sites=sites, accepted=accepted, final=spins, horizon=float(T)
    )


def simulate_overlap(
    model: RateModel,
    geom: Geometry,
    bc: BoundaryCondition,
    sigma0: np.ndarray,
    grid: np.ndarray,
    rng: np.random.Generator,
    coupling: str = "uniformized",
) -> np.ndarray:
    """Site-averaged overlap n⁻¹ Σ_x σ_x(0)σ_x(t) at the sorted times ``grid``."""
    grid = np.asarray(grid, dtype=float)
    spins = validate_config(sigma0, geom.n_sites).copy()
    table, per_site, resample = _mode(model, coupling)
    horizon = float(grid[-1]) if len(grid) else 0.0
    times, sites, uniforms = _event_stream(rng, geom.n_sites, geom.n_sites * per_site, horizon)
    out = np.empty(len(grid), dtype=float)
    run_overlap(
        spins,
        geom.neighbors,
        bc.field(geom),
        table,
        model.max_field,
        model.c_max,
        resample,
        times,
        sites,
        uniforms,
        grid,
        out,
    )
    return out


def coupled_pair(
    model: RateModel,
    geom: Geometry,
    bc: BoundaryCondition,
    lower: np.ndarray,
    upper: np.ndarray,
    T: float,
    seed: SeedLike = 0,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Run two monotone heat-bath chains on shared randomness.

    Returns:
        (final lower, final upper, number of events after which the order broke).
    """
    low = validate_config(lower, geom.n_sites).copy()
    high = validate_config(upper, geom.n_sites).copy()
    if np.any(low > high):
        raise ValueError("coupled_pair needs lower <= upper sitewise")
    table, per_site, _ = _mode(model, "monotone")
    rng = as_generator(seed, "coupling")
    _, sites, uniforms = _event_stream(rng, geom.n_sites, geom.n_sites * per_site, T)
    violations = run_coupled(
        low, high, geom.neighbors, bc.field(geom), table, model.max_field, sites, uniforms
    )
    return low, high, int(violations)


def replay(trajectory: Trajectory) -> np.ndarray:
    """Apply the accepted flips of ``trajectory`` to its initial configuration."""
    spins = trajectory.initial.astype(np.int8).copy()
    flipped = trajectory.sites[trajectory.accepted]
    counts = np.bincount(flipped, minlength=len(spins))
    spins[counts % 2 == 1] *= -1
    return spins


def energy_flux(trajectory: Trajectory, geom: Geometry, bc: BoundaryCondition) -> Dict[int, int]:
    """Count accepted flips by the change of interaction energy they cause.

    Under a stationary reversible dynamics the counts at ``+k`` and ``-k``
    have equal expectation.
    """
    spins = trajectory.initial.astype(np.int64).copy()
    counts: Dict[int, int] = {}
    field = bc.field(geom)
    for x in trajectory.sites[trajectory.accepted]:
        h = int(field[x]) + int(sum(spins[y] for y in geom.neighbors[x] if y >= 0))
        delta = -2 * int(spins[x]) * h
        counts[delta] = counts.get(delta, 0) + 1
        spins[x] = -spins[x]
    return counts


def write_event_log(path: Union[str, Path], trajectory: Trajectory):
    path = Path(path)
    records = np.empty(trajectory.n_events, dtype=EVENT_DTYPE)
    records["time"] = trajectory.times.astype("<f8").view("<u8")
    records["site"] = trajectory.sites.astype("<u4")
    records["flag"] = trajectory.accepted.astype("u1")
    with path.open("wb") as fh:
        fh.write(
            EVENT_HEADER.pack(
                EVENT_MAGIC,
                EVENT_VERSION,
                len(trajectory.initial),
                trajectory.n_events,
                trajectory.horizon,
            )
        )
        fh.write(trajectory.initial.astype("i1").tobytes())
        fh.write(records.tobytes())
    logger.debug(f"Wrote {trajectory.n_events} events to {path}")


def read_event_log(path: Union[str, Path]) -> Trajectory:
    """Read a log written by ``write_event_log``; ``final`` is rebuilt by replay."""
    raw = Path(path).read_bytes()
    magic, version, n, count, horizon = EVENT_HEADER.unpack_from(raw, 0)
    if magic != EVENT_MAGIC or version != EVENT_VERSION:
        raise ValueError(f"{path}: not a version {EVENT_VERSION} event log")
    offset = EVENT_HEADER.size
    initial = np.frombuffer(raw, dtype="i1", count=n, offset=offset).astype(np.int8)
    records = np.frombuffer(raw, dtype=EVENT_DTYPE, count=count, offset=offset + n)
    partial = Trajectory(
        initial=initial,
        times=np.ascontiguousarray(records["time"]).view("<f8").astype(float),
        sites=records["site"].astype(np.int64),
        accepted=records["flag"].astype(bool),
        final=initial,
        horizon=float(horizon),
    )
    return Trajectory(
        initial=partial.initial,
        times=partial.times,
        sites=partial.sites,
        accepted=partial.accepted,
        final=replay(partial),
        horizon=partial.horizon,
    )

