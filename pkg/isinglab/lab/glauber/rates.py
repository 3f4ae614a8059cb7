import logging
from dataclasses import dataclass, field
from typing import Optional, Type

import numpy as np

from ..gibbs import BoundaryCondition
from ..gibbs.spins import validate_config
from ..lattice import Geometry

logger = logging.getLogger(__name__)


class RateFamily:
    """Base class for flipping-rate families.

    A family maps ``p = σ_x · h_x`` (spin times local field, boundary
    included) to the rate c(x, σ). Subclass, implement ``evaluate()`` and
    decorate with ``@register`` to make the family available by name.

    Usage:
        @register
        class Metropolis(RateFamily):
            def evaluate(self, beta, p):
                return np.minimum(np.exp(-2.0 * beta * p), 1.0)
    """

    def evaluate(self, beta: float, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError("Each rate family must implement evaluate.")


class RateRegistry:
    """Registry of rate families, keyed by lowercased class name."""

    _families: dict = {}

    @classmethod
    def register(cls, name: str, family: Type[RateFamily]):
        existing = cls._families.get(name)
        if existing is not None and existing is not family:
            logger.warning(f"Rate family '{name}' re-registered; previous definition shadowed")
        cls._families[name] = family

    @classmethod
    def get(cls, name: str) -> Optional[Type[RateFamily]]:
        return cls._families.get(name)

    @classmethod
    def all(cls) -> dict:
        return dict(cls._families)

    @classmethod
    def unregister(cls, name: str):
        cls._families.pop(name, None)


def register(cls):
    """Decorator that registers a RateFamily subclass under its lowercased name."""
    if not (isinstance(cls, type) and issubclass(cls, RateFamily)):
        raise TypeError(f"{cls!r} must subclass RateFamily")
    RateRegistry.register(cls.__name__.lower(), cls)
    return cls


@register
class Metropolis(RateFamily):
    def evaluate(self, beta, p):
        return np.minimum(np.exp(-2.0 * beta * np.asarray(p, dtype=float)), 1.0)


@register
class HeatBath(RateFamily):
    def evaluate(self, beta, p):
        return 1.0 / (1.0 + np.exp(2.0 * beta * np.asarray(p, dtype=float)))


@dataclass(frozen=True, eq=False)
class RateModel:
    """A rate family at fixed β with its declared bounds c_m ≤ c ≤ c_M.

    ``table[p + max_field]`` is the rate for ``p = σ_x h_x``; the bounds are
    the extremes of the table.
    """

    family: str
    beta: float
    max_field: int
    table: np.ndarray = field(repr=False)
    c_min: float = 0.0
    c_max: float = 0.0
    interaction_range: int = 1

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(p, dtype=np.int64) + self.max_field]

    @property
    def plus_probability(self) -> np.ndarray:
        """Heat-bath law P(σ_x = +1 | h) indexed by ``h + max_field``."""
        h = np.arange(-self.max_field, self.max_field + 1, dtype=float)
        return 1.0 / (1.0 + np.exp(-2.0 * self.beta * h))

    def to_dict(self) -> dict:
        return {"family": self.family, "beta": self.beta, "c_m": self.c_min, "c_M": self.c_max}


def make_rate_model(family: str, beta: float, d: int) -> RateModel:
    """Tabulate ``family`` at ``beta`` for local fields up to 2d."""
    cls = RateRegistry.get(family.lower())
    if cls is None:
        raise ValueError(f"unknown rate family '{family}', known: {sorted(RateRegistry.all())}")
    max_field = 2 * d
    p = np.arange(-max_field, max_field + 1)
    table = np.asarray(cls().evaluate(beta, p), dtype=float)
    if np.any(table <= 0):
        raise ValueError(f"rate family '{family}' produced a nonpositive rate")
    table.setflags(write=False)
    return RateModel(
        family=family.lower(),
        beta=float(beta),
        max_field=max_field,
        table=table,
        c_min=float(table.min()),
        c_max=float(table.max()),
    )


def local_fields(geom: Geometry, bc: BoundaryCondition, spins: np.ndarray) -> np.ndarray:
    """h_x = Σ_{y∼x} σ_y + boundary field, for one config or a ``(k, n)`` stack."""
    spins = np.asarray(spins)
    single = spins.ndim == 1
    stack = np.atleast_2d(spins).astype(np.int64)
    h = np.broadcast_to(bc.field(geom), stack.shape).copy()
    for k in range(geom.neighbors.shape[1]):
        nb = geom.neighbors[:, k]
        valid = nb >= 0
        h[:, valid] += stack[:, nb[valid]]
    return h[0] if single else h


def rate(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, sigma: np.ndarray, x: int
) -> float:
    """c(x, σ) for a single site."""
    s = validate_config(sigma, geom.n_sites)
    if not 0 <= x < geom.n_sites:
        raise ValueError(f"site {x} outside geometry with {geom.n_sites} sites")
    h = local_fields(geom, bc, s)[x]
    return float(model(int(s[x]) * int(h)))


def rate_table(
    model: RateModel, geom: Geometry, bc: BoundaryCondition, spins: np.ndarray
) -> np.ndarray:
    """``(k, n)`` rates c(x, σ) for a stack of configurations."""
    spins = np.atleast_2d(spins)
    return model(spins.astype(np.int64) * local_fields(geom, bc, spins))
