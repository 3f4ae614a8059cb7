"""Experiment configuration.

Sources, lowest to highest precedence: dataclass defaults, a TOML file,
explicit overrides (command-line flags) and the ``LAB_SEED`` environment
variable, which may only change the master seed.

TOML layout::

    [experiment]
    kind = "autocorr"
    seed = 7
    workers = 4

    [lattice]
    dimension = 2
    sizes = [1, 2]
    boundary = "periodic"

    [dynamics]
    family = "heatbath"

    [time]
    t_max = 50.0

    [budget]
    replicas = 400

    [output]
    dir = "results/autocorr"
"""

import hashlib
import logging
import os
import tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from ...errors import ConfigError
from ..gibbs.boundary import TAGS as BOUNDARY_TAGS
from ..glauber import RateRegistry
from .records import canonical_json

logger = logging.getLogger(__name__)

KINDS = ("autocorr", "arm", "spectral", "verify", "shellsum", "fit")
COUPLINGS = ("uniformized", "monotone")
SEED_ENV = "LAB_SEED"

# TOML section of every field; keys inside a section use the field name
# except where SECTION_ALIASES renames them.
SECTIONS: Dict[str, Tuple[str, ...]] = {
    "experiment": ("kind", "seed", "workers"),
    "lattice": ("dimension", "sizes", "shapes", "boundary", "ell"),
    "dynamics": ("beta", "family", "coupling"),
    "time": ("t0", "t_max", "ratio"),
    "budget": ("replicas", "samples", "functions"),
    "fit": ("input", "window", "delta", "eta"),
    "output": ("output_dir",),
}
SECTION_ALIASES = {("output", "dir"): "output_dir"}
UNDIGESTED = ("output_dir", "workers")


@dataclass
class ExperimentConfig:
    kind: str = "verify"
    seed: int = 0
    workers: int = 1
    dimension: int = 2
    sizes: List[int] = field(default_factory=lambda: [1])
    shapes: List[List[int]] = field(default_factory=list)
    boundary: Optional[str] = None
    ell: float = 3.0
    beta: Optional[float] = None
    family: str = "heatbath"
    coupling: str = "uniformized"
    t0: float = 0.1
    t_max: float = 10.0
    ratio: float = 1.3
    replicas: int = 200
    samples: int = 10_000
    functions: int = 100
    input: Optional[str] = None
    window: Optional[List[float]] = None
    delta: float = 1.0
    eta: Optional[float] = None
    output_dir: str = "results"

    # ------------------------------------------------------------------
    # Loading
    # ------------------------------------------------------------------

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "ExperimentConfig":
        """Build from the nested TOML layout."""
        known = {f.name for f in fields(cls)}
        values: Dict[str, Any] = {}
        for section, body in payload.items():
            if section not in SECTIONS or not isinstance(body, Mapping):
                raise ConfigError(section, "unknown section")
            for key, value in body.items():
                name = SECTION_ALIASES.get((section, key), key)
                if name not in known or name not in SECTIONS[section]:
                    raise ConfigError(f"{section}.{key}", "unknown key")
                values[name] = value
        return cls(**values)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            try:
                payload = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(str(path), f"malformed TOML: {exc}") from exc
        logger.debug(f"Loaded config {path}")
        return cls.from_mapping(payload)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ExperimentConfig":
        """Copy with every non-``None`` override applied."""
        known = {f.name for f in fields(self)}
        changes = {k: v for k, v in overrides.items() if v is not None and k in known}
        return replace(self, **changes)

    def with_environment(self, environ: Optional[Mapping[str, str]] = None) -> "ExperimentConfig":
        environ = os.environ if environ is None else environ
        raw = environ.get(SEED_ENV)
        if raw is None or raw == "":
            return self
        try:
            seed = int(raw)
        except ValueError as exc:
            raise ConfigError(SEED_ENV, f"not an integer: {raw!r}") from exc
        logger.info(f"Master seed overridden by {SEED_ENV}={seed}")
        return replace(self, seed=seed)

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    @staticmethod
    def _path(name: str) -> str:
        for section, names in SECTIONS.items():
            if name in names:
                return f"{section}.{'dir' if name == 'output_dir' else name}"
        return name

    def _fail(self, name: str, message: str, index: Optional[int] = None):
        path = self._path(name) + (f"[{index}]" if index is not None else "")
        raise ConfigError(path, message)

    def resolved_boundary(self) -> str:
        if self.boundary is not None:
            return self.boundary
        return {"arm": "plus", "autocorr": "periodic"}.get(self.kind, "periodic")

    def validate(self) -> "ExperimentConfig":
        """Check every field and return ``self``.

        Raises:
            ConfigError: With the dotted path of the first invalid field.
        """
        if self.kind not in KINDS:
            self._fail("kind", f"must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            self._fail("seed", "must be a nonnegative integer")
        if self.workers < 1:
            self._fail("workers", "must be at least 1")
        if self.dimension < 2:
            self._fail("dimension", "must be at least 2")
        if not self.sizes and not self.shapes and self.kind not in ("fit",):
            self._fail("sizes", "at least one size is required")
        for i, L in enumerate(self.sizes):
            if not isinstance(L, int) or L < 0:
                self._fail("sizes", f"side parameter must be a nonnegative integer, got {L}", i)
        for i, shape in enumerate(self.shapes):
            if len(shape) != self.dimension or any(int(s) < 1 for s in shape):
                self._fail("shapes", f"need {self.dimension} positive sides, got {shape}", i)
        tag = self.resolved_boundary()
        if tag not in BOUNDARY_TAGS or tag == "fixed":
            self._fail("boundary", f"unsupported boundary condition {tag!r}")
        if self.kind == "autocorr" and tag != "periodic":
            self._fail("boundary", "autocorrelation runs on tori with 'periodic'")
        if self.kind == "arm" and tag != "plus":
            self._fail("boundary", "the arm observable uses the 'plus' boundary condition")
        if self.kind == "shellsum":
            for i, L in enumerate(self.sizes):
                if not 2 <= L <= 10**6:
                    self._fail("sizes", f"shell sums need 2 <= L <= 10**6, got {L}", i)
        if self.ell < 3:
            self._fail("ell", "block scale must be at least 3")
        if self.beta is not None and self.beta < 0:
            self._fail("beta", "must be nonnegative")
        if RateRegistry.get(self.family) is None:
            self._fail("family", f"unknown rate family {self.family!r}")
        if self.coupling not in COUPLINGS:
            self._fail("coupling", f"must be one of {COUPLINGS}")
        if self.t0 <= 0:
            self._fail("t0", "must be positive")
        if self.t_max < self.t0:
            self._fail("t_max", "must be at least t0")
        if self.ratio <= 1:
            self._fail("ratio", "must exceed 1")
        if self.kind == "autocorr" and self.replicas < 2:
            self._fail("replicas", "replicas >= 2 required for stderr")
        if self.samples < 1:
            self._fail("samples", "must be positive")
        if self.functions < 1:
            self._fail("functions", "must be positive")
        if self.window is not None and (len(self.window) != 2 or self.window[0] >= self.window[1]):
            self._fail("window", "must be [low, high] with low < high")
        if self.kind == "shellsum" and (not 0 < self.delta <= 1 or self.delta == 0.5):
            self._fail("delta", "must lie in (0, 1] and differ from 1/2")
        if self.eta is not None and self.eta <= 0:
            self._fail("eta", "must be positive")
        if self.kind == "fit" and not self.input:
            self._fail("input", "the fit experiment needs an input result file")
        return self

    # ------------------------------------------------------------------
    # Identity
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        """sha256 of every field except the output directory and worker count."""
        payload = {k: v for k, v in self.to_dict().items() if k not in UNDIGESTED}
        return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """Merge every configuration source and validate the result."""
    config = ExperimentConfig.load(path) if path else ExperimentConfig()
    config = config.with_overrides(overrides or {}).with_environment(environ)
    return config.validate()
