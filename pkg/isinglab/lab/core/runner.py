import asyncio
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional

from ...errors import EXIT_CHECK_FAILED, EXIT_OK
from ..cache import CacheBackend, CacheManager, cache_key
from ..gibbs import BoundaryCondition
from ..lattice import Geometry
from ..report import InequalityReport
from ..spectral import DenseGeneratorBundle, build_generator
from .config import ExperimentConfig
from .environment import render_summary
from .experiments import ExperimentRegistry, Outcome
from .records import RecordWriter, ResultRecord, revision

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    status: int
    output_dir: Path
    records: List[ResultRecord] = field(default_factory=list)
    reports: List[InequalityReport] = field(default_factory=list)

    @property
    def failed(self) -> List[InequalityReport]:
        return [r for r in self.reports if not r.passed]


class ExperimentRunner:
    """Runs one validated ``ExperimentConfig`` end to end.

    The runner owns the worker pool, a per-run memo cache for generator
    bundles and the single ``RecordWriter`` of the output directory.

    Usage:
        runner = ExperimentRunner(load_config("autocorr.toml"))
        result = await runner.run()
    """

    def __init__(self, config: ExperimentConfig, cache: Optional[CacheBackend] = None):
        self.config = config.validate()
        self.digest = config.digest()
        self.cache = cache or CacheManager()
        self._executor: Optional[Executor] = None

    # ------------------------------------------------------------------
    # Parallel units
    # ------------------------------------------------------------------

    async def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """``fn`` over ``items``, results in submission order.

        With one worker everything runs in-process; otherwise each item is a
        task on the process pool, so ``fn`` and the items must be picklable.
        """
        items = list(items)
        if self._executor is None:
            return [fn(item) for item in items]
        loop = asyncio.get_running_loop()
        futures = [loop.run_in_executor(self._executor, fn, item) for item in items]
        return list(await asyncio.gather(*futures))

    def bundle(
        self, geom: Geometry, bc: BoundaryCondition, beta: float, family: str
    ) -> DenseGeneratorBundle:
        key = cache_key(
            "generator",
            {"geometry": geom.to_dict(), "bc": bc.to_dict(), "beta": beta, "family": family},
        )
        return self.cache.get_or_build(key, lambda: build_generator(geom, bc, beta, family))

    # ------------------------------------------------------------------
    # Run
    # ------------------------------------------------------------------

    async def run(self) -> RunResult:
        cfg = self.config
        experiment = ExperimentRegistry.get(cfg.kind)
        if experiment is None:
            raise KeyError(f"no experiment registered for kind '{cfg.kind}'")
        writer = RecordWriter(cfg.output_dir, self.digest, cfg.to_dict())
        start = time.time()
        if cfg.workers > 1:
            self._executor = ProcessPoolExecutor(max_workers=cfg.workers)
        try:
            outcome = await experiment().run(self)
        finally:
            if self._executor is not None:
                self._executor.shutdown()
                self._executor = None
        status = EXIT_OK if outcome.passed else EXIT_CHECK_FAILED
        self._persist(writer, outcome, status)
        logger.info(
            f"Run {cfg.kind} finished in {time.time() - start:.1f}s with status {status} "
            f"({len(outcome.reports)} checks)"
        )
        return RunResult(status, writer.output_dir, writer.records, outcome.reports)

    def _persist(self, writer: RecordWriter, outcome: Outcome, status: int):
        cfg = self.config
        for label, payload, passed in outcome.records:
            writer.write(ResultRecord.create(self.digest, cfg.kind, label, payload, passed))
            columns = payload.get("columns", [])
            for series in payload.get("series", []):
                rows = zip(series["abscissae"], series["values"], series["stderrs"])
                writer.write_series_csv(series["label"], rows, list(columns))
        writer.write_text(
            "summary.md",
            render_summary(
                {
                    "config": cfg.to_dict(),
                    "digest": self.digest,
                    "revision": revision(),
                    "status": status,
                    "series": [s.to_dict() for s in outcome.series],
                    "reports": [r.to_dict() for r in outcome.reports],
                }
            ),
        )
        writer.write_manifest(status, {"cache": self._cache_stats()})

    def _cache_stats(self) -> dict:
        return {
            "hits": getattr(self.cache, "hits", None),
            "misses": getattr(self.cache, "misses", None),
        }


async def run_experiment(config: ExperimentConfig) -> RunResult:
    return await ExperimentRunner(config).run()
