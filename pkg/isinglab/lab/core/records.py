"""Result persistence: append-only JSONL records, run manifest and CSV mirrors."""

import csv
import json
import logging
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from ...errors import SchemaMismatchError
from ...version import __version__
from ..constants import SCHEMA_VERSION

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
MANIFEST_FILE = "manifest.json"


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def canonical_json(obj: Any) -> str:
    """Sorted keys, no whitespace, numpy values converted; identical inputs give identical text."""
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_plain
    )


def revision() -> str:
    return f"isinglab-{__version__}"


@dataclass(frozen=True)
class ResultRecord:
    schema_version: int
    config_digest: str
    timestamp: str
    experiment: str
    label: str
    payload: Dict[str, Any]
    revision: str
    passed: Optional[bool] = None

    @classmethod
    def create(
        cls,
        config_digest: str,
        experiment: str,
        label: str,
        payload: Dict[str, Any],
        passed: Optional[bool] = None,
    ) -> "ResultRecord":
        return cls(
            schema_version=SCHEMA_VERSION,
            config_digest=config_digest,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            experiment=experiment,
            label=label,
            payload=json.loads(canonical_json(payload)),
            revision=revision(),
            passed=passed,
        )

    def to_json(self) -> str:
        return canonical_json(asdict(self))

    def payload_json(self) -> str:
        return canonical_json(self.payload)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ResultRecord":
        return cls(**{k: payload.get(k) for k in cls.__dataclass_fields__})


class RecordWriter:
    """The single writer of a run directory.

    Usage:
        writer = RecordWriter("results/run1", config)
        writer.write(ResultRecord.create(...))
        writer.write_series_csv(series)
        writer.write_manifest(status=0)
    """

    def __init__(self, output_dir: Union[str, Path], config_digest: str, config: Dict[str, Any]):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.config_digest = config_digest
        self.config = config
        self.records: List[ResultRecord] = []
        self.files: List[str] = [RECORDS_FILE]
        self.records_path = self.output_dir / RECORDS_FILE

    def write(self, record: ResultRecord):
        if record.config_digest != self.config_digest:
            raise ValueError("record digest does not match the run configuration")
        with open(self.records_path, "a", encoding="utf-8") as fh:
            fh.write(record.to_json() + "\n")
        self.records.append(record)

    def write_series_csv(self, name: str, rows: Iterable[Iterable[Any]], header: List[str]) -> Path:
        path = self.output_dir / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh)
            out.writerow(header)
            for row in rows:
                out.writerow([repr(v) if isinstance(v, float) else v for v in row])
        self.files.append(path.name)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.output_dir / name
        path.write_text(text, encoding="utf-8")
        self.files.append(name)
        return path

    def write_manifest(self, status: int, extra: Optional[Dict[str, Any]] = None) -> Path:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "config_digest": self.config_digest,
            "config": self.config,
            "revision": revision(),
            "status": status,
            "records": len(self.records),
            "files": sorted(set(self.files)),
        }
        manifest.update(extra or {})
        path = self.output_dir / MANIFEST_FILE
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_plain) + "\n")
        logger.info(f"Wrote {len(self.records)} records and manifest to {self.output_dir}")
        return path


def read_records(path: Union[str, Path]) -> List[ResultRecord]:
    """Parse a JSONL records file.

    Raises:
        SchemaMismatchError: When a line carries another schema version.
    """
    path = Path(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            found = raw.get("schema_version")
            if found != SCHEMA_VERSION:
                raise SchemaMismatchError(str(path), found, SCHEMA_VERSION)
            out.append(ResultRecord.from_dict(raw))
    return out


def records_in(path: Union[str, Path]) -> List[Path]:
    """``path`` itself when it is a file, else every records file below the directory, sorted."""
    path = Path(path)
    if path.is_file():
        return [path]
    return sorted(path.rglob(RECORDS_FILE))


def read_manifest(output_dir: Union[str, Path]) -> Dict[str, Any]:
    path = Path(output_dir) / MANIFEST_FILE
    manifest = json.loads(path.read_text())
    found = manifest.get("schema_version")
    if found != SCHEMA_VERSION:
        raise SchemaMismatchError(str(path), found, SCHEMA_VERSION)
    return manifest
