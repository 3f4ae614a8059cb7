"""Tidy CSV export of the series stored in result records."""

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from .experiments import GENERIC_COLUMNS
from .records import read_records, records_in

logger = logging.getLogger(__name__)

Row = Tuple[float, float, float, str]


def plot_rows(
    paths: Iterable[Union[str, Path]], selector: Optional[str] = None
) -> Tuple[List[str], List[Row]]:
    """Header and rows (abscissa, value, stderr, series) sorted by series then abscissa.

    ``selector`` keeps series whose label or experiment kind contains it.

    Raises:
        SchemaMismatchError: On the first file written with another schema version.
    """
    files = sorted({f for p in paths for f in records_in(p)})
    rows: List[Row] = []
    column_sets = set()
    for path in files:
        for record in read_records(path):
            columns = tuple(record.payload.get("columns", GENERIC_COLUMNS))
            for series in record.payload.get("series", []):
                label = series["label"]
                if selector and selector not in label and selector != record.experiment:
                    continue
                column_sets.add(columns)
                for x, y, s in zip(series["abscissae"], series["values"], series["stderrs"]):
                    rows.append((float(x), float(y), float(s), label))
    columns = column_sets.pop() if len(column_sets) == 1 else GENERIC_COLUMNS
    rows.sort(key=lambda r: (r[3], r[0]))
    logger.debug(f"Plot data: {len(rows)} rows from {len(files)} files")
    return list(columns) + ["series"], rows


def emit_plot_data(paths: Iterable[Union[str, Path]], selector: Optional[str] = None) -> str:
    header, rows = plot_rows(paths, selector)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for x, y, s, label in rows:
        out.writerow([repr(x), repr(y), repr(s), label])
    return buf.getvalue()
