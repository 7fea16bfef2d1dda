"""
Traffic CSV ingestion.

Accepts comma- or tab-delimited UTF-8 text with a header naming ``year``,
``month`` and at least one of ``arrivals``, ``departures``, ``total``.
Records must form a gap-free monthly sequence; nothing is interpolated.
"""

import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from core_series import MonthIndex, MonthlySeries
from errors import CsvParseError, IngestionError

logger = logging.getLogger(__name__)

TRAFFIC_COLUMNS = ("arrivals", "departures", "total")
_INTEGER = re.compile(r"^\d+$")
_RAGGED = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


@dataclass(frozen=True)
class TrafficRecord:
    year: int
    month: int
    arrivals: Optional[int] = None
    departures: Optional[int] = None
    total: Optional[int] = None

    @property
    def index(self) -> MonthIndex:
        return MonthIndex(self.year, self.month)

    def value(self, column: str) -> Optional[int]:
        if column not in TRAFFIC_COLUMNS:
            raise IngestionError(f"unknown traffic column '{column}' (expected one of {', '.join(TRAFFIC_COLUMNS)})")
        return getattr(self, column)


def _detect_delimiter(text: str) -> str:
    header = text.splitlines()[0] if text else ""
    return "\t" if "\t" in header else ","


def _cell_int(raw, row: int, column: str, required: bool) -> Optional[int]:
    raw = raw if isinstance(raw, str) else ""     # short rows come back as NaN
    cleaned = raw.strip().replace(",", "").replace(" ", "").replace("_", "")
    if not cleaned:
        if required:
            raise CsvParseError("empty cell", row, column)
        return None
    if not _INTEGER.match(cleaned):
        raise CsvParseError(f"'{raw.strip()}' is not a non-negative integer", row, column)
    return int(cleaned)


def _ragged_row_error(error: Exception) -> IngestionError:
    message = str(error).strip()
    match = _RAGGED.search(message)
    if match is None:
        return IngestionError(f"malformed CSV: {message}")
    expected, row, saw = (int(g) for g in match.groups())
    return CsvParseError(f"{saw} fields where the header has {expected}", row, f"#{expected + 1}")


def parse_csv(data: Union[bytes, str]) -> List[TrafficRecord]:
    """Validated, sorted, gap-free traffic records."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as e:
            raise IngestionError(f"input is not UTF-8: {e}") from e
    else:
        text = data
    if not text.strip():
        raise IngestionError("empty input")

    try:
        frame = pd.read_csv(
            io.StringIO(text),
            sep=_detect_delimiter(text),
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError as e:
        raise IngestionError(f"no header row: {e}") from e
    except pd.errors.ParserError as e:
        raise _ragged_row_error(e) from e
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = [c for c in ("year", "month") if c not in frame.columns]
    if missing:
        raise IngestionError(f"header lacks required column(s): {', '.join(missing)}")
    present = [c for c in TRAFFIC_COLUMNS if c in frame.columns]
    if not present:
        raise IngestionError("header names no traffic column (arrivals, departures or total)")

    records = []
    for position, raw in enumerate(frame.to_dict(orient="records")):
        row = position + 2      # header is line 1
        year = _cell_int(raw["year"], row, "year", required=True)
        month = _cell_int(raw["month"], row, "month", required=True)
        if not 1 <= month <= 12:
            raise CsvParseError(f"month {month} outside 1..12", row, "month")
        values = {c: _cell_int(raw[c], row, c, required=False) for c in present}
        arrivals, departures, total = (values.get(c) for c in TRAFFIC_COLUMNS)
        if arrivals is not None and departures is not None:
            if total is None:
                total = arrivals + departures
                logger.warning(f"Computed total for {year:04d}-{month:02d} from arrivals + departures ({total})")
            elif total != arrivals + departures:
                raise IngestionError(
                    f"{year:04d}-{month:02d}: total {total} differs from arrivals + departures "
                    f"({arrivals + departures}) on line {row}"
                )
        records.append(TrafficRecord(year, month, arrivals, departures, total))

    if not records:
        raise IngestionError("no data rows")
    records.sort(key=lambda r: (r.year, r.month))
    for previous, current in zip(records, records[1:]):
        step = previous.index.months_until(current.index)
        if step == 0:
            raise IngestionError(f"duplicate month {current.index}")
        if step > 1:
            raise IngestionError(f"missing month {previous.index.shift(1)}")
    logger.info(f"Parsed {len(records)} monthly records {records[0].index}..{records[-1].index}")
    return records


def records_to_series(records: List[TrafficRecord], column: str = "total") -> MonthlySeries:
    values = []
    for record in records:
        value = record.value(column)
        if value is None:
            raise IngestionError(f"no {column} value for {record.index}")
        values.append(float(value))
    return MonthlySeries(records[0].index, values)


def load_csv(path: Union[str, Path], column: str = "total") -> MonthlySeries:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IngestionError(f"cannot read {path}: {e}") from e
    return records_to_series(parse_csv(data), column)
