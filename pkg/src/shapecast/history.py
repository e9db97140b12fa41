"""Daily records, the ordered history window, and its JSON-lines persistence."""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .calendars import CalendarMeta, annotate_calendar
from .errors import ShapecastError
from .segments import LoadSegment, TemperatureSegment, TimeGrid


class Quality(str, Enum):
    COMPLETE = "complete"
    GAP_FILLED = "gap-filled"
    REJECTED = "rejected"


@dataclass(frozen=True)
class DailyRecord:
    """One day's load (raw megawatts), optional temperature, and metadata."""

    meta: CalendarMeta
    load: LoadSegment
    temperature: TemperatureSegment | None = None
    quality: Quality = Quality.COMPLETE


@dataclass(frozen=True)
class HistoryWindow:
    """Ascending, duplicate-free list of usable (non-rejected) daily records."""

    records: tuple[DailyRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        dates = [r.meta.date for r in self.records]
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise ShapecastError("history records must be strictly ascending by date")
        if any(r.quality is Quality.REJECTED for r in self.records):
            raise ShapecastError("rejected records are excluded from history")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def grid(self) -> TimeGrid:
        if not self.records:
            raise ShapecastError("empty history has no grid")
        return self.records[0].load.grid

    def before(self, date: dt.date) -> "HistoryWindow":
        """Records strictly before `date`."""
        return HistoryWindow(tuple(r for r in self.records if r.meta.date < date))

    def by_date(self, date: dt.date) -> DailyRecord:
        for r in self.records:
            if r.meta.date == date:
                return r
        raise ShapecastError(f"no record for {date.isoformat()}")


def shape_matrix(window: HistoryWindow) -> np.ndarray:
    """L x P matrix of shape-form (max-rescaled) load values, history order."""
    from .segments import rescale_day

    return np.array([rescale_day(r.load).values for r in window.records])


def record_to_dict(record: DailyRecord) -> dict:
    d = {
        "date": record.meta.date.isoformat(),
        "is_holiday": record.meta.is_holiday,
        "group": record.meta.group.value,
        "quality": record.quality.value,
        "load_mw": record.load.values.tolist(),
    }
    if record.temperature is not None:
        mask = set(record.temperature.mask)
        d["temp_c"] = [
            float(v) if i in mask else None
            for i, v in enumerate(record.temperature.values)
        ]
    return d


def record_from_dict(d: dict, grid: TimeGrid) -> DailyRecord:
    date = dt.date.fromisoformat(d["date"])
    holiday_set = {date} if d.get("is_holiday") else frozenset()
    meta = annotate_calendar(date, holiday_set)
    load = LoadSegment(grid, d["load_mw"])
    temperature = None
    if d.get("temp_c") is not None:
        raw = d["temp_c"]
        mask = tuple(i for i, v in enumerate(raw) if v is not None)
        values = np.array([v if v is not None else np.nan for v in raw])
        temperature = TemperatureSegment(grid, values, mask)
    return DailyRecord(meta, load, temperature, Quality(d["quality"]))


def history_jsonl_text(window: HistoryWindow) -> str:
    """First line carries the grid labels; one record per following line."""
    lines = [json.dumps({"grid": list(window.grid.labels)}, sort_keys=True)]
    lines += [json.dumps(record_to_dict(r), sort_keys=True) for r in window.records]
    return "\n".join(lines) + "\n"


def write_history_jsonl(path, window: HistoryWindow) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(history_jsonl_text(window))


def read_history_jsonl(path) -> HistoryWindow:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ShapecastError(f"{path}: empty history file")
    header = json.loads(lines[0])
    if "grid" not in header:
        raise ShapecastError(f"{path}: missing grid header line")
    grid = TimeGrid(tuple(header["grid"]))
    return HistoryWindow(tuple(record_from_dict(json.loads(ln), grid) for ln in lines[1:]))
