"""Run records and their JSON / CSV serializations."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .sampling import EquilibriumDistribution

SCHEMA_VERSION = 1

# Fixed CSV headers. Every float column X is followed by X_full, which carries
# 17 significant digits; X itself is rounded to 6 for reading.
CSV_SCHEMAS: dict[str, tuple[str, ...]] = {
    "sample": ("d", "m", "family", "scale", "p", "p_full", "stderr", "stderr_full",
               "n_samples", "n_degenerate", "seed"),
    "exact": ("d", "m", "k", "kind", "value", "value_full", "stderr", "stderr_full",
              "n_points", "n_discarded", "insufficient"),
    "signs": ("n", "k", "alpha", "symmetric", "symmetric_full", "recursive", "recursive_full",
              "explicit", "explicit_full", "oracle", "oracle_full",
              "max_discrepancy", "max_discrepancy_full"),
    "compare": ("d", "m", "method", "value", "value_full", "stderr", "stderr_full"),
    "bounds": ("d", "m", "alpha", "upper", "upper_full", "lower", "lower_full"),
}


@dataclass
class RunRecord:
    command: str
    params: dict[str, Any]
    tool_version: str
    duration_s: float = 0.0
    distributions: dict[str, EquilibriumDistribution] = field(default_factory=dict)
    rows: list[dict[str, Any]] = field(default_factory=list)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {"schema": self.schema, "command": self.command, "params": self.params,
                "tool_version": self.tool_version, "duration_s": self.duration_s,
                "distributions": {k: v.to_dict() for k, v in self.distributions.items()},
                "rows": self.rows}

    def to_json(self) -> str:
        # json writes floats with repr, the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunRecord":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported run record schema {data.get('schema')!r}")
        return cls(command=data["command"], params=data["params"], tool_version=data["tool_version"],
                   duration_s=data["duration_s"],
                   distributions={k: EquilibriumDistribution.from_dict(v)
                                  for k, v in data["distributions"].items()},
                   rows=data["rows"], schema=data["schema"])


def read_run_record(source: str | Path) -> RunRecord:
    """Load a RunRecord from a JSON file path or a JSON string."""
    text = str(source)
    if not text.lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    return RunRecord.from_dict(json.loads(text))


def _cell(value: Any, full: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if not math.isfinite(value):
            return repr(value)
        return format(value, ".17g" if full else ".6g")
    return str(value)


def format_csv(command: str, rows: Iterable[dict[str, Any]]) -> str:
    """Rows rendered under the command's fixed header; X_full cells come from row[X]."""
    header = CSV_SCHEMAS[command]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(col[:-5]), True) if col.endswith("_full")
                         else _cell(row.get(col), False) for col in header])
    return buf.getvalue()


def parse_csv(text: str) -> tuple[Sequence[str], list[dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    return tuple(reader.fieldnames or ()), list(reader)
