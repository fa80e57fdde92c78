"""Result files for rmchannel commands.

CSV output starts with two comment lines:

    # {"config": {...}, "build": "...", "workers": 8}
    # {"generated_at": "2026-01-01T00:00:00+00:00"}

followed by a header row and the data rows. Everything except the second
line is a pure function of the effective configuration, so two runs of the
same config produce byte-identical files once that line is dropped.
JSON output holds the same content in one document.
"""

import csv
import io
import json
import math
import subprocess
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ConfigError, NumericInputError


@dataclass
class CurveRecord:
    """Tabular command output with its provenance."""

    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(self, **values):
        self.rows.append(values)


@lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe`` of the working tree, else the package version."""
    from .. import __version__

    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
    except (OSError, subprocess.SubprocessError):
        return __version__
    if result.returncode != 0 or not result.stdout.strip():
        return __version__
    return result.stdout.strip()


def _format_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "" if value is None else value


def _json_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no infinity; divergent measures are written as a string
        return "inf" if math.isinf(value) else value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def render_csv(record: CurveRecord, generated_at: Optional[str] = None) -> str:
    generated_at = generated_at or datetime.now(timezone.utc).isoformat(timespec="seconds")
    buffer = io.StringIO()
    buffer.write("# " + json.dumps(record.metadata, sort_keys=True) + "\n")
    buffer.write("# " + json.dumps({"generated_at": generated_at}) + "\n")
    writer = csv.DictWriter(
        buffer, fieldnames=record.columns, extrasaction="ignore", lineterminator="\n"
    )
    writer.writeheader()
    for row in record.rows:
        writer.writerow({key: _format_value(value) for key, value in row.items()})
    return buffer.getvalue()


def render_json(record: CurveRecord, generated_at: Optional[str] = None) -> str:
    generated_at = generated_at or datetime.now(timezone.utc).isoformat(timespec="seconds")
    document = {
        "metadata": record.metadata,
        "generated_at": generated_at,
        "columns": record.columns,
        "rows": [
            {key: _json_value(row.get(key)) for key in record.columns} for row in record.rows
        ],
    }
    return json.dumps(document, indent=2, sort_keys=False) + "\n"


def write_record(record: CurveRecord, out: Optional[str], fmt: str = "csv") -> Optional[Path]:
    """Write ``record`` to ``out`` (``-`` or None for stdout). Returns the file path."""
    if fmt == "csv":
        text = render_csv(record)
    elif fmt == "json":
        text = render_json(record)
    else:
        raise ConfigError(f"unsupported output format: {fmt!r} (expected csv or json)")

    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return None

    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def read_curve(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``t,value`` curve from a CSV file.

    Lines starting with ``#`` are skipped; a header row naming ``t`` and
    ``value`` selects those columns, otherwise the first two columns are used.
    """
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"curve file not found: {path}")

    lines = [
        line for line in p.read_text().splitlines() if line.strip() and not line.startswith("#")
    ]
    if not lines:
        raise NumericInputError(f"curve file {path} holds no data")

    rows = list(csv.reader(lines))
    t_col, v_col = 0, 1
    header = [cell.strip().lower() for cell in rows[0]]
    if "t" in header and "value" in header:
        t_col, v_col = header.index("t"), header.index("value")
        rows = rows[1:]

    try:
        times = np.array([float(row[t_col]) for row in rows])
        values = np.array([float(row[v_col]) for row in rows])
    except (ValueError, IndexError) as exc:
        raise NumericInputError(f"malformed curve file {path}: {exc}") from exc
    return times, values
