"""Reader for the simulator's CSV datasets.

Files carry '#'-prefixed ``key = value`` metadata lines, then a header row,
then numeric rows.  Reading is strict: an empty file, a short row or a
non-finite cell is a hard error naming the offending row and column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Dataset:
    metadata: dict[str, str]
    columns: list[str]
    rows: list[list[float]]

    def column(self, name: str) -> list[float]:
        idx = self.column_index(name)
        return [row[idx] for row in self.rows]

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}; file has {self.columns}") from None


def read_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    metadata: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = value.strip()
            continue
        if columns is None:
            columns = [c.strip() for c in line.split(",")]
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise ValueError(
                f"{path}:{lineno}: data row {len(rows) + 1} has {len(cells)} cells, "
                f"expected {len(columns)}"
            )
        parsed = []
        for col, cell in zip(columns, cells):
            try:
                value = float(cell)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}:{lineno}: missing or non-numeric value in data row "
                    f"{len(rows) + 1}, column {col!r}: {cell!r}"
                )
            parsed.append(value)
        rows.append(parsed)
    if columns is None or not rows:
        raise ValueError(f"{path}: empty CSV (no header or no data rows)")
    return Dataset(metadata=metadata, columns=columns, rows=rows)
