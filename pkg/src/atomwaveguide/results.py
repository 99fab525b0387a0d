"""Column-labeled numeric result tables with full reproducibility metadata.

CSV files carry a single '#'-prefixed JSON metadata header line followed by a
regular CSV body; the JSON format mirrors the same content. The metadata
echoes the complete scenario configuration (plus seed and code version) so a
table can be re-run bit-identically; wall-time and timestamp fields are
informational and excluded from reproducibility comparisons.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class ResultTable:
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = {k: np.asarray(v) for k, v in self.columns.items()}
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths: {lengths}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        names = list(self.columns)
        with open(tmp, "w") as fh:
            fh.write("# " + json.dumps(self.metadata, sort_keys=True) + "\n")
            fh.write(",".join(names) + "\n")
            for row in zip(*(self.columns[n] for n in names)):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        tmp.replace(path)  # atomic write

    def to_json(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        payload = {
            "metadata": self.metadata,
            "columns": {k: np.asarray(v).tolist() for k, v in self.columns.items()},
        }
        tmp.write_text(json.dumps(payload, sort_keys=True))
        tmp.replace(path)

    @classmethod
    def from_csv(cls, path: str | Path) -> "ResultTable":
        lines = Path(path).read_text().splitlines()
        meta = {}
        start = 0
        if lines and lines[0].startswith("#"):
            meta = json.loads(lines[0].lstrip("# "))
            start = 1
        names = lines[start].split(",")
        body = [ln.split(",") for ln in lines[start + 1 :] if ln]
        cols = {
            name: np.array([float(row[i]) for row in body])
            for i, name in enumerate(names)
        }
        return cls(columns=cols, metadata=meta)

    @classmethod
    def from_json(cls, path: str | Path) -> "ResultTable":
        payload = json.loads(Path(path).read_text())
        cols = {k: np.array(v) for k, v in payload["columns"].items()}
        return cls(columns=cols, metadata=payload.get("metadata", {}))
