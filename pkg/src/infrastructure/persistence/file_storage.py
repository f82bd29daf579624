"""
Report files: report.json, CSV plot tables and grid fields.

Grid field binary layout:
    line 1  HARNACKLAB-GRIDFIELD 1
    line 2  JSON header {"L", "resolution", "boundary_kind", "N"}
    then    resolution^2 little-endian float64 heights, row-major (values[i, j], i = x index)
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from src.core.models.grid import GridField
from src.infrastructure.config.settings import GRIDFIELD_MAGIC

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"


class ReportStorage:
    """Writes everything a run produces into one output folder"""

    def __init__(self, output_dir: str):
        self.output_path = Path(output_dir)
        self.output_path.mkdir(parents=True, exist_ok=True)
        self.written: List[str] = []

    def _track(self, path: Path) -> str:
        name = path.relative_to(self.output_path).as_posix()
        self.written.append(name)
        return name

    def write_report(self, report: Dict[str, Any]) -> Path:
        """Sorted keys and fixed separators keep identical runs byte-identical."""
        path = self.output_path / REPORT_NAME
        text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info(f"📄 Report written to {path}")
        return path

    def write_table(self, name: str, table: pd.DataFrame) -> str:
        path = self.output_path / f"{name}.csv"
        table.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")
        return self._track(path)

    def write_gridfield(self, name: str, field: GridField, binary: bool = True) -> str:
        if binary:
            path = self.output_path / f"{name}.gridfield.bin"
            header = json.dumps(field.header(), sort_keys=True)
            with open(path, "wb") as f:
                f.write(f"{GRIDFIELD_MAGIC}\n{header}\n".encode("utf-8"))
                f.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C"))
        else:
            path = self.output_path / f"{name}.gridfield.csv"
            x, y = field.mesh()
            table = pd.DataFrame({"x": x.ravel(), "y": y.ravel(), "height": field.values.ravel()})
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write("# " + json.dumps(field.header(), sort_keys=True) + "\n")
                table.to_csv(f, index=False, lineterminator="\n", float_format="%.17g")
        return self._track(path)


def read_gridfield(path) -> GridField:
    """Inverse of ReportStorage.write_gridfield for the binary layout."""
    path = Path(path)
    with open(path, "rb") as f:
        magic = f.readline().decode("utf-8").rstrip("\n")
        if magic != GRIDFIELD_MAGIC:
            raise ValueError(f"{path} is not a grid field file (magic {magic!r})")
        header = json.loads(f.readline().decode("utf-8"))
        n = int(header["resolution"])
        values = np.frombuffer(f.read(), dtype="<f8")
    if values.size != n * n:
        raise ValueError(f"{path}: expected {n * n} heights, found {values.size}")
    return GridField(
        half_width=float(header["L"]),
        values=values.reshape(n, n).astype(float),
        boundary_kind=header["boundary_kind"],
        N=header["N"],
    )
