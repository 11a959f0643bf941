import logging
import math
from pathlib import Path
from typing import List, Tuple, Union

import pandas as pd

from analysis.dataset import ExperimentalDataset
from potential.potential import Tabulated
from potential.units import from_peV, um
from utils.errors import DataError

logger = logging.getLogger(__name__)

DATASET_COLUMNS = (["z_um", "n_out"], ["z_um", "n_out", "sigma"])


def _read(path: Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, comment="#", dtype=str, skipinitialspace=True, encoding="utf-8")
    except FileNotFoundError as e:
        raise DataError(f"file not found: {path}", path=str(path)) from e
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path} is empty", path=str(path)) from e
    except pd.errors.ParserError as e:
        raise DataError(f"{path}: malformed CSV: {e}", path=str(path)) from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _numeric_rows(frame: pd.DataFrame, path: Path, optional_last: bool) -> List[Tuple[float, ...]]:
    rows = []
    for number, record in enumerate(frame.itertuples(index=False), start=1):
        values = []
        for column, cell in zip(frame.columns, record):
            missing = cell is None or (isinstance(cell, float) and math.isnan(cell))
            if missing and optional_last and column == frame.columns[-1] and len(frame.columns) == 3:
                values.append(None)
                continue
            try:
                value = float(str(cell).strip()) if not missing else math.nan
            except ValueError:
                raise DataError(f"{path}: data row {number}: {column}={cell!r} is not a number", row=number, column=column)
            if not math.isfinite(value):
                raise DataError(f"{path}: data row {number}: {column} is missing or not finite", row=number, column=column)
            values.append(value)
        rows.append(tuple(values))
    return rows


def load_dataset(path: Union[str, Path]) -> ExperimentalDataset:
    """
    Read measured counts from a `z_um,n_out[,sigma]` CSV.

    `#` lines are comments. Rows are sorted by slit width (stable);
    duplicate widths, negative counts and non-positive sigmas are rejected.
    """
    path = Path(path)
    frame = _read(path)
    if list(frame.columns) not in DATASET_COLUMNS:
        raise DataError(f"{path}: header must be z_um,n_out[,sigma], got {','.join(frame.columns)}", path=str(path))

    rows = _numeric_rows(frame, path, optional_last=True)
    for number, row in enumerate(rows, start=1):
        if row[1] < 0:
            raise DataError(f"{path}: data row {number}: negative count {row[1]:g}", row=number)
        if len(row) > 2 and row[2] is not None and row[2] <= 0:
            raise DataError(f"{path}: data row {number}: sigma must be positive", row=number)

    dataset = ExperimentalDataset.from_rows(rows)
    logger.info("loaded %d rows from %s", len(dataset), path)
    return dataset


def load_potential_table(path: Union[str, Path]) -> Tabulated:
    """Tabulated potential from a `z_um,V_peV` CSV."""
    path = Path(path)
    frame = _read(path)
    if list(frame.columns) != ["z_um", "V_peV"]:
        raise DataError(f"{path}: header must be z_um,V_peV", path=str(path))
    rows = _numeric_rows(frame, path, optional_last=False)
    try:
        return Tabulated(z=tuple(um(r[0]) for r in rows), v=tuple(from_peV(r[1]) for r in rows))
    except ValueError as e:
        raise DataError(f"{path}: {e}", path=str(path)) from e
