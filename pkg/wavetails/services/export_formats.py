"""
Self-describing CSV and JSON artifacts.

CSV files start with '#' header lines of the form "# key: <json value>",
always including schema_version, followed by a plain pandas table written
at full float precision.
"""

import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np
import pandas as pd

from wavetails.models.config import SCHEMA_VERSION
from wavetails.operations.observers import ObserverSeries

FLOAT_FORMAT = "%.17g"
SERIES_COLUMNS = ("t", "phi", "dphi_dt")


class ExportFormatError(Exception):
    def __init__(self, message: str) -> None:
        self.message = message

        super().__init__(self.message)


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_to_jsonable(item) for item in value.tolist()]
    if isinstance(value, np.generic):
        return _to_jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def generate_csv_header(metadata: dict) -> str:
    """
    Header lines for a CSV artifact; schema_version always comes first.
    """
    header = {"schema_version": SCHEMA_VERSION, **metadata}
    return "".join(
        f"# {key}: {json.dumps(_to_jsonable(value))}\n"
        for key, value in header.items()
    )


def parse_csv_header(lines: Iterable[str]) -> dict:
    """Inverse of generate_csv_header; stops at the first table line."""
    metadata = {}

    for line in lines:
        if not line.startswith("#"):
            break
        key, _, value = line[1:].partition(":")
        metadata[key.strip()] = json.loads(value.strip())

    return metadata


def write_table_csv(
    rows: list[dict] | pd.DataFrame,
    path: str | Path,
    metadata: Optional[dict] = None,
    columns: Optional[Iterable[str]] = None,
) -> Path:
    """
    Writes a table with a self-describing header.

    Args:
        rows (list[dict] | pd.DataFrame): Table rows.
        path (str | Path): Destination.
        metadata (dict | None): Header entries.
        columns (Iterable[str] | None): Column order; required to write an
            empty table with a header row.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = rows
    if not isinstance(rows, pd.DataFrame):
        frame = pd.DataFrame(
            rows, columns=None if columns is None else list(columns)
        )

    with path.open("w", encoding="utf-8", newline="") as stream:
        stream.write(generate_csv_header(metadata or {}))
        frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT)

    return path


def read_table_csv(path: str | Path) -> tuple[dict, pd.DataFrame]:
    """
    Reads a table written by write_table_csv.

    Returns:
        tuple[dict, pd.DataFrame]: Header metadata and the table.
    """
    path = Path(path)

    with path.open("r", encoding="utf-8") as stream:
        metadata = parse_csv_header(stream)

    frame = pd.read_csv(path, comment="#")
    return metadata, frame


def get_series_metadata(series: ObserverSeries) -> dict:
    return {
        "config_hash": series.config_hash,
        "epsilon": series.epsilon,
        "r_obs": series.r_obs,
        "parity": series.parity,
        **series.metadata,
    }


def write_series_csv(series: ObserverSeries, path: str | Path) -> Path:
    """
    Writes an observer series with columns t, phi, dphi_dt.

    The header carries the configuration hash, epsilon, l and the term list.
    """
    frame = pd.DataFrame(
        {
            "t": series.t,
            "phi": series.phi,
            "dphi_dt": series.phi_t,
        },
        columns=list(SERIES_COLUMNS),
    )
    return write_table_csv(frame, path, get_series_metadata(series))


def read_series_csv(path: str | Path) -> ObserverSeries:
    """
    Reads an observer series written by write_series_csv.

    Args:
        path (str | Path): Series file.

    Returns:
        ObserverSeries: The series with its metadata.
    """
    metadata, frame = read_table_csv(path)

    missing = [column for column in SERIES_COLUMNS if column not in frame]
    if missing:
        raise ExportFormatError(f"{path} lacks column(s) {missing}")

    if metadata.get("schema_version") != SCHEMA_VERSION:
        raise ExportFormatError(
            f"{path} has schema_version {metadata.get('schema_version')!r}"
        )

    extra = {
        key: value
        for key, value in metadata.items()
        if key
        not in ("schema_version", "config_hash", "epsilon", "r_obs", "parity")
    }

    return ObserverSeries(
        r_obs=float(metadata["r_obs"]),
        t=frame["t"].to_numpy(dtype=float),
        phi=frame["phi"].to_numpy(dtype=float),
        phi_t=frame["dphi_dt"].to_numpy(dtype=float),
        epsilon=float(metadata.get("epsilon", 0.0)),
        config_hash=str(metadata.get("config_hash", "")),
        parity=metadata.get("parity"),
        metadata=extra,
    )


def write_json_report(report: dict, path: str | Path) -> Path:
    """
    Writes a JSON report, adding schema_version. Non-finite floats become
    null.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    document = {"schema_version": SCHEMA_VERSION, **_to_jsonable(report)}
    path.write_text(
        json.dumps(document, indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
    )

    return path


def dumps_report(report: dict) -> str:
    return json.dumps(
        {"schema_version": SCHEMA_VERSION, **_to_jsonable(report)}, indent=2
    )
