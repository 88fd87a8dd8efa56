import json
import math

import numpy as np
import pytest

from wavetails.models.config import SCHEMA_VERSION
from wavetails.operations.observers import ObserverSeries
from wavetails.services.export_formats import (
    ExportFormatError,
    dumps_report,
    generate_csv_header,
    parse_csv_header,
    read_series_csv,
    read_table_csv,
    write_json_report,
    write_series_csv,
    write_table_csv,
)


@pytest.fixture
def series():
    t = np.linspace(0.0, 2.0, 9)
    return ObserverSeries(
        r_obs=2.0,
        t=t,
        phi=np.exp(-t) / 3.0,
        phi_t=-np.exp(-t) / 3.0,
        epsilon=-0.025,
        config_hash="abc123",
        parity="odd",
        metadata={"l": 1, "terms": ["1*phi^3"]},
    )


def test_csv_header():
    header = generate_csv_header({"epsilon": 0.05, "terms": ["1*phi^2"]})
    lines = header.splitlines()

    assert lines[0] == f"# schema_version: {SCHEMA_VERSION}"
    assert parse_csv_header(lines + ["t,phi"]) == {
        "schema_version": SCHEMA_VERSION,
        "epsilon": 0.05,
        "terms": ["1*phi^2"],
    }


def test_series_csv_keeps_every_bit(series, tmp_path):
    path = write_series_csv(series, tmp_path / "runs" / "r_2.csv")
    loaded = read_series_csv(path)

    assert path.read_text().splitlines()[-10] == "t,phi,dphi_dt"
    np.testing.assert_array_equal(loaded.t, series.t)
    np.testing.assert_array_equal(loaded.phi, series.phi)
    np.testing.assert_array_equal(loaded.phi_t, series.phi_t)
    assert loaded.epsilon == -0.025
    assert loaded.config_hash == "abc123"
    assert loaded.parity == "odd"
    assert loaded.metadata == {"l": 1, "terms": ["1*phi^3"]}


def test_read_series_csv_rejects_other_tables(tmp_path):
    path = write_table_csv([{"t": 1.0, "value": 2.0}], tmp_path / "x.csv")

    with pytest.raises(ExportFormatError, match="lacks column"):
        read_series_csv(path)


def test_read_series_csv_rejects_other_schema_versions(series, tmp_path):
    path = write_series_csv(series, tmp_path / "r_2.csv")
    text = path.read_text().replace(
        f"# schema_version: {SCHEMA_VERSION}", "# schema_version: 99"
    )
    path.write_text(text)

    with pytest.raises(ExportFormatError, match="schema_version"):
        read_series_csv(path)


def test_table_csv_with_columns(tmp_path):
    rows = [{"b": 2.0, "a": 1}, {"b": math.nan, "a": 3}]
    path = write_table_csv(
        rows, tmp_path / "table.csv", {"seed": 0}, columns=("a", "b")
    )
    metadata, frame = read_table_csv(path)

    assert metadata == {"schema_version": SCHEMA_VERSION, "seed": 0}
    assert list(frame.columns) == ["a", "b"]
    assert math.isnan(frame["b"][1])


def test_empty_table_keeps_its_header(tmp_path):
    path = write_table_csv([], tmp_path / "empty.csv", columns=("l", "n"))
    _, frame = read_table_csv(path)

    assert list(frame.columns) == ["l", "n"]
    assert frame.empty


def test_json_report_replaces_non_finite_values(tmp_path):
    report = {"value": math.nan, "gammas": np.array([4.0, math.inf])}
    path = write_json_report(report, tmp_path / "report.json")
    document = json.loads(path.read_text())

    assert document == {
        "schema_version": SCHEMA_VERSION,
        "value": None,
        "gammas": [4.0, None],
    }
    assert json.loads(dumps_report(report)) == document
