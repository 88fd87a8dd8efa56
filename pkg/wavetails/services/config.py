"""
TOML run configuration, schema version 1.

Every parse or validation failure is raised as ConfigError with the line of
the table it belongs to, so a user can jump to the offending section.
"""

import logging
import re
import sys
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from wavetails.models.config import (
    SCHEMA_VERSION,
    FitSettings,
    GridConfig,
    SimulationConfig,
    SimulationConfigError,
)
from wavetails.models.dimension import DimensionError, DimensionIndex
from wavetails.models.nonlinearity import NonlinearityError, NonlinearityTerm
from wavetails.models.profiles import (
    BumpComponent,
    GeneratingFunction,
    ProfileError,
)

logger = logging.getLogger(__name__)

MODEL_ERRORS = (
    DimensionError,
    NonlinearityError,
    ProfileError,
    SimulationConfigError,
)

TERM_KEYS = {"c", "p", "q", "alpha", "beta"}
BUMP_KEYS = {"amplitude", "center", "half_width", "smoothness"}
GRID_KEYS = {"dr", "r_out", "cfl", "t_max", "fd_order"}
RUN_KEYS = {"epsilons", "observers", "isolate"}
FIT_KEYS = {"tol_gamma", "tol_amp", "tol_eps", "noise_floor", "window"}
TOP_LEVEL_KEYS = {
    "schema_version",
    "dimension",
    "terms",
    "bumps",
    "grid",
    "run",
    "fit",
}

_HEADER = re.compile(r"^\s*\[\[?\s*([A-Za-z_][\w.]*)\s*\]\]?")
_DECODE_LINE = re.compile(r"line (\d+)")


class ConfigError(Exception):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        self.message = (
            message if line is None else f"line {line}: {message}"
        )

        super().__init__(self.message)


def get_table_lines(text: str) -> dict[str, list[int]]:
    """
    Line numbers (1-based) of every table header, in order of appearance.
    Arrays of tables get one entry per element.
    """
    lines: dict[str, list[int]] = {}

    for number, line in enumerate(text.splitlines(), start=1):
        match = _HEADER.match(line)
        if match:
            lines.setdefault(match.group(1), []).append(number)

    return lines


class _Locator:
    def __init__(self, text: str) -> None:
        self.tables = get_table_lines(text)

    def line(self, table: str, index: int = 0) -> Optional[int]:
        numbers = self.tables.get(table, [])
        if index < len(numbers):
            return numbers[index]
        return None


def _check_keys(
    data: dict, allowed: set[str], table: str, line: Optional[int]
) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) {unknown} in [{table}]", line=line
        )


def _require(
    data: dict, key: str, table: str, line: Optional[int]
) -> Any:
    if key not in data:
        raise ConfigError(f"missing key '{key}' in [{table}]", line=line)
    return data[key]


def _table(data: dict, key: str, line: Optional[int]) -> dict:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a table", line=line)
    return value


def _array_of_tables(data: dict, key: str) -> list[dict]:
    value = data.get(key, [])
    if not isinstance(value, list) or not all(
        isinstance(item, dict) for item in value
    ):
        raise ConfigError(f"'{key}' must be an array of tables [[{key}]]")
    return value


def _build(factory, line: Optional[int], **kwargs):
    try:
        return factory(**kwargs)
    except MODEL_ERRORS as e:
        raise ConfigError(e.message, line=line) from e
    except TypeError as e:
        raise ConfigError(str(e), line=line) from e


def parse_config(text: str) -> SimulationConfig:
    """
    Parses and validates a TOML configuration.

    Args:
        text (str): TOML document.

    Returns:
        SimulationConfig: Validated configuration.

    Raises:
        ConfigError: On syntax errors, schema violations and invalid
            values.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _DECODE_LINE.search(str(e))
        raise ConfigError(
            f"invalid TOML: {e}",
            line=int(match.group(1)) if match else None,
        ) from e

    locate = _Locator(text)
    _check_keys(data, TOP_LEVEL_KEYS, "top level", None)

    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}; expected "
            f"{SCHEMA_VERSION}"
        )

    dimension_line = locate.line("dimension")
    dimension_data = _table(data, "dimension", dimension_line)
    _check_keys(dimension_data, {"l"}, "dimension", dimension_line)
    dimension = _build(
        DimensionIndex,
        dimension_line,
        l=_require(dimension_data, "l", "dimension", dimension_line),
    )

    terms = []
    for index, term in enumerate(_array_of_tables(data, "terms")):
        line = locate.line("terms", index)
        _check_keys(term, TERM_KEYS, "terms", line)
        terms.append(_build(NonlinearityTerm, line, **term))

    bumps = _array_of_tables(data, "bumps")
    if not bumps:
        raise ConfigError("at least one [[bumps]] table is required")

    components = []
    for index, bump in enumerate(bumps):
        line = locate.line("bumps", index)
        _check_keys(bump, BUMP_KEYS, "bumps", line)
        for key in sorted(BUMP_KEYS):
            _require(bump, key, "bumps", line)
        components.append(_build(BumpComponent, line, **bump))

    generating = _build(
        GeneratingFunction, locate.line("bumps"), components=components
    )

    grid_line = locate.line("grid")
    grid_data = _table(data, "grid", grid_line)
    _check_keys(grid_data, GRID_KEYS, "grid", grid_line)
    for key in ("dr", "r_out", "t_max"):
        _require(grid_data, key, "grid", grid_line)
    grid = _build(GridConfig, grid_line, **grid_data)

    fit_line = locate.line("fit")
    fit_data = _table(data, "fit", fit_line)
    _check_keys(fit_data, FIT_KEYS, "fit", fit_line)
    fit = _build(FitSettings, fit_line, **fit_data)

    run_line = locate.line("run")
    run_data = _table(data, "run", run_line)
    _check_keys(run_data, RUN_KEYS, "run", run_line)

    return _build(
        SimulationConfig,
        run_line,
        dimension=dimension,
        terms=terms,
        generating=generating,
        grid=grid,
        fit=fit,
        **run_data,
    )


def load_config(path: str | Path) -> SimulationConfig:
    """
    Reads a TOML configuration file.

    Args:
        path (str | Path): Configuration file.

    Returns:
        SimulationConfig: Validated configuration.
    """
    path = Path(path)

    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from e

    config = parse_config(text)
    logger.debug("Loaded %s (hash %s)", path, config.config_hash[:12])
    return config
