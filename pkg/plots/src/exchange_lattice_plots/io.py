"""Reader for the exchange-lattice CSV container format.

Each file is a single table: one ``#``-prefixed provenance line, a column
header, the data rows, and a ``# footer`` line carrying a JSON object of
run-level metadata (bounds, fitted rates, normalizers).  The footer is the
source for every analytic overlay, so it is parsed as strictly as the rows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

_HEADER_PREFIX = "# exchange-lattice "
_FOOTER_PREFIX = "# footer "


class SchemaError(ValueError):
    """An input file is not shaped like the documented CLI output."""


@dataclass(frozen=True)
class Table:
    """One parsed CSV container.

    Attributes
    ----------
    path : str
        Where the table came from; used verbatim in error messages.
    meta : dict
        Key/value pairs of the provenance line (version, experiment,
        config_hash, seed).
    columns : tuple of str
        Column names in file order.
    cells : dict
        Raw string cells per column.
    footer : dict
        The decoded footer JSON object.
    """

    path: str
    meta: dict
    columns: tuple
    cells: dict = field(repr=False)
    footer: dict

    @property
    def n_rows(self) -> int:
        return len(self.cells[self.columns[0]]) if self.columns else 0

    def require(self, *names: str) -> None:
        """Raise :class:`SchemaError` naming the first column that is absent."""
        for name in names:
            if name not in self.cells:
                raise SchemaError(f"missing column '{name}' in {self.path}")

    def column(self, name: str) -> np.ndarray:
        """Numeric view of a column; empty cells (serialized None) become NaN."""
        self.require(name)
        return np.array(
            [float(v) if v != "" else math.nan for v in self.cells[name]], dtype=float
        )

    def strings(self, name: str) -> list:
        self.require(name)
        return list(self.cells[name])

    def footer_value(self, key: str):
        """Footer field, or :class:`SchemaError` naming the missing key."""
        if key not in self.footer:
            raise SchemaError(f"missing footer field '{key}' in {self.path}")
        return self.footer[key]


def _parse_meta(line: str) -> dict:
    body = line[len(_HEADER_PREFIX):].strip()
    parts = body.split()
    if not parts or not parts[0].startswith("v"):
        raise SchemaError(f"malformed provenance line in {line!r}")
    meta = {"version": parts[0][1:]}
    for token in parts[1:]:
        key, _, value = token.partition("=")
        meta[key] = value
    return meta


def read_table(path: str) -> Table:
    """Parse one CLI output table.

    Raises
    ------
    SchemaError
        If the file lacks the provenance line, the footer, or a decodable
        footer JSON object.  Missing data columns are *not* detected here;
        callers declare what they need through :meth:`Table.require`.
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise SchemaError(f"{path} is not an exchange-lattice table")
    if len(lines) < 3 or not lines[-1].startswith(_FOOTER_PREFIX):
        raise SchemaError(f"{path} has no footer line")
    try:
        footer = json.loads(lines[-1][len(_FOOTER_PREFIX):])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} footer is not valid JSON: {exc}") from exc
    columns = tuple(lines[1].split(","))
    cells = {name: [] for name in columns}
    for ln in lines[2:-1]:
        parts = ln.split(",")
        if len(parts) != len(columns):
            raise SchemaError(f"{path} row has {len(parts)} cells, expected {len(columns)}")
        for name, value in zip(columns, parts):
            cells[name].append(value)
    return Table(
        path=path, meta=_parse_meta(lines[0]), columns=columns, cells=cells, footer=footer
    )
