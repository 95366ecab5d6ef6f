"""Delimited tables with a '#'-prefixed provenance header.

Every dataset this package emits starts with comment lines carrying the
schema version, a hash of the generating configuration, the code version
and a timestamp, followed by one header row of column names.  Floats are
written with shortest round-trip repr so that read + write is
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import SchemaMismatch

SCHEMA_VERSION = "sdsqueeze/v1"


@dataclass
class Table:
    columns: list
    rows: list                      # list of lists (python scalars)
    meta_lines: list = field(default_factory=list)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def meta(self) -> dict:
        out = {}
        for line in self.meta_lines:
            body = line.lstrip("#").strip()
            if ":" in body:
                key, val = body.split(":", 1)
                out[key.strip()] = val.strip()
        return out


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = str(v)
    if "," in s or "\n" in s:
        raise ValueError(f"cell value {s!r} would break the delimited format")
    return s


def _parse_value(s: str):
    if s == "true":
        return True
    if s == "false":
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def provenance_lines(command: str, config: dict, version: str,
                     timestamp: str | None = None) -> list:
    ts = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    return [
        f"# schema: {SCHEMA_VERSION}",
        f"# command: {command}",
        f"# config-hash: {config_hash(config)}",
        f"# version: {version}",
        f"# timestamp: {ts}",
    ]


def write_table(path, table: Table):
    lines = list(table.meta_lines)
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_table(path) -> Table:
    meta_lines, columns, rows = [], None, []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                meta_lines.append(line)
                continue
            if columns is None:
                columns = line.split(",")
                continue
            rows.append([_parse_value(tok) for tok in line.split(",")])
    if columns is None:
        raise ValueError(f"{path} has no header row")
    table = Table(columns, rows, meta_lines)
    schema = table.meta().get("schema")
    if schema is not None and schema != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: schema {schema!r}, expected {SCHEMA_VERSION!r}")
    return table


def rows_from_dicts(columns, dict_rows) -> list:
    return [[d[c] for c in columns] for d in dict_rows]
