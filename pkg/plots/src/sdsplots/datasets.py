"""Reader for the '#'-headed CSV datasets emitted by the sdsqueeze CLI.

This package talks to the simulation toolkit only through these files;
the expected schema version is pinned here and enforced on load.
"""

from dataclasses import dataclass, field

import numpy as np

EXPECTED_SCHEMA = "sdsqueeze/v1"


class SchemaMismatch(Exception):
    pass


@dataclass
class Dataset:
    path: str
    columns: list
    rows: list
    meta_lines: list = field(default_factory=list)

    def meta(self) -> dict:
        out = {}
        for line in self.meta_lines:
            body = line.lstrip("#").strip()
            if ":" in body:
                key, val = body.split(":", 1)
                out[key.strip()] = val.strip()
        return out

    def column(self, name) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def select(self, **conditions) -> "Dataset":
        keep = []
        for r in self.rows:
            d = dict(zip(self.columns, r))
            if all(d[k] == v for k, v in conditions.items()):
                keep.append(r)
        return Dataset(self.path, self.columns, keep, self.meta_lines)


def _parse(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


def load(path) -> Dataset:
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
            rows.append([_parse(t) for t in line.split(",")])
    ds = Dataset(str(path), columns or [], rows, meta_lines)
    schema = ds.meta().get("schema")
    if schema != EXPECTED_SCHEMA:
        raise SchemaMismatch(f"{path}: schema {schema!r}, expected {EXPECTED_SCHEMA!r}")
    return ds
