"""Deterministic tabular output: CSV and gnuplot-style plot data."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row width does not match the header")
        self.rows.append(list(values))


def _cell(v) -> str:
    # 17 significant digits round-trips float64; formatting is locale-free
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(table: Table, path):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def emit_plotdata(table: Table, path):
    with open(path, "w", newline="") as fh:
        fh.write("# " + " ".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(" ".join(_cell(v) for v in row) + "\n")
