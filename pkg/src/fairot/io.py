"""Score table CSV reading/writing and JSON helpers."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .empirical import GroupedScores
from .errors import ParseError

REQUIRED_COLUMNS = ("id", "score", "group")
FAIR_SUFFIX = "_fair"


def fmt_float(x) -> str:
    """Shortest round-trip representation; stable across runs and locales."""
    return repr(float(x))


@dataclass
class ScoreTable:
    """A parsed score CSV. Cells are kept as the original strings."""

    header: list
    rows: list
    path: str = "<memory>"

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [r[i] for r in self.rows]

    @property
    def score_columns(self) -> list:
        """``score`` then every ``score_<model>`` column, excluding fair-score columns."""
        return [c for c in self.header
                if (c == "score" or c.startswith("score_")) and not c.endswith(FAIR_SUFFIX)]

    def fair_column_for(self, column: str) -> str | None:
        name = column + FAIR_SUFFIX
        return name if name in self.header else None

    @property
    def has_outcomes(self) -> bool:
        return "outcome" in self.header and all(v != "" for v in self.column("outcome"))

    def grouped(self, column: str = "score") -> GroupedScores:
        outcomes = [float(v) for v in self.column("outcome")] if self.has_outcomes else None
        return GroupedScores(self.column("id"), [float(v) for v in self.column(column)],
                             self.column("group"), outcomes)

    def with_column(self, name: str, values) -> "ScoreTable":
        values = [fmt_float(v) for v in values]
        if name in self.header:
            i = self.header.index(name)
            rows = [r[:i] + [v] + r[i + 1:] for r, v in zip(self.rows, values)]
            return ScoreTable(list(self.header), rows, self.path)
        return ScoreTable(self.header + [name], [r + [v] for r, v in zip(self.rows, values)], self.path)


def _parse_score(cell: str, column: str, line: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"column {column!r}: {cell!r} is not a number", line) from None
    if not (math.isfinite(v) and 0.0 <= v <= 1.0):
        raise ParseError(f"column {column!r}: score {cell} is outside [0, 1]", line)
    return v


def parse_score_table(lines, path: str = "<memory>") -> ScoreTable:
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty file: header row missing", 1) from None
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise ParseError(f"required column {col!r} is missing from the header", 1)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header", 1)
    idx = {c: i for i, c in enumerate(header)}
    score_cols = [c for c in header if (c == "score" or c.startswith("score_"))]
    rows, seen = [], {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        rid = row[idx["id"]]
        if not rid:
            raise ParseError("empty id", line)
        if rid in seen:
            raise ParseError(f"duplicate id {rid!r} (first seen on line {seen[rid]})", line)
        seen[rid] = line
        if not row[idx["group"]]:
            raise ParseError(f"record {rid!r} has an empty group label", line)
        for c in score_cols:
            _parse_score(row[idx[c]], c, line)
        if "outcome" in idx and row[idx["outcome"]] not in ("", "0", "1", "0.0", "1.0"):
            raise ParseError(f"outcome {row[idx['outcome']]!r} is not 0 or 1", line)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", 2)
    return ScoreTable(header, rows, path)


def read_score_table(path) -> ScoreTable:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        return parse_score_table(f, str(path))


def write_score_table(table: ScoreTable, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(table.header)
        w.writerows(table.rows)


def dump_json(doc, path) -> None:
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_json(path):
    with Path(path).open(encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc.msg})", exc.lineno) from None
