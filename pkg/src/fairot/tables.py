"""Neutral-prediction tables: the transformed score at fixed score levels, per group."""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal

from .barycenter import BarycenterTransform, ScalingTransform, apply_barycenter
from .errors import DomainError, UnknownGroupError


def format_percent(value: float) -> str:
    """Percentage with two decimals, e.g. ``0.0556 -> '5.56%'``.

    Values are first cut to 10 decimals so float noise such as
    ``9.454999999999998`` rounds like the decimal number it stands for;
    ties go to even.
    """
    pct = Decimal(f"{value * 100:.10f}")
    return f"{pct.quantize(Decimal('0.01'), rounding=ROUND_HALF_EVEN)}%"


def format_level(level: float) -> str:
    pct = Decimal(f"{level * 100:.10f}").normalize()
    return f"m(x)={pct:f}%"


def column_name(name: str, transform, group: str) -> str:
    if isinstance(transform, ScalingTransform):
        return f"x{transform.factor(group):.2f}"
    return name


def neutral_value(transform, level: float, group: str) -> float:
    if isinstance(transform, ScalingTransform):
        return min(max(transform.factor(group) * level, 0.0), 1.0)
    if isinstance(transform, BarycenterTransform):
        return apply_barycenter(transform, level, group)
    raise TypeError(f"unsupported transform {type(transform).__name__}")


def neutral_table(transforms, levels):
    """Build the table.

    Parameters
    ----------
    transforms : sequence of (name, transform)
        Columns, in order, within each group block.
    levels : sequence of float
        Score levels in ``[0, 1]``.

    Returns
    -------
    groups : list of str
    headers : list of (group, column name)
    rows : list of (level label, list of percent strings)
    """
    for lv in levels:
        if not 0.0 <= lv <= 1.0:
            raise DomainError(f"level {lv} is outside [0, 1]")
    groups = []
    for _, t in transforms:
        for g in t.labels:
            if g not in groups:
                groups.append(g)
    groups.sort()
    for name, t in transforms:
        missing = [g for g in groups if g not in t.labels]
        if missing:
            raise UnknownGroupError(f"transform {name!r} has no group {missing[0]!r}")
    headers = [(g, column_name(name, t, g)) for g in groups for name, t in transforms]
    rows = []
    for lv in levels:
        cells = [format_percent(neutral_value(t, lv, g)) for g in groups for _, t in transforms]
        rows.append((format_level(lv), cells))
    return groups, headers, rows


def render_text(groups, headers, rows) -> str:
    ncol = len(headers) // max(len(groups), 1)
    label_w = max([len("score")] + [len(r[0]) for r in rows])
    cell_w = max([7] + [len(h[1]) for h in headers] + [len(c) for _, cells in rows for c in cells])
    block_w = ncol * (cell_w + 1) - 1
    lines = [
        " " * label_w + " | " + " | ".join(g.center(block_w) for g in groups),
        "score".ljust(label_w) + " | " + " | ".join(
            " ".join(h[1].rjust(cell_w) for h in headers[i * ncol:(i + 1) * ncol]) for i in range(len(groups))
        ),
    ]
    lines.insert(1, "-" * len(lines[0]))
    for label, cells in rows:
        lines.append(label.ljust(label_w) + " | " + " | ".join(
            " ".join(c.rjust(cell_w) for c in cells[i * ncol:(i + 1) * ncol]) for i in range(len(groups))
        ))
    return "\n".join(lines) + "\n"


def render_csv_rows(headers, rows):
    out = [["level"] + [f"{g}:{name}" for g, name in headers]]
    out += [[label] + list(cells) for label, cells in rows]
    return out
