"""Comma-delimited tables with a one-line ``name (unit)`` header.

Floats are written with 9 significant digits; NaN marks a gap.  Files are
written atomically (temporary file + rename).
"""
from __future__ import annotations

import csv
import io
import math
import os
import re
import tempfile

import numpy as np

from .model import IrregularSeries

_HEADER = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$")
ASSAY_FLOOR = 0.2  # ng/ml


class TableFormatError(ValueError):
    pass


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "NaN"
    return f"{v:.9g}"


def render(columns, rows):
    """``columns`` is a list of (name, unit-or-None); ``rows`` an iterable of tuples."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{n} ({u})" if u else n for n, u in columns])
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path, columns, rows):
    write_atomic(path, render(columns, rows))


def parse_header(fields):
    cols = []
    for f in fields:
        m = _HEADER.match(f)
        if not m:
            raise TableFormatError(f"line 1: bad column header {f!r}")
        cols.append((m.group(1), (m.group(2) or "").strip() or None))
    return cols


def read_table(path):
    """Returns (columns, rows) with every cell kept as a string."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableFormatError(f"{path}: empty file") from None
        cols = parse_header(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise TableFormatError(f"{path}: line {lineno}: expected {len(cols)} "
                                       f"fields, got {len(row)}")
            rows.append((lineno, row))
    return cols, rows


def to_float(text, path, lineno, name):
    try:
        return float(text)
    except ValueError:
        raise TableFormatError(f"{path}: line {lineno}: column {name!r}: "
                               f"not a number: {text!r}") from None


_TIME_UNITS = {"h": 1.0, "d": 24.0}


def import_series(path, fmt="long", assay_floor=ASSAY_FLOOR):
    """Read assay series, one per animal, as {animal: IrregularSeries} (hours, ng/ml).

    The ``long`` format has columns ``[animal,] time (h|d), lh (ng/ml)``.
    Samples below ``assay_floor`` are kept and flagged in ``below_floor``.
    """
    if fmt != "long":
        raise TableFormatError(f"unsupported series format {fmt!r}")
    cols, rows = read_table(path)
    names = [c[0] for c in cols]
    if "time" not in names or "lh" not in names:
        raise TableFormatError(f"{path}: line 1: need 'time' and 'lh' columns, got {names}")
    t_unit = cols[names.index("time")][1] or "h"
    if t_unit not in _TIME_UNITS:
        raise TableFormatError(f"{path}: line 1: time unit must be h or d, got {t_unit!r}")
    scale = _TIME_UNITS[t_unit]
    i_t, i_v = names.index("time"), names.index("lh")
    i_a = names.index("animal") if "animal" in names else None
    series = {}
    for lineno, row in rows:
        animal = row[i_a].strip() if i_a is not None else "1"
        t = to_float(row[i_t], path, lineno, "time") * scale
        v = to_float(row[i_v], path, lineno, "lh")
        if not (math.isfinite(t) and math.isfinite(v)):
            raise TableFormatError(f"{path}: line {lineno}: non-finite value")
        entry = series.setdefault(animal, ([], [], []))
        if entry[0] and t <= entry[0][-1]:
            what = "duplicated" if t == entry[0][-1] else "non-monotone"
            raise TableFormatError(f"{path}: line {lineno}: {what} timestamp {row[i_t]!r} "
                                   f"for animal {animal!r}")
        entry[0].append(t)
        entry[1].append(v)
        entry[2].append(lineno)
    out = {}
    for animal, (t, v, _) in series.items():
        v = np.array(v)
        out[animal] = IrregularSeries(np.array(t), v, below_floor=v < assay_floor)
    return out


def export_series(path, series):
    """Write {animal: IrregularSeries} in the ``long`` format (hours)."""
    rows = [(animal, t, v) for animal, s in series.items()
            for t, v in zip(s.times, s.values)]
    write_table(path, [("animal", None), ("time", "h"), ("lh", "ng/ml")], rows)
