"""Reading and writing contexts: Burmeister ``.cxt`` files and scaled CSV tables."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .context import FormalContext, mask_of


class CxtFormatError(ValueError):
    pass


class ScalingError(ValueError):
    """Raised for unusable CSV input; carries the row/column where it happened."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.column = column


def parse_cxt(text: str) -> FormalContext:
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != "B":
        raise CxtFormatError("missing 'B' header line")
    if len(lines) < 4:
        raise CxtFormatError("truncated header")
    name = lines[1].strip()
    try:
        n_obj = int(lines[2])
        n_att = int(lines[3])
    except ValueError:
        raise CxtFormatError("object/attribute counts must be integers") from None
    if n_obj < 1 or n_att < 0:
        raise CxtFormatError(f"invalid counts {n_obj}, {n_att}")
    pos = 4
    if pos < len(lines) and lines[pos].strip() == "":
        pos += 1
    body = lines[pos:]
    expected = 2 * n_obj + n_att
    if len(body) < expected:
        raise CxtFormatError(f"expected {expected} lines after the header, found {len(body)}")
    if any(line.strip() for line in body[expected:]):
        raise CxtFormatError("trailing content after the incidence rows")
    objects = body[:n_obj]
    attributes = body[n_obj:n_obj + n_att]
    rows = []
    for g, line in enumerate(body[n_obj + n_att:expected]):
        line = line.rstrip()
        if len(line) != n_att:
            raise CxtFormatError(f"row {g + 1} has {len(line)} characters, expected {n_att}")
        bad = set(line) - {".", "X", "x"}
        if bad:
            raise CxtFormatError(f"row {g + 1} contains illegal characters {sorted(bad)}")
        rows.append(mask_of(i for i, c in enumerate(line) if c in "Xx"))
    try:
        return FormalContext(tuple(objects), tuple(attributes), tuple(rows), name=name)
    except ValueError as exc:
        raise CxtFormatError(str(exc)) from None


def write_cxt(ctx: FormalContext) -> str:
    out = ["B", ctx.name, str(ctx.n_objects), str(ctx.n_attributes), ""]
    out.extend(ctx.objects)
    out.extend(ctx.attributes)
    for r in ctx.rows:
        out.append("".join("X" if r >> m & 1 else "." for m in range(ctx.n_attributes)))
    return "\n".join(out) + "\n"


def read_cxt(path) -> FormalContext:
    return parse_cxt(Path(path).read_text(encoding="utf-8"))


def save_cxt(ctx: FormalContext, path) -> None:
    Path(path).write_text(write_cxt(ctx), encoding="utf-8", newline="\n")


# -- CSV scaling -------------------------------------------------------------

KINDS = ("nominal", "ordinal", "interval")


@dataclass(frozen=True)
class ColumnScale:
    kind: str = "nominal"
    breaks: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScalingError(f"unknown scale kind {self.kind!r}")
        if self.kind == "interval":
            if len(self.breaks) < 2:
                raise ScalingError("interval scaling needs at least two breakpoints")
            if any(a >= b for a, b in zip(self.breaks, self.breaks[1:])):
                raise ScalingError("interval breakpoints must be strictly increasing")


def load_scaling_spec(source) -> dict[str, ColumnScale]:
    """Read the JSON mapping ``column -> {"kind": ..., "breaks": [...]}``."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        raw = json.loads(Path(source).read_text(encoding="utf-8"))
    elif isinstance(source, str):
        raw = json.loads(source)
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ScalingError("scaling spec must be a JSON object")
    out = {}
    for col, entry in raw.items():
        if not isinstance(entry, dict):
            raise ScalingError("scale entry must be an object", column=col)
        out[col] = ColumnScale(entry.get("kind", "nominal"),
                               tuple(float(b) for b in entry.get("breaks", ())))
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def _number(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ScalingError(f"cannot read {cell!r} as a number", row, column) from None
    if math.isnan(value):
        raise ScalingError("NaN is not a scalable value", row, column)
    return value


def scale_table(header: list[str], records: list[list[str]],
                spec: dict[str, ColumnScale] | None = None,
                object_column: str | None = None) -> FormalContext:
    """Turn a many-valued table into a formal context.

    Columns missing from ``spec`` are scaled nominally. ``object_column``
    names the column holding object names; without it rows are named by
    their 0-based position. Repeated names get a ``#k`` suffix.
    Row numbers in errors count the header as row 1.
    """
    spec = dict(spec or {})
    unknown = [c for c in spec if c not in header]
    if unknown:
        raise ScalingError(f"scaling spec names unknown columns {unknown}")
    if object_column is not None and object_column not in header:
        raise ScalingError(f"object column {object_column!r} not in the table header")
    for i, rec in enumerate(records):
        if len(rec) != len(header):
            raise ScalingError(f"{len(rec)} cells for {len(header)} columns", row=i + 2)

    attributes: list[str] = []
    columns: list[list[int]] = []  # per attribute, the row indices having it

    for j, col in enumerate(header):
        if col == object_column:
            continue
        scale = spec.get(col, ColumnScale())
        cells = [rec[j].strip() for rec in records]
        if scale.kind == "nominal":
            values = list(dict.fromkeys(c for c in cells if c != ""))
            for v in values:
                attributes.append(f"{col}={v}")
                columns.append([i for i, c in enumerate(cells) if c == v])
            continue
        nums = [None if c == "" else _number(c, i + 2, col) for i, c in enumerate(cells)]
        if scale.kind == "ordinal":
            thresholds = scale.breaks or tuple(sorted({x for x in nums if x is not None}))
            for t in thresholds:
                attributes.append(f"{col}<={_fmt(t)}")
                columns.append([i for i, x in enumerate(nums) if x is not None and x <= t])
        else:
            b = scale.breaks
            for k in range(len(b) - 1):
                last = k == len(b) - 2
                lo, hi = b[k], b[k + 1]
                closer = "]" if last else ")"
                attributes.append(f"{col} in [{_fmt(lo)},{_fmt(hi)}{closer}")
                columns.append([i for i, x in enumerate(nums) if x is not None
                                and lo <= x and (x <= hi if last else x < hi)])

    if object_column is None:
        names = [str(i) for i in range(len(records))]
    else:
        j = header.index(object_column)
        names = [rec[j].strip() for rec in records]
    seen: dict[str, int] = {}
    unique = []
    for n in names:
        seen[n] = seen.get(n, 0) + 1
        unique.append(n if seen[n] == 1 else f"{n}#{seen[n]}")
    if len(set(unique)) != len(unique):
        raise ScalingError("object names collide even after suffixing")

    rows = [0] * len(records)
    for m, members in enumerate(columns):
        for i in members:
            rows[i] |= 1 << m
    return FormalContext(tuple(unique), tuple(attributes), tuple(rows))


def scale_csv(source, spec=None, object_column: str | None = None) -> FormalContext:
    """Scale a CSV (path or text) with a header row; see :func:`scale_table`."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8-sig")
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows:
        raise ScalingError("empty CSV")
    if spec is not None and not (isinstance(spec, dict)
                                 and all(isinstance(v, ColumnScale) for v in spec.values())):
        spec = load_scaling_spec(spec)
    return scale_table(rows[0], rows[1:], spec, object_column)
