"""Rendering of command artifacts as CSV files or aligned text.

Numbers are written with repr so CSV keeps full precision and never
depends on locale; identical artifacts always render to identical bytes.
"""

from __future__ import annotations

import csv
import enum
import io
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, TextIO

import numpy as np

from .commands import Artifacts, Table

FORMATS = ("csv", "text")


class ReportError(OSError):
    pass


def csv_cell(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, (float, np.floating, Fraction)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _text_cell(v) -> str:
    if isinstance(v, (float, np.floating, Fraction)):
        return f"{float(v):.6g}"
    return csv_cell(v)


def _header(art: Artifacts) -> List[str]:
    lines = [f"# {k}: {csv_cell(v)}" for k, v in art.metadata]
    lines += [f"# result.{k}: {csv_cell(v)}" for k, v in art.summary]
    lines += [f"# violation: {v}" for v in art.violations]
    lines.append(f"# status: {'pass' if art.ok else 'violation'}")
    return lines


def render_csv(art: Artifacts, table: Table) -> str:
    buf = io.StringIO()
    buf.write("\n".join(_header(art)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([csv_cell(v) for v in row])
    return buf.getvalue()


def render_table_text(table: Table) -> str:
    cells = [
        [table.text_format.get(col, _text_cell)(v) if v is not None or col in table.text_format else "n/a"
         for col, v in zip(table.columns, row)]
        for row in table.rows
    ]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(table.columns)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(table.columns, widths)).rstrip()]
    lines.append("  ".join("-" * wd for wd in widths))
    for r in cells:
        lines.append("  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip())
    return "\n".join(lines)


def render_text(art: Artifacts) -> str:
    out = [f"{art.command}: {art.scenario}", ""]
    out += [f"{k}: {csv_cell(v)}" for k, v in art.metadata]
    for t in art.tables:
        out += ["", f"[{t.name}]", render_table_text(t)]
    out += ["", "[summary]"]
    out += [f"{k}: {_text_cell(v)}" for k, v in art.summary]
    out += [f"violation: {v}" for v in art.violations]
    out.append(f"status: {'pass' if art.ok else 'violation'}")
    return "\n".join(out) + "\n"


def file_names(art: Artifacts, fmt: str) -> List[str]:
    if fmt == "text":
        return [f"{art.command}.txt"]
    return [art.command + ("" if i == 0 else f"_{t.name}") + ".csv" for i, t in enumerate(art.tables)]


def emit_report(art: Artifacts, fmt: str = "csv", out_dir=None, stream: Optional[TextIO] = None) -> List[Path]:
    """Write the artifacts to ``out_dir`` (one file per table for csv) or to ``stream``."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if fmt == "text":
        docs = [render_text(art)]
    else:
        docs = [render_csv(art, t) for t in art.tables] or ["\n".join(_header(art)) + "\n"]
    if out_dir is None:
        (stream or sys.stdout).write("\n".join(docs))
        return []
    out = Path(out_dir)
    names = file_names(art, fmt) or [f"{art.command}.csv"]
    paths = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, doc in zip(names, docs):
            path = out / name
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(doc)
            paths.append(path)
    except OSError as e:
        raise ReportError(f"cannot write report to {out}: {e.strerror or e}") from None
    return paths
