"""CSV output with ``#`` metadata lines and 17 significant digits."""
from __future__ import annotations

import csv
import io
import subprocess
from pathlib import Path


def fmt(value):
    """Render one cell; floats get 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    try:
        return format(float(value), ".17g")
    except (TypeError, ValueError):
        return str(value)


def git_describe(default="unknown"):
    """``git describe --always --dirty`` of the source tree, or ``default``."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).resolve().parent)
    except (OSError, subprocess.SubprocessError):
        return default
    return out.stdout.strip() or default


def render(header, rows, meta=None) -> str:
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key} = {fmt(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write(path, header, rows, meta=None):
    """Write to ``path``; ``None`` or ``"-"`` prints to stdout instead."""
    text = render(header, rows, meta)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return text


def read(path):
    """Parse a file written by :func:`write` into ``(meta, header, rows)``; cells stay strings."""
    meta, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif line:
            lines.append(line)
    rows = list(csv.reader(lines))
    return meta, rows[0] if rows else [], rows[1:]
