"""Small shared helpers for deterministic text output.

Every CSV/TSV artifact is written with UNIX newlines, UTF-8 without BOM, and
floats rendered via ``fmt_float`` (12 significant digits) so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io


def fmt_float(x: float) -> str:
    """Render a float with 12 significant digits, stable across runs."""
    return "%.12g" % float(x)


def open_write(path: str):
    return open(path, "w", encoding="utf-8", newline="")


def open_read(path: str):
    return open(path, "r", encoding="utf-8", newline="")


def csv_writer(fh):
    # minimal quoting keeps files diffable; \n forced for byte-stability
    return csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)


def read_comment_header(fh) -> tuple[list[str], io.StringIO]:
    """Split leading ``#`` comment lines from the body of a tabular file.

    Returns the comment lines (stripped of the marker) and a StringIO over
    the remaining body suitable for csv.reader.
    """
    comments: list[str] = []
    body: list[str] = []
    in_head = True
    for line in fh:
        if in_head and line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            in_head = False
            body.append(line)
    return comments, io.StringIO("".join(body))
