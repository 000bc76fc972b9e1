"""CSV output for study reports."""

from __future__ import annotations

import csv
import io


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


CONVERGENCE_COLUMNS = ("x", "n", "raw_error", "residual", "near_mass", "far_mass",
                       "scaled_residual")


def _table(report):
    if hasattr(report, "table"):
        return report.table()
    # A bare list of convergence records: rows only, no summary.
    rows = [(r.x, r.n, r.raw_error, r.residual, r.near_mass, r.far_mass, r.scaled_residual)
            for r in sorted(report, key=lambda r: (r.x, r.n))]
    return CONVERGENCE_COLUMNS, rows, []


def render_csv(report) -> str:
    columns, rows, summary = _table(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    for line in summary:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def emit_csv(report, path) -> None:
    """Write ``report`` as CSV: header, rows, then ``#`` summary lines.

    ``report`` is a study report or a plain list of convergence records.
    """
    text = render_csv(report)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
