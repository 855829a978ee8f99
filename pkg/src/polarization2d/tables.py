"""Delimited output: tensor CSV, generic CSV/JSON tables and plot-data series.

Every file starts with ``#`` metadata lines (``key=value``), written in a
fixed order so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import ConfigError

__all__ = [
    "TENSOR_COLUMNS",
    "Series",
    "fmt_number",
    "tensor_rows",
    "write_table",
    "read_tensor_csv",
    "write_plot_data",
    "read_plot_data",
]

TENSOR_COLUMNS = ("mu_re", "mu_im", "M11_re", "M11_im", "M12_re", "M12_im",
                  "M22_re", "M22_im", "method", "n", "condition_warning")


def fmt_number(v):
    """Shortest round-tripping text for floats; ints and strings as is."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if v == 0.0:
            return "0"
        return repr(v)
    return str(v)


def tensor_rows(tensors, n):
    """Rows in the sweep schema for a list of ``PolTensor``."""
    rows = []
    for t in tensors:
        m = t.m
        rows.append({
            "mu_re": t.mu.real, "mu_im": t.mu.imag,
            "M11_re": m[0, 0].real, "M11_im": m[0, 0].imag,
            "M12_re": m[0, 1].real, "M12_im": m[0, 1].imag,
            "M22_re": m[1, 1].real, "M22_im": m[1, 1].imag,
            "method": t.method, "n": int(n), "condition_warning": bool(t.condition_warning),
        })
    return rows


def _meta_lines(meta):
    return [f"# {k}={fmt_number(v)}" for k, v in meta]


def write_table(rows, columns, meta, fmt="csv"):
    """Render ``rows`` (dicts) as CSV or JSON text.

    ``meta`` is a sequence of ``(key, value)`` pairs; JSON mirrors the CSV
    fields under ``rows`` and puts ``meta`` in a ``metadata`` object.
    """
    if fmt == "json":
        doc = {"metadata": {k: _json_value(v) for k, v in meta},
               "columns": list(columns),
               "rows": [[_json_value(r[c]) for c in columns] for r in rows]}
        return json.dumps(doc, indent=2, sort_keys=False, default=_json_value) + "\n"
    buf = io.StringIO()
    for line in _meta_lines(meta):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt_number(r[c]) for c in columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if np.isfinite(v) else str(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def read_tensor_csv(path):
    """Samples ``[(mu, 2x2 complex array), ...]`` from a sweep CSV file."""
    try:
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#") and ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read samples {path}: {exc.strerror}") from None
    reader = csv.DictReader(lines)
    missing = [c for c in TENSOR_COLUMNS[:8] if c not in (reader.fieldnames or [])]
    if missing:
        raise ConfigError(f"sample file lacks columns {', '.join(missing)}")
    samples = []
    for i, row in enumerate(reader, start=2):
        try:
            v = {c: float(row[c]) for c in TENSOR_COLUMNS[:8]}
        except (TypeError, ValueError):
            raise ConfigError("non-numeric entry in sample file", line=i) from None
        mu = complex(v["mu_re"], v["mu_im"])
        m11 = complex(v["M11_re"], v["M11_im"])
        m12 = complex(v["M12_re"], v["M12_im"])
        m22 = complex(v["M22_re"], v["M22_im"])
        samples.append((mu, np.array([[m11, m12], [m12, m22]])))
    return samples


class Series:
    """A named ``(x, y)`` series with axis labels."""

    def __init__(self, name, x, y, xlabel="x", ylabel="y", style="line"):
        self.name = name
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.style = style

    def __repr__(self):
        return f"Series({self.name!r}, {len(self.x)} points)"


def write_plot_data(series, meta):
    """Two-column blocks separated by blank lines, each with comment headers."""
    out = _meta_lines(meta)
    for s in series:
        out.append("")
        out.append(f"# series={s.name}")
        out.append(f"# style={s.style}")
        out.append(f"# x={s.xlabel} y={s.ylabel}")
        out.extend(f"{fmt_number(x)} {fmt_number(y)}" for x, y in zip(s.x, s.y))
    return "\n".join(out) + "\n"


def read_plot_data(text):
    """Inverse of :func:`write_plot_data`: ``(metadata dict, list of Series)``."""
    meta, blocks = {}, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key == "series":
                blocks.append({"name": value, "style": "line", "pts": []})
            elif key == "style" and blocks:
                blocks[-1]["style"] = value
            elif key == "x" and blocks:
                blocks[-1]["xlabel"], blocks[-1]["ylabel"] = value.split(" y=")
            elif not blocks:
                meta[key] = value
            continue
        blocks[-1]["pts"].append([float(v) for v in line.split()])
    series = []
    for b in blocks:
        pts = np.array(b["pts"], dtype=float).reshape(-1, 2)
        series.append(Series(b["name"], pts[:, 0], pts[:, 1], b.get("xlabel", "x"),
                             b.get("ylabel", "y"), b["style"]))
    return meta, series
