"""CSV and SVG emission for sweep rows."""
import json
import math

from xml.sax.saxutils import escape

import numpy as np

from . import __version__

CSV_COLUMNS = ("axis_value", "mean_n", "g2", "g3", "g2_defined", "g3_defined",
               "residual", "fock_cutoff")


def _num(x) -> str:
    if x is None:
        return "nan"
    return format(float(x), ".17g")


def csv_text(rows, metadata: dict) -> str:
    """Comma-separated table with ``#`` metadata lines ahead of the header.

    Floats carry 17 significant digits so values round-trip exactly; the
    metadata holds no timestamps, keeping the bytes reproducible.
    """
    lines = [f"# cavityblockade {__version__}"]
    for key in sorted(metadata):
        lines.append(f"# {key}: {json.dumps(metadata[key], sort_keys=True)}")
    lines.append(",".join(CSV_COLUMNS))
    for r in rows:
        lines.append(",".join([
            _num(r.axis_value), _num(r.mean_n), _num(r.g2), _num(r.g3),
            str(int(r.g2_defined)), str(int(r.g3_defined)),
            _num(r.residual), str(r.fock_cutoff_used),
        ]))
    return "\n".join(lines) + "\n"


def read_csv(path) -> dict:
    """Columns of a CSV written by :func:`csv_text`, plus the parsed metadata."""
    meta, header, data = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                meta[key] = json.loads(value) if value else None
            elif header is None:
                header = line.split(",")
            elif line:
                data.append([float(v) for v in line.split(",")])
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    out = {name: arr[:, i] for i, name in enumerate(header)}
    out["metadata"] = meta
    return out


def _polylines(xs, ys, to_px):
    """Path segments, broken wherever y is not finite."""
    segs, cur = [], []
    for x, y in zip(xs, ys):
        if y is None or not math.isfinite(y):
            if len(cur) > 1:
                segs.append(cur)
            cur = []
            continue
        cur.append(to_px(x, y))
    if len(cur) > 1:
        segs.append(cur)
    return [" ".join(f"{px:.2f},{py:.2f}" for px, py in seg) for seg in segs]


def svg_text(rows, title: str, axis_label: str) -> str:
    """Two-panel line plot: mean photon number (linear) over log10 g2/g3."""
    width, height, margin = 640, 520, 60
    panel_h = (height - 3 * margin) / 2
    xs = [r.axis_value for r in rows]
    x0, x1 = min(xs), max(xs)
    n = [r.mean_n for r in rows]
    log = lambda v: math.log10(v) if v is not None and v > 0 else None
    g2 = [log(r.g2) for r in rows]
    g3 = [log(r.g3) for r in rows]

    def panel(top, values_list, colors, label):
        finite = [v for vs in values_list for v in vs if v is not None and math.isfinite(v)]
        lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
        if label.startswith("log"):
            lo, hi = min(lo, 0.0), max(hi, 0.0)
        if hi == lo:
            hi = lo + 1.0

        def to_px(x, y):
            return (margin + (x - x0) / (x1 - x0) * (width - 2 * margin),
                    top + panel_h - (y - lo) / (hi - lo) * panel_h)

        out = [f'<rect x="{margin}" y="{top:.2f}" width="{width - 2 * margin}" '
               f'height="{panel_h:.2f}" fill="none" stroke="black"/>',
               f'<text x="10" y="{top + panel_h / 2:.2f}" font-size="12">{escape(label)}</text>',
               f'<text x="{margin}" y="{top - 4:.2f}" font-size="10">{hi:.3g}</text>',
               f'<text x="{margin}" y="{top + panel_h + 12:.2f}" font-size="10">{lo:.3g}</text>']
        if label.startswith("log"):
            _, yz = to_px(x0, 0.0)
            out.append(f'<line x1="{margin}" y1="{yz:.2f}" x2="{width - margin}" y2="{yz:.2f}" '
                       'stroke="black" stroke-dasharray="6,3,1,3"/>')
        for values, color in zip(values_list, colors):
            for pts in _polylines(xs, values, to_px):
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}"/>')
        return out

    body = [f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>']
    body += panel(margin, [n], ["blue"], "<n>")
    body += panel(2 * margin + panel_h, [g2, g3], ["green", "red"], "log10 g2, g3")
    body.append(f'<text x="{width / 2:.0f}" y="{height - 15}" text-anchor="middle" '
                f'font-size="12">{escape(axis_label)} [kappa]</text>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
            + "\n".join(body) + "\n</svg>\n")
