"""Deterministic run manifests and shape export.

All numeric output is formatted with 12 significant decimal digits and
written atomically (temp file + rename), so identical configurations produce
byte-identical files.  Wall-clock timings go to a sidecar file, never into
the manifest itself.
"""

from __future__ import annotations

import os
import sys
import tempfile

import numpy as np

__all__ = [
    "format_float",
    "to_canonical_json",
    "write_atomic",
    "versions",
    "export_svg",
]

FLOAT_FORMAT = ".12g"


def format_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    return format(float(x), FLOAT_FORMAT)


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def to_canonical_json(obj, indent: int = 0) -> str:
    """JSON text with fixed float formatting and stable key order."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, np.ndarray):
        return to_canonical_json(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad_in}"{_escape(str(k))}": {to_canonical_json(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad_in + to_canonical_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_atomic(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def versions() -> dict:
    import scipy

    from . import __version__

    return {
        "eigenperim": __version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


# ---------------------------------------------------------------------------
# SVG export
# ---------------------------------------------------------------------------

def _fmt6(x: float) -> str:
    return f"{x:.6f}"


def _path_of(vertices, close: bool = True) -> str:
    parts = [f"M {_fmt6(vertices[0][0])} {_fmt6(vertices[0][1])}"]
    for x, y in vertices[1:]:
        parts.append(f"L {_fmt6(x)} {_fmt6(y)}")
    if close:
        parts.append("Z")
    return " ".join(parts)


def export_svg(polygon, path=None, facets=(), corners=(), wulff=None,
               size: int = 480) -> str:
    """Deterministic SVG of a shape with optional feature overlays.

    Facets are highlighted segments, corners are marked points, and a second
    outline can be drawn for homothety comparison.  Fixed precision and
    element order make repeated exports byte-identical.
    """
    all_pts = [np.asarray(polygon.vertices)]
    if wulff is not None:
        all_pts.append(np.asarray(wulff.vertices))
    pts = np.concatenate(all_pts)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    margin = 0.08 * span
    # flip y so the math orientation renders upright
    def txy(p):
        return (p[0], (lo[1] + hi[1]) - p[1])

    view = (
        f"{_fmt6(lo[0] - margin)} {_fmt6(lo[1] - margin)} "
        f"{_fmt6(hi[0] - lo[0] + 2 * margin)} {_fmt6(hi[1] - lo[1] + 2 * margin)}"
    )
    stroke = span / 240.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{view}">',
        f'<path d="{_path_of([txy(v) for v in polygon.vertices])}" '
        f'fill="#dce9f5" stroke="#1f3a5f" stroke-width="{_fmt6(stroke)}"/>',
    ]
    if wulff is not None:
        lines.append(
            f'<path d="{_path_of([txy(v) for v in wulff.vertices])}" fill="none" '
            f'stroke="#888888" stroke-width="{_fmt6(stroke)}" '
            f'stroke-dasharray="{_fmt6(4 * stroke)} {_fmt6(3 * stroke)}"/>'
        )
    for f in facets:
        a, b = txy(f.start), txy(f.end)
        lines.append(
            f'<line x1="{_fmt6(a[0])}" y1="{_fmt6(a[1])}" x2="{_fmt6(b[0])}" '
            f'y2="{_fmt6(b[1])}" stroke="#c03020" stroke-width="{_fmt6(2.2 * stroke)}"/>'
        )
    for c in corners:
        x, y = txy(c.point)
        lines.append(
            f'<circle cx="{_fmt6(x)}" cy="{_fmt6(y)}" r="{_fmt6(3 * stroke)}" '
            f'fill="#c03020"/>'
        )
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if path is not None:
        write_atomic(path, text)
    return text
