"""Hand-rolled SVG output for the three report figures.

No plotting library: the files must be byte-identical across runs, so
every coordinate is formatted through one fixed-precision helper and
element order is fully determined by the input. Only plain SVG 1.1
shapes are emitted and nothing references external assets.
"""

from __future__ import annotations

from typing import Optional, Sequence

_COLOR_A = "#7a5c2e"
_COLOR_B = "#31506b"
_COLOR_BAND = "#c9d7e4"
_COLOR_RULE = "#8a3434"
_FONT = "Georgia, 'Times New Roman', serif"


def _n(x: float) -> str:
    s = f"{x:.2f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _text(x, y, s, size=11, anchor="start", color="#222", extra=""):
    return (
        f'<text x="{_n(x)}" y="{_n(y)}" font-family="{_FONT}" font-size="{size}" '
        f'text-anchor="{anchor}" fill="{color}"{extra}>{_esc(s)}</text>'
    )


def _open(width: int, height: int, title: str) -> list[str]:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f"<title>{_esc(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#fdfcf8"/>',
    ]
    if title:
        parts.append(_text(width / 2, 20, title, size=14, anchor="middle"))
    return parts


def _placeholder(width: int, height: int, title: str) -> str:
    parts = _open(width, height, title)
    parts.append(_text(width / 2, height / 2, "no data", size=12, anchor="middle", color="#777"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _zeta_bars(data, options) -> str:
    top_k = int(options.get("top_k", 25))
    width = int(options.get("width", 760))
    title = options.get("title", "Zeta keyness")
    pairs = [(s.feature, s.zeta) if hasattr(s, "zeta") else (s[0], s[1]) for s in data]
    if not pairs:
        return _placeholder(width, 220, title)
    by_desc = sorted(pairs, key=lambda fv: (-fv[1], fv[0]))[:top_k]
    by_asc = sorted(pairs, key=lambda fv: (fv[1], fv[0]))[:top_k]
    shown = by_desc + by_asc
    bar_h, gap = 13.0, 4.0
    top, bottom, side = 56.0, 26.0, 24.0
    block_gap = 18.0
    height = int(top + bottom + len(shown) * (bar_h + gap) + block_gap)
    mid = width / 2.0
    scale_max = max(1e-9, max(abs(v) for _, v in shown))
    half = (width / 2.0) - side - 120.0

    parts = _open(width, height, title)
    parts.append(_text(side, 38, "preferred in A", size=11, color=_COLOR_A))
    parts.append(_text(width - side, 38, "preferred in B", size=11, anchor="end", color=_COLOR_B))
    y = top
    axis_top, axis_bot = top - 6.0, 0.0
    for block, color, to_right in ((by_desc, _COLOR_A, True), (by_asc, _COLOR_B, False)):
        for feat, val in block:
            w = abs(val) / scale_max * half
            if to_right:
                x0 = mid
                label_x, label_anchor = mid - 6.0, "end"
                val_x, val_anchor = mid + w + 5.0, "start"
            else:
                x0 = mid - w
                label_x, label_anchor = mid + 6.0, "start"
                val_x, val_anchor = mid - w - 5.0, "end"
            parts.append(
                f'<rect x="{_n(x0)}" y="{_n(y)}" width="{_n(max(w, 0.5))}" '
                f'height="{_n(bar_h)}" fill="{color}"/>'
            )
            parts.append(_text(label_x, y + bar_h - 3, feat, size=11, anchor=label_anchor))
            parts.append(
                _text(val_x, y + bar_h - 3, f"{val:+.3f}", size=9,
                      anchor=val_anchor, color="#666")
            )
            y += bar_h + gap
        y += block_gap
    axis_bot = y - block_gap
    parts.insert(
        3,
        f'<line x1="{_n(mid)}" y1="{_n(axis_top)}" x2="{_n(mid)}" '
        f'y2="{_n(axis_bot)}" stroke="#999" stroke-width="1"/>',
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _mdi_bars(data, options) -> str:
    top_k = int(options.get("top_k", 25))
    width = int(options.get("width", 640))
    title = options.get("title", "Feature importance (MDI)")
    pairs = [(f, v) for f, v in data][:top_k]
    if not pairs:
        return _placeholder(width, 200, title)
    bar_h, gap = 13.0, 4.0
    top, bottom = 40.0, 18.0
    label_w, side = 150.0, 20.0
    height = int(top + bottom + len(pairs) * (bar_h + gap))
    scale_max = max(1e-12, max(v for _, v in pairs))
    span = width - label_w - 2 * side - 70.0

    parts = _open(width, height, title)
    y = top
    for feat, val in pairs:
        w = val / scale_max * span
        parts.append(_text(side + label_w - 6.0, y + bar_h - 3, feat, size=11, anchor="end"))
        parts.append(
            f'<rect x="{_n(side + label_w)}" y="{_n(y)}" width="{_n(max(w, 0.5))}" '
            f'height="{_n(bar_h)}" fill="{_COLOR_B}"/>'
        )
        parts.append(
            _text(side + label_w + w + 5.0, y + bar_h - 3, f"{val:.4f}", size=9, color="#666")
        )
        y += bar_h + gap
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _runs(points) -> list[list]:
    """Contiguous runs of non-skipped points."""
    runs, cur = [], []
    for p in points:
        if p.skipped:
            if cur:
                runs.append(cur)
            cur = []
        else:
            cur.append(p)
    if cur:
        runs.append(cur)
    return runs


def _drift_curve(data, options) -> str:
    width = int(options.get("width", 820))
    height = int(options.get("height", 340))
    title = options.get("title", "Stylometric drift")
    if hasattr(data, "points"):
        points = list(data.points)
        boundaries = list(getattr(data, "boundaries", ()))
    else:
        points = list(data.get("points", []))
        boundaries = list(data.get("boundaries", []))
    if not points or all(p.skipped for p in points):
        return _placeholder(width, height, title)

    left, right, top, bottom = 64.0, 24.0, 44.0, 44.0
    plot_w, plot_h = width - left - right, height - top - bottom
    n = len(points)
    xstep = plot_w / max(1, n - 1)
    ymax = max(p.p95 for p in points if not p.skipped)
    ymax = ymax * 1.08 if ymax > 0 else 1.0

    def xpos(i: int) -> float:
        return left + (i * xstep if n > 1 else plot_w / 2.0)

    def ypos(v: float) -> float:
        return top + plot_h - (v / ymax) * plot_h

    parts = _open(width, height, title)
    # axes
    parts.append(
        f'<line x1="{_n(left)}" y1="{_n(top + plot_h)}" x2="{_n(left + plot_w)}" '
        f'y2="{_n(top + plot_h)}" stroke="#444" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_n(left)}" y1="{_n(top)}" x2="{_n(left)}" '
        f'y2="{_n(top + plot_h)}" stroke="#444" stroke-width="1"/>'
    )
    for frac in (0.0, 0.5, 1.0):
        v = ymax * frac
        parts.append(_text(left - 8.0, ypos(v) + 4, f"{v:.3g}", size=10, anchor="end"))
    # x tick labels are 1-based sample numbers
    tick_step = max(1, n // 12)
    ticks = sorted(set(list(range(0, n, tick_step)) + [n - 1]))
    for i in ticks:
        parts.append(
            _text(xpos(i), top + plot_h + 16.0, str(i + 1), size=10, anchor="middle")
        )
    parts.append(
        _text(left + plot_w / 2.0, height - 8.0, "sample pair", size=11, anchor="middle")
    )
    for run in _runs(points):
        up = [f"{_n(xpos(p.pair_index))},{_n(ypos(p.p95))}" for p in run]
        down = [f"{_n(xpos(p.pair_index))},{_n(ypos(p.p05))}" for p in reversed(run)]
        parts.append(
            f'<polygon points="{" ".join(up + down)}" fill="{_COLOR_BAND}" '
            f'fill-opacity="0.75" stroke="none"/>'
        )
    for run in _runs(points):
        pts = " ".join(f"{_n(xpos(p.pair_index))},{_n(ypos(p.median))}" for p in run)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{_COLOR_B}" stroke-width="1.6"/>'
        )
    for idx, label in boundaries:
        x = xpos(idx)
        parts.append(
            f'<line x1="{_n(x)}" y1="{_n(top - 4.0)}" x2="{_n(x)}" '
            f'y2="{_n(top + plot_h)}" stroke="{_COLOR_RULE}" stroke-width="1" '
            f'stroke-dasharray="4,3"/>'
        )
        parts.append(_text(x + 4.0, top + 6.0, label, size=10, color=_COLOR_RULE))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_svg(kind: str, data, options: Optional[dict] = None) -> str:
    """Render one figure to an SVG string.

    Kinds: ``zeta_bars`` (two-sided keyness bars), ``mdi_bars`` (ranked
    importances), ``drift_curve`` (median line with percentile band and
    optional boundary rules). Empty data renders a valid placeholder.
    """
    options = dict(options or {})
    if kind == "zeta_bars":
        return _zeta_bars(data, options)
    if kind == "mdi_bars":
        return _mdi_bars(data, options)
    if kind == "drift_curve":
        return _drift_curve(data, options)
    raise ValueError(f"unknown figure kind {kind!r}")


def write_svg(kind: str, data, path: str, options: Optional[dict] = None):
    content = render_svg(kind, data, options)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)
