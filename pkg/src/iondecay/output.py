"""CSV and SVG writers for time series and phase-space grids."""

import io
import math

import numpy as np

TIMESERIES_HEADER = "t_s,p_down,sigma_z,mean_n"
GRID_HEADER = "re,im,p"


def fmt(x):
    """Shortest decimal for ``x`` with at most 9 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.9g}"


def header_lines(config_items, derived=None):
    lines = ["# iondecay scenario"]
    lines += [f"# {k} = {v}" for k, v in config_items]
    for k, v in (derived or {}).items():
        lines.append(f"# derived {k} = {fmt(v)}")
    return lines


def timeseries_csv(series, header=()):
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(TIMESERIES_HEADER + "\n")
    for row in zip(series.times, series.p_down, series.sigma_z, series.mean_n):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def grid_csv(re, im, values, header=()):
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(GRID_HEADER + "\n")
    for j, y in enumerate(im):
        for i, x in enumerate(re):
            buf.write(f"{fmt(x)},{fmt(y)},{fmt(values[j, i])}\n")
    return buf.getvalue()


def read_csv(path):
    with open(path) as fh:
        return parse_csv(fh.read())


def parse_csv(text):
    """Split CSV text written by this module into ``(comments, columns, data)``."""
    comments, rows, columns = [], [], None
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif columns is None:
            columns = line.strip().split(",")
        elif line.strip():
            rows.append([float(v) for v in line.split(",")])
    return comments, columns, np.array(rows, dtype=float)


def read_two_column(path):
    """Load a user ``x,y`` CSV (header and ``#`` comments optional)."""
    xs, ys = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(";", ",").split(",")
            try:
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
            except (ValueError, IndexError):
                continue
    return np.array(xs), np.array(ys)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_WIDTH, _HEIGHT = 720, 440
_MARGIN = dict(left=70, right=20, top=40, bottom=55)
_COLORS = ["#1f3b73", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e"]


def _nice_ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v / step) * step)
        v += step
    return ticks


class _Frame:
    def __init__(self, x_range, y_range):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.left = _MARGIN["left"]
        self.right = _WIDTH - _MARGIN["right"]
        self.top = _MARGIN["top"]
        self.bottom = _HEIGHT - _MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def axes(self, xlabel, ylabel, title):
        out = [
            f'<rect x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
            f'height="{self.bottom - self.top}" fill="none" stroke="#000"/>'
        ]
        for t in _nice_ticks(self.x0, self.x1):
            x = self.px(t)
            out.append(f'<line x1="{x:.2f}" y1="{self.bottom}" x2="{x:.2f}" '
                       f'y2="{self.bottom + 5}" stroke="#000"/>')
            out.append(f'<text x="{x:.2f}" y="{self.bottom + 20}" '
                       f'text-anchor="middle">{fmt(t)}</text>')
        for t in _nice_ticks(self.y0, self.y1):
            y = self.py(t)
            out.append(f'<line x1="{self.left - 5}" y1="{y:.2f}" x2="{self.left}" '
                       f'y2="{y:.2f}" stroke="#000"/>')
            out.append(f'<text x="{self.left - 8}" y="{y + 4:.2f}" '
                       f'text-anchor="end">{fmt(t)}</text>')
        cx = 0.5 * (self.left + self.right)
        cy = 0.5 * (self.top + self.bottom)
        out.append(f'<text x="{cx:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">'
                   f'{_escape(xlabel)}</text>')
        out.append(f'<text x="18" y="{cy:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 18 {cy:.1f})">{_escape(ylabel)}</text>')
        if title:
            out.append(f'<text x="{cx:.1f}" y="24" text-anchor="middle" '
                       f'font-weight="bold">{_escape(title)}</text>')
        return out


def _escape(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _document(body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
            f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}" '
            f'font-family="sans-serif" font-size="12">')
    return "\n".join([head, f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#fff"/>',
                      *body, "</svg>"]) + "\n"


def svg_lines(curves, xlabel="t (us)", ylabel="P_down", title="", x_scale=1e6,
              y_range=None, points=()):
    """Line plot; ``curves`` is a list of ``(label, x, y)`` and ``points`` of
    ``(label, x, y)`` drawn as markers (e.g. user-supplied data).
    """
    if not curves and not points:
        raise ValueError("nothing to plot")
    xs = np.concatenate([np.asarray(c[1], float) for c in (*curves, *points)]) * x_scale
    ys = np.concatenate([np.asarray(c[2], float) for c in (*curves, *points)])
    ys = ys[np.isfinite(ys)]
    if y_range is None:
        lo, hi = float(ys.min()), float(ys.max())
        pad = 0.05 * (hi - lo) if hi > lo else 0.5
        y_range = (lo - pad, hi + pad)
    x_range = (float(xs.min()), float(xs.max()))
    if x_range[1] == x_range[0]:
        x_range = (x_range[0] - 0.5, x_range[1] + 0.5)
    frame = _Frame(x_range, y_range)
    body = frame.axes(xlabel, ylabel, title)
    for i, (label, x, y) in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{frame.px(a * x_scale):.2f},{frame.py(b):.2f}"
                       for a, b in zip(x, y) if np.isfinite(b))
        dash = ' stroke-dasharray="4 3"' if i > 0 else ""
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.3"{dash} '
                    f'points="{pts}"/>')
        body.append(f'<text x="{frame.right - 8}" y="{frame.top + 16 + 16 * i}" '
                    f'text-anchor="end" fill="{color}">{_escape(label)}</text>')
    for label, x, y in points:
        for a, b in zip(x, y):
            body.append(f'<circle cx="{frame.px(a * x_scale):.2f}" '
                        f'cy="{frame.py(b):.2f}" r="2" fill="#555"/>')
    return _document(body)


def svg_series(series_list, labels=None, title="", points=()):
    labels = labels or [f"series {i}" for i in range(len(series_list))]
    curves = [(lab, s.times, s.p_down) for lab, s in zip(labels, series_list)]
    return svg_lines(curves, title=title, y_range=(0.0, 1.0), points=points)


def svg_grid(re, im, values, title="", max_cells=100):
    """Grayscale cell map of a nonnegative grid (darker = larger)."""
    if values.size == 0:
        raise ValueError("nothing to plot")
    step_re = max(1, math.ceil(len(re) / max_cells))
    step_im = max(1, math.ceil(len(im) / max_cells))
    re_s, im_s = re[::step_re], im[::step_im]
    vals = values[::step_im, ::step_re]
    vmax = float(vals.max()) or 1.0
    frame = _Frame((float(re[0]), float(re[-1])), (float(im[0]), float(im[-1])))
    w = (frame.right - frame.left) / len(re_s)
    h = (frame.bottom - frame.top) / len(im_s)
    body = []
    for j, y in enumerate(im_s):
        for i, x in enumerate(re_s):
            level = int(round(255 * (1.0 - vals[j, i] / vmax)))
            if level >= 255:
                continue
            body.append(f'<rect x="{frame.left + i * w:.2f}" '
                        f'y="{frame.bottom - (j + 1) * h:.2f}" width="{w + 0.05:.2f}" '
                        f'height="{h + 0.05:.2f}" fill="rgb({level},{level},{level})"/>')
    body += frame.axes("Re gamma", "Im gamma", title)
    return _document(body)
