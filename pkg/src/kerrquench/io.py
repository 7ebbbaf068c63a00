"""Plain-text artifacts: key=value config files, CSV, minimal SVG and PGM."""

import sys
from contextlib import contextmanager

import numpy as np


class ConfigError(ValueError):
    """Invalid or contradictory run configuration (CLI exit status 2)."""


def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    cfg = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def fmt(x):
    """17 significant digits, round-trip exact for doubles."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    v = float(x)
    return "0" if v == 0.0 else format(v, ".17g")


@contextmanager
def _open_out(path):
    if path in (None, "", "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def write_csv(path, title, config, columns, rows):
    """CSV with a ``#`` comment header echoing the resolved configuration."""
    with _open_out(path) as fh:
        fh.write(f"# {title}\n")
        for key in sorted(config):
            fh.write(f"# {key}={config[key]}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_svg_lines(path, x, series, xlabel="theta", ylabel=""):
    """Polyline plot of one or more series against ``x`` with simple ticks."""
    width, height, pad = 640, 400, 50
    x = np.asarray(x, dtype=np.float64)
    ys = {k: np.asarray(v, dtype=np.float64) for k, v in series.items()}
    ally = np.concatenate([v[np.isfinite(v)] for v in ys.values()]) if ys else np.zeros(1)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black"/>',
    ]
    for t in np.linspace(x0, x1, 5):
        out.append(f'<line x1="{px(t):.2f}" y1="{height - pad}" x2="{px(t):.2f}" '
                   f'y2="{height - pad + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{height - pad + 18}" font-size="11" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<line x1="{pad - 5}" y1="{py(t):.2f}" x2="{pad}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{pad - 8}" y="{py(t) + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 10}" font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{height / 2}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 14 {height / 2})">{ylabel}</text>')
    for n, (label, y) in enumerate(ys.items()):
        ok = np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
        color = colors[n % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 4}" y="{pad + 14 * (n + 1)}" font-size="11" '
                   f'text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def write_pgm(path, values, vmax=None):
    """ASCII (P2) greyscale image; row 0 is the top of the picture."""
    v = np.asarray(values, dtype=np.float64)
    top = float(v.max()) if vmax is None else float(vmax)
    if top <= 0:
        top = 1.0
    levels = np.clip(np.rint(255.0 * v / top), 0, 255).astype(int)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"P2\n{v.shape[1]} {v.shape[0]}\n255\n")
        for row in levels:
            fh.write(" ".join(str(p) for p in row) + "\n")
