"""Self-contained log-log SVG plots of error against n."""

from collections.abc import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np
from pendulum import DateTime

from besov_rates.domain.types.report import RateFit

WIDTH, HEIGHT = 640, 420
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _scale(values: np.ndarray, low: float, high: float, start: float, stop: float) -> np.ndarray:
    span = high - low or 1.0
    return start + (np.log10(values) - low) / span * (stop - start)


def loglog_svg(
    series: Mapping[str, Sequence[tuple[int, float]]],
    fits: Mapping[str, RateFit | None],
    *,
    title: str,
    y_label: str,
    generated_at: DateTime,
) -> str:
    """Plot each series as markers, with its fitted line dashed and the slope in the legend."""
    points = {label: [(n, v) for n, v in values if v > 0] for label, values in series.items()}
    ns = np.array([n for values in points.values() for n, _ in values] or [1.0], dtype=np.float64)
    ys = np.array([v for values in points.values() for _, v in values] or [1.0], dtype=np.float64)
    x_low, x_high = np.floor(np.log10(ns.min()) * 4) / 4, np.ceil(np.log10(ns.max()) * 4) / 4
    y_low, y_high = np.floor(np.log10(ys.min())), np.ceil(np.log10(ys.max()))
    left, right, top, bottom = MARGIN, WIDTH - 20, 40, HEIGHT - MARGIN

    def x_of(values: np.ndarray) -> np.ndarray:
        return _scale(values, x_low, x_high, left, right)

    def y_of(values: np.ndarray) -> np.ndarray:
        return _scale(values, y_low, y_high, bottom, top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">',
        f"<!-- generated {generated_at.to_iso8601_string()} -->",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
    ]
    for n in sorted({int(n) for n in ns}):
        x = float(x_of(np.array([n]))[0])
        parts.append(f'<text x="{x:.1f}" y="{bottom + 18}" text-anchor="middle" font-size="11">{n}</text>')
    for exponent in range(int(y_low), int(y_high) + 1):
        y = float(y_of(np.array([10.0**exponent]))[0])
        parts.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end" font-size="11">1e{exponent}</text>')
    parts.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 16}" text-anchor="middle" font-size="12">n</text>')
    parts.append(
        f'<text x="16" y="{(top + bottom) / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {(top + bottom) / 2})">{escape(y_label)}</text>'
    )

    for index, (label, values) in enumerate(points.items()):
        if not values:
            continue
        colour = PALETTE[index % len(PALETTE)]
        xs = x_of(np.array([n for n, _ in values], dtype=np.float64))
        ys_label = y_of(np.array([v for _, v in values]))
        parts.extend(
            f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3.5" fill="{colour}"/>' for x, y in zip(xs, ys_label, strict=True)
        )
        legend = escape(label)
        fit = fits.get(label)
        if fit is not None:
            ends = np.array([min(n for n, _ in values), max(n for n, _ in values)], dtype=np.float64)
            fitted = np.exp(fit.intercept) * ends**fit.slope
            (x1, x2), (y1, y2) = x_of(ends), y_of(fitted)
            parts.append(
                f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
                f'stroke="{colour}" stroke-dasharray="5,4"/>'
            )
            legend += f" (slope {fit.slope:.3f})"
        y = top + 16 * (index + 1)
        parts.append(f'<text x="{right - 180}" y="{y}" fill="{colour}" font-size="12">{legend}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
